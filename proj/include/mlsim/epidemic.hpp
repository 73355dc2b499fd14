#pragma once

#include "mlsim/agent.hpp"
#include "mlsim/config.hpp"
#include "mlsim/coordinator.hpp"
#include "mlsim/exchange.hpp"
#include "mlsim/hierarchy.hpp"
#include "mlsim/rng.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace mlsim {

struct City {
    CityId id = 0;
    std::string name;
    std::int64_t population_target = 0;
    double beta_base = 0.0;
};

/// Everyone starts at home as susceptible except one uniformly chosen patient
/// zero. Each agent is Essential with probability essential_fraction.
/// Throws EmptyPopulation.
std::vector<Agent> init_population(const EpidemicConfig& config, RngStream& rng);

struct MoveResult {
    std::size_t moved = 0;
    bool single_city = false; // movement skipped: nowhere to go
};

/// One move phase. Agents are visited in id order and each consumes one
/// draw; an agent leaves iff draw < p of its current city, it is not
/// infected, and its city's gate lets it out. Destinations are uniform over
/// the other cities. `agents` must be sorted by id.
MoveResult move_agents(std::vector<Agent>& agents, std::span<const double> p_by_city,
                       std::span<const MobilityGate> gates, RngStream& rng);

MoveResult move_agents(std::vector<Agent>& agents, double p, std::span<const MobilityGate> gates, RngStream& rng);

struct CityStepReport {
    CityId city = 0;
    Census before{};            // census handed to the coordinator
    std::vector<double> macro_input;
    std::vector<double> macro_output;
    Census discretized{};       // coordinator's integer target
    Census after_transitions{}; // census once status updates are applied
    Census after_move{};
    bool lockdown = false;
    MobilityGate gate = MobilityGate::Open;
    double integrator_dt = 0.0; // dt used for this interval
    std::int64_t shifted_units = 0;
};

struct EpidemicStepReport {
    std::int64_t step = 0; // index of the step just completed (1-based)
    double time = 0.0;     // simulated time at the end of the step
    std::vector<CityStepReport> cities;
    std::size_t moved = 0;
    bool single_city = false;
};

struct EngineOptions {
    /// When set, every level crossing goes through JSON files in this
    /// directory instead of staying in memory.
    std::optional<std::filesystem::path> exchange_dir;
};

/// Multi-city epidemic: an agent mobility layer whose per-city coordinators
/// run SEIR models once per micro step.
class EpidemicSimulation {
public:
    explicit EpidemicSimulation(const RunConfig& config, EngineOptions options = {});

    /// Aggregate, run the SEIR interval, update statuses, then move agents.
    EpidemicStepReport step();

    const std::vector<Agent>& agents() const noexcept { return agents_; }
    const std::vector<City>& cities() const noexcept { return cities_; }
    const ModelTree& tree() const noexcept { return tree_; }
    const SimClock& clock() const noexcept { return clock_; }
    const std::vector<Coordinator>& coordinators() const noexcept { return coordinators_; }
    std::vector<Census> census_by_city() const;
    CityId origin_city() const noexcept { return origin_city_; }

private:
    std::vector<std::vector<Agent>> rosters() const;
    ExchangeRecord pass(const ExchangeRecord& record);

    RunConfig config_;
    EngineOptions options_;
    ModelTree tree_;
    SimClock clock_;
    std::vector<City> cities_;
    std::vector<Agent> agents_;
    std::vector<Coordinator> coordinators_;
    std::vector<double> mobility_;
    RngStream move_rng_;
    CityId origin_city_ = 0;
};

} // namespace mlsim
