#pragma once

#include "mlsim/config.hpp"
#include "mlsim/exchange.hpp"
#include "mlsim/flow.hpp"
#include "mlsim/hierarchy.hpp"
#include "mlsim/rng.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace mlsim {

enum class Fuel : std::uint8_t { Petrol = 0, LPG = 1, Electric = 2 };

struct Vehicle {
    std::uint64_t id = 0;
    Fuel fuel = Fuel::Petrol;
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend bool operator==(const Vehicle&, const Vehicle&) = default;
};

/// Fleet head count indexed by Fuel.
using FleetCounts = std::array<std::int64_t, 3>;

FleetCounts count_fleet(std::span<const Vehicle> vehicles);

/// Toroidal patch grid; levels are row-major.
class PollutionGrid {
public:
    PollutionGrid(std::int64_t width, std::int64_t height, double initial = 0.0);

    std::int64_t width() const noexcept { return width_; }
    std::int64_t height() const noexcept { return height_; }
    std::size_t patch_count() const noexcept { return levels_.size(); }

    double& at(std::int64_t x, std::int64_t y);
    double at(std::int64_t x, std::int64_t y) const;
    std::span<double> levels() noexcept { return levels_; }
    std::span<const double> levels() const noexcept { return levels_; }
    double total() const noexcept;

    std::int64_t wrap_x(std::int64_t x) const noexcept;
    std::int64_t wrap_y(std::int64_t y) const noexcept;

private:
    std::int64_t width_;
    std::int64_t height_;
    std::vector<double> levels_;
};

struct PollutionParams {
    double deposit_lpg = 0.5; // petrol deposits twice this, electric nothing
    double diffusion = 0.5;
    double evaporation = 0.05;
    double electric_pollution = 0.0; // per electric vehicle per step, over the whole grid
    std::int64_t fleet_update_period = 10;
};

/// The 8 Moore directions in draw order.
inline constexpr std::array<std::array<int, 2>, 8> kMooreDirections = {{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1},
}};

double local_deposit(Fuel fuel, double deposit_lpg) noexcept;

/// Moves one vehicle one patch in direction `dir` (index into
/// kMooreDirections) and deposits its emission on the new patch.
void step_vehicle(Vehicle& vehicle, std::size_t dir, PollutionGrid& grid, double deposit_lpg);

/// Every vehicle, in id order, takes a uniformly random Moore step.
void move_vehicles(std::vector<Vehicle>& vehicles, PollutionGrid& grid, double deposit_lpg, RngStream& rng);

/// Synchronous diffusion: each patch keeps (1-d) of its level and sends d/8
/// to each Moore neighbour.
PollutionGrid diffuse(const PollutionGrid& grid, double d);

/// level <- max(0, level - e) on every patch.
void evaporate(PollutionGrid& grid, double e);

/// Spreads num_electric * electric_pollution uniformly over the grid.
void add_global_electric_pollution(PollutionGrid& grid, std::int64_t num_electric, double electric_pollution);

/// Converts vehicles so the fleet matches new_counts via P->L, P->E, L->E
/// only. `vehicles` must be sorted by id. Throws UnreachableFleet.
void update_fleet(std::vector<Vehicle>& vehicles, const FleetCounts& new_counts, RngStream& rng);

struct PollutionStepReport {
    std::int64_t step = 0;
    double total_pollution = 0.0;
    FleetCounts fleet{};
    bool fleet_updated = false;
};

/// Vehicles on a pollution grid whose fuel mix follows a fleet-transition
/// model every fleet_update_period steps.
class PollutionSimulation {
public:
    explicit PollutionSimulation(const RunConfig& config, std::optional<std::filesystem::path> exchange_dir = {});

    PollutionStepReport step();

    const PollutionGrid& grid() const noexcept { return grid_; }
    const std::vector<Vehicle>& vehicles() const noexcept { return vehicles_; }
    const SimClock& clock() const noexcept { return clock_; }
    const ModelTree& tree() const noexcept { return tree_; }
    FleetCounts fleet() const { return count_fleet(vehicles_); }

private:
    ExchangeRecord pass(const ExchangeRecord& record);
    void run_fleet_model(double t_start, double t_end);

    RunConfig config_;
    PollutionParams params_;
    std::optional<std::filesystem::path> exchange_dir_;
    ModelTree tree_;
    SimClock clock_;
    PollutionGrid grid_;
    std::vector<Vehicle> vehicles_;
    ContinuousCoupling coupling_;
    RngStream move_rng_;
    RngStream fleet_rng_;
};

} // namespace mlsim
