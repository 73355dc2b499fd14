#pragma once

#include "mlsim/agent.hpp"
#include "mlsim/config.hpp"
#include "mlsim/flow.hpp"
#include "mlsim/hierarchy.hpp"
#include "mlsim/ode.hpp"
#include "mlsim/rng.hpp"

#include <span>
#include <vector>

namespace mlsim {

/// Who may leave a city during the move phase.
enum class MobilityGate : std::uint8_t { Open, EssentialOnly, Closed };

struct LockdownPolicy {
    LockdownMode mode = LockdownMode::None;
    double contagion_factor = 0.5; // in (0, 1]
    std::int64_t infected_threshold = 0;
};

struct PolicyDecision {
    bool lockdown = false;
    double beta_effective = 0.0;
    MobilityGate gate = MobilityGate::Open;
};

/// Per-city coordinator record.
struct LocationState {
    CityId city_id = 0;
    Census counts{};
    bool lockdown = false;
    double beta_effective = 0.0;
    std::int64_t infected_threshold = 0;
};

/// Census of the agents located in `city`. Throws ForeignAgent.
Census aggregate(std::span<const Agent> agents_in_city, CityId city);

PolicyDecision apply_policy(const Census& counts, const LockdownPolicy& policy, double beta_base);

struct StatusUpdate {
    std::uint64_t agent_id = 0;
    Status status = Status::S;

    friend bool operator==(const StatusUpdate&, const StatusUpdate&) = default;
};

/// Chooses which agents change status so the city census moves from
/// old_counts to new_counts along S -> E -> I -> R. `agents_in_city` must be
/// sorted by id. Throws UnreachableCensus.
std::vector<StatusUpdate> assign_transitions(std::span<const Agent> agents_in_city, const Census& old_counts,
                                             const Census& new_counts, RngStream& rng);

/// The local coordinator of one city. Owns the city's lockdown state, the
/// continuous remainder of its SEIR model and its assignment stream; it never
/// touches another city's state, so coordinators may run concurrently.
class Coordinator {
public:
    Coordinator(CityId city, const LockdownPolicy& policy, bool latching, double beta_base, SeirParams rates,
                RngStream assign_stream);

    CityId city() const noexcept { return state_.city_id; }
    NodeId node_id() const noexcept { return coordinator_node(state_.city_id); }
    NodeId macro_node_id() const noexcept { return seir_node(state_.city_id); }
    const LocationState& state() const noexcept { return state_; }
    const ContinuousCoupling& coupling() const noexcept { return coupling_; }

    struct Prepared {
        Census census{};
        PolicyDecision policy;
        CompartmentState macro_input;
        SeirParams params;
    };

    /// Aggregates the roster, applies the lockdown policy and builds the SEIR
    /// input for the coming interval.
    Prepared prepare(std::span<const Agent> roster);

    struct Outcome {
        Census before{};
        Census after{};
        std::vector<double> macro_output;
        std::int64_t shifted_units = 0;
        std::vector<StatusUpdate> updates;
    };

    /// Discretizes the SEIR result and decides the status changes.
    Outcome finish(std::span<const Agent> roster, const Census& before, const CompartmentState& macro_output);

private:
    LocationState state_;
    LockdownPolicy policy_;
    bool latching_;
    double beta_base_;
    SeirParams rates_;
    ContinuousCoupling coupling_;
    RngStream rng_;
};

} // namespace mlsim
