#include "mlsim/coordinator.hpp"

namespace mlsim {

std::string_view to_string(Status s) noexcept
{
    switch (s) {
    case Status::S: return "S";
    case Status::E: return "E";
    case Status::I: return "I";
    case Status::R: return "R";
    }
    return "";
}

Census aggregate(std::span<const Agent> agents_in_city, CityId city)
{
    Census counts{};
    for (const auto& a : agents_in_city) {
        if (a.current_city != city) {
            throw Error(Errc::ForeignAgent, "coordinator",
                        "agent " + std::to_string(a.id) + " is in city " + std::to_string(a.current_city) +
                            ", not " + std::to_string(city));
        }
        ++counts[static_cast<std::size_t>(a.status)];
    }
    return counts;
}

PolicyDecision apply_policy(const Census& counts, const LockdownPolicy& policy, double beta_base)
{
    PolicyDecision d;
    d.lockdown = policy.mode != LockdownMode::None &&
                 counts[static_cast<std::size_t>(Status::I)] >= policy.infected_threshold;
    if (!d.lockdown) {
        d.beta_effective = beta_base;
        d.gate = MobilityGate::Open;
        return d;
    }
    d.beta_effective = beta_base * policy.contagion_factor;
    d.gate = policy.mode == LockdownMode::Full ? MobilityGate::Closed : MobilityGate::EssentialOnly;
    return d;
}

std::vector<StatusUpdate> assign_transitions(std::span<const Agent> agents_in_city, const Census& old_counts,
                                             const Census& new_counts, RngStream& rng)
{
    std::vector<StageMember> members;
    members.reserve(agents_in_city.size());
    for (const auto& a : agents_in_city) {
        members.push_back({a.id, static_cast<std::size_t>(a.status)});
    }
    const auto changed =
        chain_transitions(members, old_counts, new_counts, rng, Errc::UnreachableCensus, "coordinator");

    std::vector<StatusUpdate> updates;
    updates.reserve(changed.size());
    for (const auto& c : changed) {
        updates.push_back({c.id, static_cast<Status>(c.stage)});
    }
    return updates;
}

Coordinator::Coordinator(CityId city, const LockdownPolicy& policy, bool latching, double beta_base,
                         SeirParams rates, RngStream assign_stream)
    : policy_(policy)
    , latching_(latching)
    , beta_base_(beta_base)
    , rates_(rates)
    , coupling_(kStatusCount)
    , rng_(std::move(assign_stream))
{
    state_.city_id = city;
    state_.beta_effective = beta_base;
    state_.infected_threshold = policy.infected_threshold;
}

Coordinator::Prepared Coordinator::prepare(std::span<const Agent> roster)
{
    Prepared p;
    p.census = aggregate(roster, state_.city_id);
    p.policy = apply_policy(p.census, policy_, beta_base_);

    // A latched lockdown stays on once triggered.
    if (latching_ && state_.lockdown && !p.policy.lockdown) {
        p.policy.lockdown = true;
        p.policy.beta_effective = beta_base_ * policy_.contagion_factor;
        p.policy.gate = policy_.mode == LockdownMode::Full ? MobilityGate::Closed : MobilityGate::EssentialOnly;
    }
    state_.counts = p.census;
    state_.lockdown = p.policy.lockdown;
    state_.beta_effective = p.policy.beta_effective;

    p.params = rates_;
    p.params.beta = p.policy.beta_effective;
    p.macro_input = CompartmentState(seir_labels(), coupling_.macro_input(p.census));
    return p;
}

Coordinator::Outcome Coordinator::finish(std::span<const Agent> roster, const Census& before,
                                         const CompartmentState& macro_output)
{
    if (!macro_output.has_labels(seir_labels())) {
        throw Error(Errc::WrongLabels, "coordinator", "SEIR output has unexpected labels");
    }
    Outcome out;
    out.before = before;
    out.macro_output.assign(macro_output.values().begin(), macro_output.values().end());

    auto discrete = coupling_.discretize(before, out.macro_output);
    out.shifted_units = discrete.shifted_units;
    std::copy(discrete.counts.begin(), discrete.counts.end(), out.after.begin());
    out.updates = assign_transitions(roster, before, out.after, rng_);
    return out;
}

} // namespace mlsim
