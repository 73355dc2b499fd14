#pragma once

#include "mlsim/error.hpp"
#include "mlsim/rng.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mlsim {

/// Largest-remainder rounding: floors first, then one extra unit to each of
/// the largest fractional parts (ties to the lowest index) until the output
/// sums to target_total. Throws TotalMismatch when the real values do not sum
/// to within 0.5 of target_total.
std::vector<std::int64_t> discretize_conserving(std::span<const double> values, std::int64_t target_total);

/// True when `target` can be reached from `current` by moving units only
/// forward along the chain 0 -> 1 -> ... -> n-1.
bool forward_reachable(std::span<const std::int64_t> current, std::span<const std::int64_t> target) noexcept;

/// Moves units of `target` downstream until it is forward-reachable from
/// `current` (same total required). Returns the number of units moved.
std::int64_t make_forward_reachable(std::span<const std::int64_t> current, std::span<std::int64_t> target);

/// A member of a staged population (agent or vehicle) and its stage index.
struct StageMember {
    std::uint64_t id = 0;
    std::size_t stage = 0;
};

/// Picks which members advance so that the census moves from `current` to
/// `target` along the chain. Members advancing out of stage k are sampled
/// uniformly from those already in k; newcomers to k this cycle are only
/// taken once the old occupants are exhausted. `members` must be sorted by
/// id. Returns the changed members (final stage) sorted by id.
///
/// Throws Error(unreachable) when the target is not forward-reachable.
std::vector<StageMember> chain_transitions(std::span<const StageMember> members,
                                           std::span<const std::int64_t> current,
                                           std::span<const std::int64_t> target, RngStream& rng, Errc unreachable,
                                           const std::string& component);

/// Couples an integer census to a continuous model across cycles.
///
/// The continuous model sees census + residual, where the residual is the
/// sub-unit remainder left by the previous discretization. Without it every
/// flow smaller than half a unit per cycle would be rounded away and the
/// census could stall indefinitely.
class ContinuousCoupling {
public:
    explicit ContinuousCoupling(std::size_t compartments) : residual_(compartments, 0.0) {}

    /// Continuous input for the next cycle. The residual is discarded when
    /// census changes outside the model (migration) would make it negative.
    std::vector<double> macro_input(std::span<const std::int64_t> census);

    struct Discretized {
        std::vector<std::int64_t> counts;
        std::int64_t shifted_units = 0; // units moved by make_forward_reachable
    };

    /// Rounds the model output to a forward-reachable integer census with the
    /// same total as `census`, and keeps the remainder for the next cycle.
    Discretized discretize(std::span<const std::int64_t> census, std::span<const double> macro_output);

    std::span<const double> residual() const noexcept { return residual_; }
    std::size_t residual_resets() const noexcept { return resets_; }

private:
    std::vector<double> residual_;
    std::size_t resets_ = 0;
};

} // namespace mlsim
