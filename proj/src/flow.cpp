#include "mlsim/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mlsim {

std::vector<std::int64_t> discretize_conserving(std::span<const double> values, std::int64_t target_total)
{
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw Error(Errc::InvalidArgument, "coordinator", "discretize_conserving needs finite nonnegative values");
        }
        sum += v;
    }
    if (!(std::abs(sum - static_cast<double>(target_total)) < 0.5)) {
        std::ostringstream msg;
        msg << "values sum to " << sum << " but target total is " << target_total;
        throw Error(Errc::TotalMismatch, "coordinator", msg.str());
    }

    const std::size_t n = values.size();
    std::vector<std::int64_t> out(n);
    std::vector<double> frac(n);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = std::floor(values[i]);
        out[i] = static_cast<std::int64_t>(f);
        frac[i] = values[i] - f;
        assigned += out[i];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });

    // |sum - total| < 0.5 bounds the leftover to [0, n).
    const std::int64_t leftover = target_total - assigned;
    if (leftover < 0 || leftover > static_cast<std::int64_t>(n)) {
        throw Error(Errc::TotalMismatch, "coordinator", "leftover units out of range");
    }
    for (std::int64_t k = 0; k < leftover; ++k) {
        ++out[order[static_cast<std::size_t>(k)]];
    }
    return out;
}

bool forward_reachable(std::span<const std::int64_t> current, std::span<const std::int64_t> target) noexcept
{
    if (current.size() != target.size()) {
        return false;
    }
    std::int64_t cum_current = 0;
    std::int64_t cum_target = 0;
    for (std::size_t k = 0; k < current.size(); ++k) {
        if (target[k] < 0) {
            return false;
        }
        cum_current += current[k];
        cum_target += target[k];
        if (cum_target > cum_current) {
            return false;
        }
    }
    return cum_target == cum_current;
}

std::int64_t make_forward_reachable(std::span<const std::int64_t> current, std::span<std::int64_t> target)
{
    if (current.size() != target.size()) {
        throw Error(Errc::ContractError, "coordinator", "census size mismatch");
    }
    std::int64_t cum_current = 0;
    std::int64_t cum_target = 0;
    std::int64_t moved = 0;
    for (std::size_t k = 0; k + 1 < current.size(); ++k) {
        cum_current += current[k];
        cum_target += target[k];
        if (cum_target > cum_current) {
            const std::int64_t excess = cum_target - cum_current;
            target[k] -= excess;
            target[k + 1] += excess;
            cum_target -= excess;
            moved += excess;
        }
    }
    return moved;
}

std::vector<StageMember> chain_transitions(std::span<const StageMember> members,
                                           std::span<const std::int64_t> current,
                                           std::span<const std::int64_t> target, RngStream& rng, Errc unreachable,
                                           const std::string& component)
{
    const std::size_t stages = current.size();
    if (target.size() != stages) {
        throw Error(Errc::ContractError, component, "census size mismatch");
    }

    std::vector<std::vector<std::size_t>> occupants(stages);
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i > 0 && members[i].id <= members[i - 1].id) {
            throw Error(Errc::ContractError, component, "members must be sorted by id");
        }
        if (members[i].stage >= stages) {
            throw Error(Errc::ContractError, component, "member stage out of range");
        }
        occupants[members[i].stage].push_back(i);
    }
    for (std::size_t k = 0; k < stages; ++k) {
        if (static_cast<std::int64_t>(occupants[k].size()) != current[k]) {
            throw Error(Errc::ContractError, component, "current census does not match members");
        }
    }
    if (!forward_reachable(current, target)) {
        throw Error(unreachable, component, "target census is not reachable by forward transitions");
    }

    std::vector<std::size_t> final_stage(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        final_stage[i] = members[i].stage;
    }

    std::vector<std::size_t> arrivals; // member indices entering stage k this cycle, ascending
    std::int64_t cum_current = 0;
    std::int64_t cum_target = 0;
    for (std::size_t k = 0; k + 1 < stages; ++k) {
        cum_current += current[k];
        cum_target += target[k];
        const auto flow = static_cast<std::size_t>(cum_current - cum_target);

        const auto& old_pool = occupants[k];
        std::vector<std::size_t> leaving;
        if (flow <= old_pool.size()) {
            for (std::size_t j : rng.sample_without_replacement(old_pool.size(), flow)) {
                leaving.push_back(old_pool[j]);
            }
        } else {
            leaving = old_pool;
            for (std::size_t j : rng.sample_without_replacement(arrivals.size(), flow - old_pool.size())) {
                leaving.push_back(arrivals[j]);
            }
            std::sort(leaving.begin(), leaving.end());
        }
        for (std::size_t idx : leaving) {
            final_stage[idx] = k + 1;
        }
        arrivals = std::move(leaving);
    }

    std::vector<StageMember> changed;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (final_stage[i] != members[i].stage) {
            changed.push_back({members[i].id, final_stage[i]});
        }
    }
    return changed;
}

std::vector<double> ContinuousCoupling::macro_input(std::span<const std::int64_t> census)
{
    if (census.size() != residual_.size()) {
        throw Error(Errc::ContractError, "coordinator", "census size mismatch");
    }
    std::vector<double> input(census.size());
    bool negative = false;
    for (std::size_t k = 0; k < census.size(); ++k) {
        input[k] = static_cast<double>(census[k]) + residual_[k];
        negative = negative || input[k] < 0.0;
    }
    if (negative) {
        std::fill(residual_.begin(), residual_.end(), 0.0);
        ++resets_;
        for (std::size_t k = 0; k < census.size(); ++k) {
            input[k] = static_cast<double>(census[k]);
        }
    }
    return input;
}

ContinuousCoupling::Discretized ContinuousCoupling::discretize(std::span<const std::int64_t> census,
                                                               std::span<const double> macro_output)
{
    if (census.size() != residual_.size() || macro_output.size() != residual_.size()) {
        throw Error(Errc::ContractError, "coordinator", "census size mismatch");
    }
    const std::int64_t total = std::accumulate(census.begin(), census.end(), std::int64_t{0});
    Discretized out;
    out.counts = discretize_conserving(macro_output, total);
    out.shifted_units = make_forward_reachable(census, out.counts);
    for (std::size_t k = 0; k < residual_.size(); ++k) {
        residual_[k] = macro_output[k] - static_cast<double>(out.counts[k]);
    }
    return out;
}

} // namespace mlsim
