#pragma once

#include "mlsim/config.hpp"
#include "mlsim/error.hpp"
#include "mlsim/ode.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace mlsim {

using NodeId = std::uint64_t;

enum class NodeKind { DiscreteMicro, ContinuousMacro, Coordinator };

std::string_view to_string(NodeKind kind) noexcept;

/// Integration sub-step of a continuous node; the level of detail it runs at.
struct IntegratorSettings {
    double dt = 0.25;
    double dt_min = 0.0625;
    double dt_max = 1.0;
};

struct ModelNode {
    NodeId id = 0;
    NodeKind kind = NodeKind::Coordinator;
    std::string name;
    std::vector<NodeId> children;
    std::optional<IntegratorSettings> integrator; // ContinuousMacro only
};

/// Simulated time. Micro-layer decisions happen at integer multiples of
/// micro_step; `now` is derived from the step counter so it never drifts.
class SimClock {
public:
    explicit SimClock(double micro_step = 1.0) : micro_step_(micro_step) {}

    double now() const noexcept { return static_cast<double>(step_) * micro_step_; }
    double next() const noexcept { return static_cast<double>(step_ + 1) * micro_step_; }
    std::int64_t step() const noexcept { return step_; }
    double micro_step() const noexcept { return micro_step_; }
    void advance() noexcept { ++step_; }

private:
    double micro_step_;
    std::int64_t step_ = 0;
};

class ModelTree {
public:
    /// Adds `node` under `parent` (or as the root). Throws DuplicateNodeId.
    void add_node(ModelNode node, std::optional<NodeId> parent);

    const ModelNode& root() const;
    const ModelNode& node(NodeId id) const;
    ModelNode& node(NodeId id);
    std::optional<NodeId> parent(NodeId id) const;
    bool contains(NodeId id) const { return nodes_.count(id) != 0; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Node ids in ascending order.
    std::vector<NodeId> ids() const;
    std::vector<NodeId> ids_of_kind(NodeKind kind) const;

    /// Throws ContractError unless the parent relation forms a single tree
    /// and every continuous node has dt_min <= dt <= dt_max.
    void validate() const;

private:
    std::map<NodeId, ModelNode> nodes_;
    std::map<NodeId, NodeId> parent_;
    std::optional<NodeId> root_;
};

/// Node ids used by the scenario trees.
inline constexpr NodeId kRootNode = 0;
inline constexpr NodeId coordinator_node(std::size_t city) { return 1 + 2 * static_cast<NodeId>(city); }
inline constexpr NodeId seir_node(std::size_t city) { return 2 + 2 * static_cast<NodeId>(city); }
inline constexpr NodeId kGridNode = 1;
inline constexpr NodeId kFleetNode = 2;

/// Epidemic: root coordinator, one coordinator per city, each owning a SEIR
/// node. Pollution: root with a grid node and a fleet node.
/// Throws DuplicateNodeId (repeated city names) or EmptyScenario.
ModelTree build_hierarchy(const RunConfig& config);

/// Advances a continuous node's state from t_start to exactly t_end using the
/// node's integrator_dt. Never integrates past t_end.
CompartmentState run_bracketed(const ModelNode& node, const CompartmentModel& model, const CompartmentState& state,
                               double t_start, double t_end, IntegrationTrace* trace = nullptr);

/// Level-of-detail rule: halve dt when growth exceeds the threshold, double it
/// when growth falls below half the threshold, clamp to [dt_min, dt_max].
double adapt_lod(ModelNode& node, double observed_growth, double g_threshold);

/// Relative change of the infected count over one micro step.
inline double infected_growth(std::int64_t infected_before, std::int64_t infected_after)
{
    return static_cast<double>(infected_after - infected_before) /
           static_cast<double>(std::max<std::int64_t>(infected_before, 1));
}

/// Runs `fn(node_id)` for every sibling on up to `worker_count` threads.
/// Results are ordered by node id and do not depend on the worker count or on
/// completion order. Any exception aborts the step as ChildFailure, reported
/// for the lowest failing node id.
template <class Fn>
auto run_siblings_parallel(std::span<const NodeId> nodes, std::size_t worker_count, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, NodeId>>
{
    using Result = std::invoke_result_t<Fn&, NodeId>;
    if (worker_count == 0) {
        throw Error(Errc::InvalidArgument, "core", "worker_count must be positive");
    }

    std::vector<NodeId> order(nodes.begin(), nodes.end());
    std::sort(order.begin(), order.end());

    const std::size_t n = order.size();
    std::vector<std::optional<Result>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                results[i].emplace(fn(order[i]));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    {
        const std::size_t extra = std::min(worker_count, n) > 0 ? std::min(worker_count, n) - 1 : 0;
        std::vector<std::jthread> pool;
        pool.reserve(extra);
        for (std::size_t w = 0; w < extra; ++w) {
            pool.emplace_back(worker);
        }
        worker();
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                throw ChildFailure(order[i], e.what());
            } catch (...) {
                throw ChildFailure(order[i], "unknown exception");
            }
        }
    }

    std::vector<Result> out;
    out.reserve(n);
    for (auto& r : results) {
        out.push_back(std::move(*r));
    }
    return out;
}

} // namespace mlsim
