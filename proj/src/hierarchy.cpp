#include "mlsim/hierarchy.hpp"

#include <cmath>
#include <set>

namespace mlsim {

std::string_view to_string(NodeKind kind) noexcept
{
    switch (kind) {
    case NodeKind::DiscreteMicro: return "DiscreteMicro";
    case NodeKind::ContinuousMacro: return "ContinuousMacro";
    case NodeKind::Coordinator: return "Coordinator";
    }
    return "";
}

void ModelTree::add_node(ModelNode node, std::optional<NodeId> parent)
{
    if (nodes_.count(node.id) != 0) {
        throw Error(Errc::DuplicateNodeId, "core", "node id " + std::to_string(node.id) + " already exists");
    }
    for (const auto& [id, existing] : nodes_) {
        if (!node.name.empty() && existing.name == node.name) {
            throw Error(Errc::DuplicateNodeId, "core", "node name '" + node.name + "' already exists");
        }
    }
    if (parent) {
        auto it = nodes_.find(*parent);
        if (it == nodes_.end()) {
            throw Error(Errc::ContractError, "core", "parent " + std::to_string(*parent) + " does not exist");
        }
        it->second.children.push_back(node.id);
        parent_[node.id] = *parent;
    } else {
        if (root_) {
            throw Error(Errc::ContractError, "core", "tree already has a root");
        }
        root_ = node.id;
    }
    const NodeId id = node.id;
    nodes_.emplace(id, std::move(node));
}

const ModelNode& ModelTree::root() const
{
    if (!root_) {
        throw Error(Errc::ContractError, "core", "tree is empty");
    }
    return nodes_.at(*root_);
}

const ModelNode& ModelTree::node(NodeId id) const
{
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw Error(Errc::ContractError, "core", "no node with id " + std::to_string(id));
    }
    return it->second;
}

ModelNode& ModelTree::node(NodeId id)
{
    return const_cast<ModelNode&>(std::as_const(*this).node(id));
}

std::optional<NodeId> ModelTree::parent(NodeId id) const
{
    auto it = parent_.find(id);
    if (it == parent_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<NodeId> ModelTree::ids() const
{
    std::vector<NodeId> out;
    out.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_) {
        out.push_back(id);
    }
    return out;
}

std::vector<NodeId> ModelTree::ids_of_kind(NodeKind kind) const
{
    std::vector<NodeId> out;
    for (const auto& [id, n] : nodes_) {
        if (n.kind == kind) {
            out.push_back(id);
        }
    }
    return out;
}

void ModelTree::validate() const
{
    if (!root_) {
        throw Error(Errc::ContractError, "core", "tree has no root");
    }
    // Walk down from the root; every node must be reached exactly once.
    std::set<NodeId> seen;
    std::vector<NodeId> stack{*root_};
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        if (!seen.insert(id).second) {
            throw Error(Errc::ContractError, "core", "node " + std::to_string(id) + " reached twice");
        }
        for (NodeId child : node(id).children) {
            if (parent(child) != id) {
                throw Error(Errc::ContractError, "core", "child/parent mismatch at node " + std::to_string(child));
            }
            stack.push_back(child);
        }
    }
    if (seen.size() != nodes_.size()) {
        throw Error(Errc::ContractError, "core", "tree has unreachable nodes");
    }
    for (const auto& [id, n] : nodes_) {
        if (n.kind != NodeKind::ContinuousMacro) {
            continue;
        }
        if (!n.integrator) {
            throw Error(Errc::ContractError, "core", "continuous node " + std::to_string(id) + " lacks integrator");
        }
        const auto& s = *n.integrator;
        if (!(s.dt_min > 0.0 && s.dt_min <= s.dt && s.dt <= s.dt_max)) {
            throw Error(Errc::ContractError, "core", "integrator bounds violated at node " + std::to_string(id));
        }
    }
}

ModelTree build_hierarchy(const RunConfig& config)
{
    const IntegratorSettings settings{config.integrator.dt, config.integrator.dt_min, config.integrator.dt_max};

    ModelTree tree;
    tree.add_node({kRootNode, NodeKind::Coordinator, "root", {}, std::nullopt}, std::nullopt);

    if (config.scenario == Scenario::Epidemic) {
        const auto& cities = config.epidemic.cities;
        if (cities.empty()) {
            throw Error(Errc::EmptyScenario, "core", "epidemic scenario has no cities");
        }
        for (std::size_t c = 0; c < cities.size(); ++c) {
            tree.add_node({coordinator_node(c), NodeKind::Coordinator, cities[c].name, {}, std::nullopt}, kRootNode);
            tree.add_node({seir_node(c), NodeKind::ContinuousMacro, cities[c].name + "/seir", {}, settings},
                          coordinator_node(c));
        }
    } else {
        const auto& p = config.pollution;
        if (p.width <= 0 || p.height <= 0) {
            throw Error(Errc::EmptyScenario, "core", "pollution grid has zero size");
        }
        tree.add_node({kGridNode, NodeKind::DiscreteMicro, "grid", {}, std::nullopt}, kRootNode);
        tree.add_node({kFleetNode, NodeKind::ContinuousMacro, "fleet", {}, settings}, kRootNode);
    }
    tree.validate();
    return tree;
}

CompartmentState run_bracketed(const ModelNode& node, const CompartmentModel& model, const CompartmentState& state,
                               double t_start, double t_end, IntegrationTrace* trace)
{
    if (node.kind != NodeKind::ContinuousMacro || !node.integrator) {
        throw Error(Errc::ContractError, "core", "node " + std::to_string(node.id) + " is not a continuous node");
    }
    if (!(t_end > t_start)) {
        throw Error(Errc::ContractError, "core", "bracketed interval must have t_end > t_start");
    }
    return integrate(model, state, t_start, t_end, node.integrator->dt, trace);
}

double adapt_lod(ModelNode& node, double observed_growth, double g_threshold)
{
    if (node.kind != NodeKind::ContinuousMacro || !node.integrator) {
        throw Error(Errc::ContractError, "core", "LoD adaptation applies to continuous nodes only");
    }
    auto& s = *node.integrator;
    if (observed_growth > g_threshold) {
        s.dt = std::max(s.dt / 2.0, s.dt_min);
    } else if (observed_growth < g_threshold / 2.0) {
        s.dt = std::min(s.dt * 2.0, s.dt_max);
    }
    return s.dt;
}

} // namespace mlsim
