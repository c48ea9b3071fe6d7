#include "frm/repmap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "frm/environment.hpp"
#include "frm/problem.hpp"

namespace frm {

FoliatedRepMap FoliatedRepMap::instantiate(const BaseRoadmap& base, std::shared_ptr<const FoliatedSpace> space,
                                           const std::vector<IntersectionWitness>& witnesses,
                                           const Environment& bounds) {
    if (!space) throw ContractViolation("instantiate needs a foliated space");
    if (base.size() == 0) throw ContractViolation("base roadmap has no components");
    if (base.dimension() != space->dimension()) throw LoadError("roadmap and problem dimensions differ");
    const int k = base.size();
    const int leaves = static_cast<int>(space->leaves().size());

    auto mixture = std::make_shared<GaussianMixture>(base.components);
    auto edges = std::make_shared<std::vector<RepMapEdge>>();
    for (int l = 0; l < leaves; ++l)
        for (const auto& [a, b] : base.edges) edges->push_back({l * k + a, l * k + b, EdgeKind::IntraLeaf, -1});

    for (std::size_t w = 0; w < witnesses.size(); ++w) {
        const auto& wit = witnesses[w];
        space->validate_witness(wit);
        if (!bounds.in_bounds(wit.config))
            throw LoadError("intersection witness " + std::to_string(w) + " lies outside the bounds");
        const int j = mixture->assign(wit.config);
        edges->push_back({space->leaf_index(wit.leaf_a) * k + j, space->leaf_index(wit.leaf_b) * k + j,
                          EdgeKind::Intersection, static_cast<int>(w)});
    }

    std::vector<std::pair<int, int>> endpoints;
    endpoints.reserve(edges->size());
    for (const auto& e : *edges) endpoints.emplace_back(e.a, e.b);

    FoliatedRepMap map;
    map.space_ = std::move(space);
    map.mixture_ = std::move(mixture);
    map.topology_ = std::make_shared<Topology>(Topology::from_edges(leaves * k, std::move(endpoints)));
    map.edges_ = std::move(edges);
    map.witnesses_ = std::make_shared<std::vector<IntersectionWitness>>(witnesses);
    map.reset_counts();
    return map;
}

FoliatedRepMap FoliatedRepMap::instantiate(const BaseRoadmap& base, const Problem& problem) {
    return instantiate(base, problem.space, problem.witnesses, *problem.env);
}

int FoliatedRepMap::node_id(const LeafId& leaf, int j) const {
    if (j < 0 || j >= distributions()) throw ContractViolation("distribution id out of range");
    return space_->leaf_index(leaf) * distributions() + j;
}

LeafId FoliatedRepMap::node_leaf(int node) const {
    if (node < 0 || node >= node_count()) throw ContractViolation("node id out of range");
    return space_->leaves()[static_cast<std::size_t>(node / distributions())];
}

int FoliatedRepMap::node_distribution(int node) const {
    if (node < 0 || node >= node_count()) throw ContractViolation("node id out of range");
    return node % distributions();
}

const RepMapEdge& FoliatedRepMap::edge(int e) const {
    if (e < 0 || e >= edge_count()) throw ContractViolation("edge id out of range");
    return (*edges_)[static_cast<std::size_t>(e)];
}

const NodeCounts& FoliatedRepMap::counts(int node) const {
    if (node < 0 || node >= node_count()) throw ContractViolation("node id out of range");
    return state_.nodes[static_cast<std::size_t>(node)];
}

double FoliatedRepMap::robot_invalid(int j) const {
    const auto idx = static_cast<std::size_t>(j);
    return static_cast<double>(robot_invalid_count(j)) + state_.robot_invalid_prior[idx];
}

std::uint64_t FoliatedRepMap::robot_invalid_count(int j) const {
    if (j < 0 || j >= distributions()) throw ContractViolation("distribution id out of range");
    return state_.robot_invalid[static_cast<std::size_t>(j)];
}

std::uint64_t FoliatedRepMap::count_mass() const {
    std::uint64_t total = std::accumulate(state_.robot_invalid.begin(), state_.robot_invalid.end(), std::uint64_t{0});
    for (const auto& c : state_.nodes) total += c.valid + c.object_invalid + c.const_invalid;
    return total;
}

bool FoliatedRepMap::counts_are_zero() const { return count_mass() == 0 && state_.samples_ingested == 0; }

void FoliatedRepMap::restore(MapState state) {
    if (state.nodes.size() != static_cast<std::size_t>(node_count()) ||
        state.robot_invalid.size() != static_cast<std::size_t>(distributions()) ||
        state.robot_invalid_prior.size() != static_cast<std::size_t>(distributions()))
        throw LoadError("map state does not match the map's node or distribution count");
    for (double p : state.robot_invalid_prior)
        if (!std::isfinite(p) || p < 0.0) throw LoadError("robot-invalid prior must be finite and non-negative");
    state_ = std::move(state);
}

void FoliatedRepMap::reset_counts() {
    state_.nodes.assign(static_cast<std::size_t>(node_count()), NodeCounts{});
    state_.robot_invalid.assign(static_cast<std::size_t>(distributions()), 0);
    state_.robot_invalid_prior.assign(static_cast<std::size_t>(distributions()), 0.0);
    state_.samples_ingested = 0;
}

void FoliatedRepMap::set_robot_invalid_prior(int j, double value) {
    if (j < 0 || j >= distributions()) throw ContractViolation("distribution id out of range");
    if (!std::isfinite(value) || value < 0.0) throw ConfigError("robot-invalid prior must be finite and non-negative");
    state_.robot_invalid_prior[static_cast<std::size_t>(j)] = value;
}

std::pair<int, int> FoliatedRepMap::attach_start_goal(const Configuration& q_start, const LeafId& leaf_start,
                                                      const Configuration& q_goal, const LeafId& leaf_goal) const {
    for (const auto& [q, leaf, what] : {std::tuple{&q_start, &leaf_start, "start"}, std::tuple{&q_goal, &leaf_goal, "goal"}}) {
        if (!space_->contains(*leaf)) throw QueryRejected(std::string(what) + " references undeclared leaf " + to_string(*leaf));
        if (q->size() != space_->dimension()) throw QueryRejected(std::string(what) + " configuration has wrong dimension");
        if (!space_->on_leaf(*q, *leaf))
            throw QueryRejected(std::string(what) + " configuration violates leaf " + to_string(*leaf) + " (residual " +
                                std::to_string(space_->evaluate_constraint(*q, *leaf)) + ")");
    }
    return {node_id(leaf_start, mixture_->assign(q_start)), node_id(leaf_goal, mixture_->assign(q_goal))};
}

Route FoliatedRepMap::route_from_nodes(const std::vector<int>& nodes) const {
    Route route;
    route.nodes = nodes;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        if (nodes[k] < 0 || nodes[k] >= node_count()) throw ContractViolation("route node out of range");
        const auto& adj = topology_->adjacency[static_cast<std::size_t>(nodes[k])];
        auto it = std::lower_bound(adj.begin(), adj.end(), std::pair{nodes[k + 1], -1});
        if (it == adj.end() || it->first != nodes[k + 1])
            throw ContractViolation("no edge joins nodes " + std::to_string(nodes[k]) + " and " + std::to_string(nodes[k + 1]));
        route.edges.push_back(it->second);
    }
    return route;
}

std::vector<Task> FoliatedRepMap::split_into_tasks(const Route& route, const Configuration& q_start,
                                                   const Configuration& q_goal) const {
    if (route.nodes.empty() || route.edges.size() + 1 != route.nodes.size())
        throw ContractViolation("route must have one more node than edges");
    for (std::size_t k = 0; k < route.edges.size(); ++k) {
        const auto& e = edge(route.edges[k]);
        const int u = route.nodes[k], v = route.nodes[k + 1];
        if (!((e.a == u && e.b == v) || (e.a == v && e.b == u)))
            throw ContractViolation("route edge " + std::to_string(route.edges[k]) + " does not join its nodes");
    }
    auto on_section_leaf = [&](const Configuration& q, const LeafId& leaf) {
        if (space_->on_leaf(q, leaf)) return q;
        auto p = space_->project(q, leaf);
        if (!p) throw ContractViolation("witness cannot be projected onto leaf " + to_string(leaf));
        return *p;
    };

    std::vector<Task> tasks;
    Task current;
    current.leaf = node_leaf(route.nodes.front());
    current.start_config = q_start;
    for (std::size_t k = 0; k < route.nodes.size(); ++k) {
        const int n = route.nodes[k];
        current.nodes.push_back(n);
        current.distribution_list.push_back(mixture_->component(node_distribution(n)));
        if (k == route.edges.size()) break;
        const auto& e = edge(route.edges[k]);
        if (e.kind != EdgeKind::Intersection) continue;
        const auto& w = (*witnesses_)[static_cast<std::size_t>(e.witness)].config;
        current.goal_config = on_section_leaf(w, current.leaf);
        tasks.push_back(std::move(current));
        current = Task{};
        current.leaf = node_leaf(route.nodes[k + 1]);
        current.start_config = on_section_leaf(w, current.leaf);
    }
    current.goal_config = q_goal;
    tasks.push_back(std::move(current));
    return tasks;
}

void FoliatedRepMap::ingest_sample(const LeafId& leaf, const Configuration& q, ValidityTag tag) {
    const int j = mixture_->assign(q);
    ++state_.samples_ingested;
    if (tag == ValidityTag::RobotInvalid) {
        ++state_.robot_invalid[static_cast<std::size_t>(j)];
        return;
    }
    auto& c = state_.nodes[static_cast<std::size_t>(node_id(leaf, j))];
    switch (tag) {
        case ValidityTag::Valid: ++c.valid; break;
        case ValidityTag::ObjectInvalid: ++c.object_invalid; break;
        case ValidityTag::ConstraintInvalid: ++c.const_invalid; break;
        case ValidityTag::RobotInvalid: break;
    }
}

void FoliatedRepMap::ingest_feedback(const Task& task, const PlannerFeedback& feedback) {
    if (!space_->contains(task.leaf)) throw ContractViolation("task leaf " + to_string(task.leaf) + " is not in the map");
    for (const auto& s : feedback.samples) ingest_sample(task.leaf, s.config, s.tag);
}

}  // namespace frm
