#include "frm/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace frm {

void MdpParams::validate() const {
    if (!(goal_reward > 0.0) || !std::isfinite(goal_reward)) throw ConfigError("goal_reward must be positive");
    if (!(deadend_penalty < 0.0) || !std::isfinite(deadend_penalty)) throw ConfigError("deadend_penalty must be negative");
    if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("discount must lie in (0, 1)");
    if (!(vi_tolerance > 0.0)) throw ConfigError("vi_tolerance must be positive");
    if (vi_max_iters < 1) throw ConfigError("vi_max_iters must be at least 1");
}

NodeScores compute_scores(const FoliatedRepMap& map, int node) {
    const LeafId leaf = map.node_leaf(node);
    const int j = map.node_distribution(node);
    const auto& fol = map.space().foliation(leaf.foliation);
    NodeScores s;
    s.s_minus = map.robot_invalid(j);
    for (int t = 0; t < fol.size(); ++t) {
        const auto& c = map.counts(map.node_id(LeafId{leaf.foliation, t}, j));
        const double sim = fol.similarity(leaf.co_parameter, t);
        s.s_plus += sim * static_cast<double>(c.valid);
        s.s_minus += sim * static_cast<double>(c.object_invalid + c.const_invalid);
    }
    return s;
}

double edge_probability(const NodeScores& m, const NodeScores& n) {
    const double plus = m.s_plus + n.s_plus;
    const double total = plus + m.s_minus + n.s_minus;
    if (total == 0.0) return 0.5;
    return (1.0 + plus) / (1.0 + total);
}

double edge_probability(const FoliatedRepMap& map, int edge) {
    const auto& e = map.edge(edge);
    return edge_probability(compute_scores(map, e.a), compute_scores(map, e.b));
}

std::vector<double> edge_probabilities(const FoliatedRepMap& map) {
    std::vector<NodeScores> scores;
    scores.reserve(static_cast<std::size_t>(map.node_count()));
    for (int n = 0; n < map.node_count(); ++n) scores.push_back(compute_scores(map, n));
    std::vector<double> p;
    p.reserve(map.edges().size());
    for (const auto& e : map.edges())
        p.push_back(edge_probability(scores[static_cast<std::size_t>(e.a)], scores[static_cast<std::size_t>(e.b)]));
    return p;
}

double action_value(const Topology& graph, int goal, std::span<const double> values,
                    std::span<const double> probabilities, int from, int edge, const MdpParams& params) {
    const int to = graph.other(edge, from);
    const double p = probabilities[static_cast<std::size_t>(edge)];
    const double next = to == goal ? params.goal_reward : params.discount * values[static_cast<std::size_t>(to)];
    return p * next + (1.0 - p) * params.deadend_penalty;
}

namespace {

void check_inputs(const Topology& graph, int goal, std::span<const double> probabilities) {
    if (goal < 0 || goal >= graph.node_count) throw ContractViolation("goal node out of range");
    if (probabilities.size() != graph.edges.size()) throw ContractViolation("one probability per edge is required");
    for (double p : probabilities)
        if (!(p > 0.0 && p <= 1.0)) throw ContractViolation("edge probabilities must lie in (0, 1]");
}

}  // namespace

ValueIterationResult value_iteration(const Topology& graph, int goal, std::span<const double> probabilities,
                                     const MdpParams& params) {
    params.validate();
    check_inputs(graph, goal, probabilities);
    const auto n = static_cast<std::size_t>(graph.node_count);
    const double threshold = params.vi_tolerance * (1.0 - params.discount) / (2.0 * params.discount);
    ValueIterationResult r;
    r.values.assign(n, 0.0);
    std::vector<double> next(n, 0.0);
    for (int sweep = 0; sweep < params.vi_max_iters; ++sweep) {
        double delta = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const auto& adj = graph.adjacency[s];
            if (static_cast<int>(s) == goal || adj.empty()) {
                next[s] = 0.0;
                continue;
            }
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& [to, e] : adj)
                best = std::max(best, action_value(graph, goal, r.values, probabilities, static_cast<int>(s), e, params));
            next[s] = best;
            delta = std::max(delta, std::abs(best - r.values[s]));
        }
        r.values.swap(next);
        r.residuals.push_back(delta);
        if (delta < threshold) {
            r.converged = true;
            break;
        }
    }
    return r;
}

bool reachable(const Topology& graph, int start, int goal) {
    std::vector<char> seen(static_cast<std::size_t>(graph.node_count), 0);
    std::deque<int> queue{start};
    seen[static_cast<std::size_t>(start)] = 1;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        if (u == goal) return true;
        for (const auto& [v, e] : graph.adjacency[static_cast<std::size_t>(u)])
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                queue.push_back(v);
            }
    }
    return false;
}

std::optional<Route> greedy_route(const Topology& graph, int start, int goal, std::span<const double> values,
                                  std::span<const double> probabilities, const MdpParams& params) {
    check_inputs(graph, goal, probabilities);
    if (start < 0 || start >= graph.node_count) throw ContractViolation("start node out of range");
    if (!reachable(graph, start, goal)) return std::nullopt;
    Route route{{start}, {}};
    std::vector<char> visited(static_cast<std::size_t>(graph.node_count), 0);
    visited[static_cast<std::size_t>(start)] = 1;
    int s = start;
    while (s != goal) {
        int best_edge = -1, best_to = -1;
        double best_q = 0.0;
        // Adjacency is sorted by (neighbor, edge), so strict improvement keeps
        // the lowest node id and edge id among equal action values.
        for (const auto& [to, e] : graph.adjacency[static_cast<std::size_t>(s)]) {
            const double q = action_value(graph, goal, values, probabilities, s, e, params);
            if (best_edge == -1 || q > best_q) {
                best_q = q;
                best_edge = e;
                best_to = to;
            }
        }
        if (best_edge == -1 || visited[static_cast<std::size_t>(best_to)]) return std::nullopt;
        visited[static_cast<std::size_t>(best_to)] = 1;
        route.nodes.push_back(best_to);
        route.edges.push_back(best_edge);
        s = best_to;
    }
    return route;
}

std::optional<Route> plan_route_mdp(const Topology& graph, int start, int goal, std::span<const double> probabilities,
                                    const MdpParams& params) {
    if (start == goal) return Route{{start}, {}};
    const auto vi = value_iteration(graph, goal, probabilities, params);
    return greedy_route(graph, start, goal, vi.values, probabilities, params);
}

std::optional<Route> plan_sequence_mdp(const FoliatedRepMap& map, int start, int goal, const MdpParams& params) {
    const auto p = edge_probabilities(map);
    return plan_route_mdp(map.topology(), start, goal, p, params);
}

}  // namespace frm
