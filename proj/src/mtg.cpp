#include "frm/mtg.hpp"

#include <cmath>
#include <limits>
#include <queue>

namespace frm {

void MtgParams::validate() const {
    if (!(v_minus > 0.0) || !(v_plus > v_minus) || !std::isfinite(v_plus))
        throw ConfigError("MTG penalties must satisfy 0 < v_minus < v_plus");
}

double compute_node_score(const FoliatedRepMap& map, int node, const MtgParams& params) {
    const LeafId leaf = map.node_leaf(node);
    const int j = map.node_distribution(node);
    const auto& fol = map.space().foliation(leaf.foliation);
    double score = map.robot_invalid(j) * params.v_plus;
    for (int t = 0; t < fol.size(); ++t) {
        const auto& c = map.counts(map.node_id(LeafId{leaf.foliation, t}, j));
        const double local = params.v_minus * static_cast<double>(c.valid) +
                             params.v_plus * static_cast<double>(c.object_invalid + c.const_invalid);
        score += fol.similarity(leaf.co_parameter, t) * local;
    }
    return score;
}

std::vector<double> compute_node_scores(const FoliatedRepMap& map, const MtgParams& params) {
    std::vector<double> scores(static_cast<std::size_t>(map.node_count()));
    for (int n = 0; n < map.node_count(); ++n) scores[static_cast<std::size_t>(n)] = compute_node_score(map, n, params);
    return scores;
}

double edge_weight(const FoliatedRepMap& map, int edge, const MtgParams& params) {
    const auto& e = map.edge(edge);
    return compute_node_score(map, e.a, params) + compute_node_score(map, e.b, params);
}

std::vector<double> edge_weights(const FoliatedRepMap& map, const MtgParams& params) {
    const auto scores = compute_node_scores(map, params);
    std::vector<double> w;
    w.reserve(map.edges().size());
    for (const auto& e : map.edges())
        w.push_back(scores[static_cast<std::size_t>(e.a)] + scores[static_cast<std::size_t>(e.b)]);
    return w;
}

double route_weight(const Route& route, std::span<const double> weights) {
    double total = 0.0;
    for (int e : route.edges) total += weights[static_cast<std::size_t>(e)];
    return total;
}

std::optional<Route> shortest_route(const Topology& graph, int start, int goal, std::span<const double> weights) {
    const int n = graph.node_count;
    if (start < 0 || start >= n || goal < 0 || goal >= n) throw ContractViolation("route endpoint out of range");
    if (weights.size() != graph.edges.size()) throw ContractViolation("one weight per edge is required");
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w)) throw ContractViolation("edge weights must be finite and non-negative");

    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto N = static_cast<std::size_t>(n);
    std::vector<double> dist(N, inf);
    std::vector<int> hops(N, 0), parent(N, -1), via(N, -1);
    std::vector<char> settled(N, 0);

    auto path_to = [&](int v) {
        std::vector<int> p;
        for (; v != -1; v = parent[static_cast<std::size_t>(v)]) p.push_back(v);
        return std::vector<int>(p.rbegin(), p.rend());
    };
    // Settled paths to x and y have equal hop counts, so walking both chains up
    // in step reaches the first differing pair just below where they merge.
    auto lex_less = [&](int x, int y) {
        while (parent[static_cast<std::size_t>(x)] != parent[static_cast<std::size_t>(y)]) {
            x = parent[static_cast<std::size_t>(x)];
            y = parent[static_cast<std::size_t>(y)];
        }
        return x < y;
    };

    // Heap keyed on (weight, hops) only: once popped, no later node can tie a
    // settled label, so lexicographic ties are resolved during relaxation.
    using Entry = std::tuple<double, int, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[static_cast<std::size_t>(start)] = 0.0;
    heap.emplace(0.0, 0, start);
    while (!heap.empty()) {
        const auto [d, h, u] = heap.top();
        heap.pop();
        const auto U = static_cast<std::size_t>(u);
        if (settled[U] || d != dist[U] || h != hops[U]) continue;
        settled[U] = 1;
        if (u == goal) break;
        for (const auto& [v, e] : graph.adjacency[U]) {
            const auto V = static_cast<std::size_t>(v);
            if (settled[V]) continue;
            const double nd = d + weights[static_cast<std::size_t>(e)];
            const int nh = h + 1;
            bool better = nd < dist[V] || (nd == dist[V] && nh < hops[V]);
            if (!better && nd == dist[V] && nh == hops[V] && parent[V] != u) better = lex_less(u, parent[V]);
            if (!better) continue;
            dist[V] = nd;
            hops[V] = nh;
            parent[V] = u;
            via[V] = e;
            heap.emplace(nd, nh, v);
        }
    }
    if (!settled[static_cast<std::size_t>(goal)]) return std::nullopt;
    Route route;
    route.nodes = path_to(goal);
    for (std::size_t k = 1; k < route.nodes.size(); ++k) route.edges.push_back(via[static_cast<std::size_t>(route.nodes[k])]);
    return route;
}

std::optional<Route> plan_sequence_mtg(const FoliatedRepMap& map, int start, int goal, const MtgParams& params) {
    params.validate();
    const auto w = edge_weights(map, params);
    return shortest_route(map.topology(), start, goal, w);
}

}  // namespace frm
