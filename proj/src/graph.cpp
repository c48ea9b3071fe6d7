#include "frm/graph.hpp"

#include <algorithm>

#include "frm/core.hpp"

namespace frm {

Topology Topology::from_edges(int node_count, std::vector<std::pair<int, int>> edges) {
    if (node_count < 0) throw ContractViolation("negative node count");
    Topology t;
    t.node_count = node_count;
    t.adjacency.resize(static_cast<std::size_t>(node_count));
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        if (a < 0 || b < 0 || a >= node_count || b >= node_count) throw ContractViolation("edge endpoint out of range");
        if (a == b) throw ContractViolation("self-loop edges are not allowed");
        t.adjacency[static_cast<std::size_t>(a)].emplace_back(b, static_cast<int>(e));
        t.adjacency[static_cast<std::size_t>(b)].emplace_back(a, static_cast<int>(e));
    }
    for (auto& adj : t.adjacency) std::sort(adj.begin(), adj.end());
    t.edges = std::move(edges);
    return t;
}

int Topology::other(int edge, int node) const {
    const auto [a, b] = edges.at(static_cast<std::size_t>(edge));
    if (node == a) return b;
    if (node == b) return a;
    throw ContractViolation("node is not an endpoint of edge " + std::to_string(edge));
}

}  // namespace frm
