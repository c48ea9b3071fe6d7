// Undirected multigraph topology shared by the task planners.

#pragma once

#include <utility>
#include <vector>

namespace frm {

struct Topology {
    int node_count = 0;
    /// Endpoints of each edge; parallel edges allowed, self-loops are not.
    std::vector<std::pair<int, int>> edges;
    /// Per node: (neighbor, edge id), sorted by neighbor then edge id.
    std::vector<std::vector<std::pair<int, int>>> adjacency;

    static Topology from_edges(int node_count, std::vector<std::pair<int, int>> edges);
    [[nodiscard]] int other(int edge, int node) const;
};

/// A walk through the graph: nodes.size() == edges.size() + 1 and edge k
/// joins nodes k and k + 1.
struct Route {
    std::vector<int> nodes;
    std::vector<int> edges;

    friend bool operator==(const Route&, const Route&) = default;
};

}  // namespace frm
