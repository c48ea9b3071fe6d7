// Weighted-shortest-path task planner over a FoliatedRepMap.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "frm/graph.hpp"
#include "frm/repmap.hpp"

namespace frm {

struct MtgParams {
    double v_minus = 1.0;
    double v_plus = 50.0;

    /// Throws ConfigError unless 0 < v_minus < v_plus.
    void validate() const;
};

/// C_robot^j v+ + sum_theta' S(theta, theta') [v- C_valid + v+ (C_object + C_const)].
double compute_node_score(const FoliatedRepMap& map, int node, const MtgParams& params);
std::vector<double> compute_node_scores(const FoliatedRepMap& map, const MtgParams& params);

double edge_weight(const FoliatedRepMap& map, int edge, const MtgParams& params);
std::vector<double> edge_weights(const FoliatedRepMap& map, const MtgParams& params);

/// Dijkstra over non-negative weights. Ties: lower total weight, then fewer
/// edges, then lexicographically smaller node sequence.
std::optional<Route> shortest_route(const Topology& graph, int start, int goal, std::span<const double> weights);

/// Total weight of a route, summed in path order.
double route_weight(const Route& route, std::span<const double> weights);

std::optional<Route> plan_sequence_mtg(const FoliatedRepMap& map, int start, int goal, const MtgParams& params);

}  // namespace frm
