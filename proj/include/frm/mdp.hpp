// Value-iteration task planner with dead-end semantics.
//
// Taking edge (s, s') succeeds with probability p and moves to s'; otherwise
// the agent falls into an absorbing dead end and collects deadend_penalty.
// Entering the goal pays goal_reward and terminates.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "frm/graph.hpp"
#include "frm/repmap.hpp"

namespace frm {

struct MdpParams {
    double goal_reward = 1.0;
    double deadend_penalty = -1.0;
    double discount = 0.95;
    double vi_tolerance = 1e-6;
    int vi_max_iters = 10000;

    /// Throws ConfigError when any field is out of range.
    void validate() const;
};

struct NodeScores {
    double s_plus = 0.0;
    double s_minus = 0.0;
};

NodeScores compute_scores(const FoliatedRepMap& map, int node);

/// 0.5 when all four scores vanish, else (1 + s+_m + s+_n) / (1 + s+_m + s+_n + s-_m + s-_n).
double edge_probability(const NodeScores& m, const NodeScores& n);
double edge_probability(const FoliatedRepMap& map, int edge);
std::vector<double> edge_probabilities(const FoliatedRepMap& map);

struct ValueIterationResult {
    std::vector<double> values;
    /// Sup-norm change of each sweep.
    std::vector<double> residuals;
    bool converged = false;
};

/// Q(s, e) for taking edge e from s.
double action_value(const Topology& graph, int goal, std::span<const double> values,
                    std::span<const double> probabilities, int from, int edge, const MdpParams& params);

/// Synchronous sweeps until the sup-norm change drops below
/// vi_tolerance * (1 - gamma) / (2 gamma), guaranteeing a vi_tolerance-optimal
/// value function, or vi_max_iters sweeps.
ValueIterationResult value_iteration(const Topology& graph, int goal, std::span<const double> probabilities,
                                     const MdpParams& params);

/// Follows the greedy policy (higher action value, then lower node id, then
/// lower edge id). nullopt when the goal is unreachable or the policy cycles.
std::optional<Route> greedy_route(const Topology& graph, int start, int goal, std::span<const double> values,
                                  std::span<const double> probabilities, const MdpParams& params);

std::optional<Route> plan_route_mdp(const Topology& graph, int start, int goal, std::span<const double> probabilities,
                                    const MdpParams& params);

std::optional<Route> plan_sequence_mdp(const FoliatedRepMap& map, int start, int goal, const MdpParams& params);

/// Breadth-first reachability.
bool reachable(const Topology& graph, int start, int goal);

}  // namespace frm
