// Base repetition roadmap for the constraint-free ambient space:
// trajectory dataset -> GMM -> distribution graph.

#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "frm/environment.hpp"
#include "frm/gmm.hpp"

namespace frm {

using Trajectory = std::vector<Configuration>;

struct TrajectoryDataset {
    std::vector<Trajectory> trajectories;

    [[nodiscard]] std::size_t waypoint_count() const;
    /// All waypoints stacked as rows.
    [[nodiscard]] Eigen::MatrixXd waypoint_matrix() const;
};

struct DatasetConfig {
    int n_pairs = 200;
    std::uint64_t seed = 1;
    double step_size = 0.5;
    int max_iterations = 3000;
    /// Iterations RRT* keeps refining after the first solution.
    int refine_iterations = 150;
    double goal_bias = 0.1;
    double rewire_radius = 1.2;
    int shortcut_attempts = 50;
    /// Spacing of the densified output waypoints.
    double waypoint_spacing = 0.25;
    int max_retries = 20;
};

/// Shortcut-smoothed RRT* solutions between uniformly sampled valid pairs.
/// Validity is robot-collision freedom in `env_free`.
TrajectoryDataset generate_dataset(const Environment& env_free, const DatasetConfig& config);

struct BaseRoadmap {
    std::vector<GaussianComponent> components;
    /// Unordered pairs stored as (low, high), sorted.
    std::vector<std::pair<int, int>> edges;
    /// Index of each component in the mixture the roadmap was built from.
    std::vector<int> source_ids;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(components.size()); }
    [[nodiscard]] int dimension() const noexcept {
        return components.empty() ? 0 : static_cast<int>(components.front().mean.size());
    }
};

/// Distribution sequence of a trajectory with consecutive repeats collapsed.
std::vector<int> distribution_sequence(const Trajectory& trajectory, const GaussianMixture& mixture);

/// Number of distinct trajectories voting for each unordered adjacent pair.
std::map<std::pair<int, int>, int> count_transition_votes(const TrajectoryDataset& dataset,
                                                          const GaussianMixture& mixture);

/// Edges with at least tau_edge votes; the result is restricted to its largest
/// connected component (isolated components pruned), with ids renumbered
/// densely in original order and weights renormalized.
BaseRoadmap build_base_roadmap(const TrajectoryDataset& dataset, const std::vector<GaussianComponent>& components,
                               int tau_edge);

struct AtlasConfig {
    DatasetConfig dataset;
    ClusteringConfig clustering{.k_min = 32, .k_max = 64, .k_step = 16, .max_iters = 150, .restarts = 1};
    int tau_edge = 2;
};

struct Atlas {
    TrajectoryDataset dataset;
    GmmFit fit;
    BaseRoadmap roadmap;
};

Atlas build_atlas(const Environment& env_free, const AtlasConfig& config);

}  // namespace frm
