// FoliatedRepMap: the base roadmap replicated into every leaf, stitched at
// intersection witnesses, carrying per-node experience counts.
//
// Node n_{i,theta,j} has id leaf_index(i, theta) * K + j where K is the number
// of base components. Robot-invalid counts are indexed by j alone and shared by
// every leaf of every foliation.

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "frm/atlas.hpp"
#include "frm/foliation.hpp"
#include "frm/gmm.hpp"
#include "frm/graph.hpp"

namespace frm {

struct Problem;

enum class EdgeKind : std::uint8_t { IntraLeaf, Intersection };

struct RepMapEdge {
    int a = 0;
    int b = 0;
    EdgeKind kind = EdgeKind::IntraLeaf;
    /// Index into the map's witness list for intersection edges, else -1.
    int witness = -1;
};

struct NodeCounts {
    std::uint64_t valid = 0;
    std::uint64_t object_invalid = 0;
    std::uint64_t const_invalid = 0;

    friend bool operator==(const NodeCounts&, const NodeCounts&) = default;
};

struct TaggedSample {
    Configuration config;
    ValidityTag tag = ValidityTag::Valid;
};

struct PlannerFeedback {
    bool success = false;
    std::vector<TaggedSample> samples;
    std::optional<Trajectory> path;
    double path_length = 0.0;
};

struct Task {
    LeafId leaf;
    Configuration start_config;
    Configuration goal_config;
    std::vector<GaussianComponent> distribution_list;
    /// Map nodes of the section, in path order.
    std::vector<int> nodes;
};

/// Everything that changes while a query runs; the rest of the map is fixed.
struct MapState {
    std::vector<NodeCounts> nodes;
    std::vector<std::uint64_t> robot_invalid;
    std::vector<double> robot_invalid_prior;
    std::uint64_t samples_ingested = 0;

    friend bool operator==(const MapState&, const MapState&) = default;
};

class FoliatedRepMap {
public:
    /// Throws LoadError for witnesses outside `bounds` or on undeclared leaves.
    static FoliatedRepMap instantiate(const BaseRoadmap& base, std::shared_ptr<const FoliatedSpace> space,
                                      const std::vector<IntersectionWitness>& witnesses,
                                      const Environment& bounds);
    static FoliatedRepMap instantiate(const BaseRoadmap& base, const Problem& problem);

    [[nodiscard]] const FoliatedSpace& space() const noexcept { return *space_; }
    [[nodiscard]] const GaussianMixture& mixture() const noexcept { return *mixture_; }
    [[nodiscard]] int distributions() const noexcept { return mixture_->size(); }
    [[nodiscard]] int node_count() const noexcept { return topology_->node_count; }
    [[nodiscard]] int edge_count() const noexcept { return static_cast<int>(edges_->size()); }

    [[nodiscard]] int node_id(const LeafId& leaf, int j) const;
    [[nodiscard]] LeafId node_leaf(int node) const;
    [[nodiscard]] int node_distribution(int node) const;

    [[nodiscard]] const std::vector<RepMapEdge>& edges() const noexcept { return *edges_; }
    [[nodiscard]] const RepMapEdge& edge(int e) const;
    [[nodiscard]] const Topology& topology() const noexcept { return *topology_; }
    [[nodiscard]] const std::vector<IntersectionWitness>& witnesses() const noexcept { return *witnesses_; }

    [[nodiscard]] const NodeCounts& counts(int node) const;
    /// Ingested robot-invalid count plus any initialization prior.
    [[nodiscard]] double robot_invalid(int j) const;
    [[nodiscard]] std::uint64_t robot_invalid_count(int j) const;
    [[nodiscard]] std::uint64_t samples_ingested() const noexcept { return state_.samples_ingested; }
    /// Sum of every ingested count (priors excluded).
    [[nodiscard]] std::uint64_t count_mass() const;
    [[nodiscard]] bool counts_are_zero() const;

    [[nodiscard]] const MapState& state() const noexcept { return state_; }
    /// Throws LoadError when the state's shape does not match the map.
    void restore(MapState state);
    void reset_counts();
    void set_robot_invalid_prior(int j, double value);

    /// Throws QueryRejected when a configuration is off its leaf.
    [[nodiscard]] std::pair<int, int> attach_start_goal(const Configuration& q_start, const LeafId& leaf_start,
                                                        const Configuration& q_goal, const LeafId& leaf_goal) const;

    /// Throws ContractViolation when the route is not a walk through the map.
    [[nodiscard]] std::vector<Task> split_into_tasks(const Route& route, const Configuration& q_start,
                                                     const Configuration& q_goal) const;

    /// Lowest-id edge joining each consecutive pair of nodes.
    [[nodiscard]] Route route_from_nodes(const std::vector<int>& nodes) const;

    void ingest_sample(const LeafId& leaf, const Configuration& q, ValidityTag tag);
    void ingest_feedback(const Task& task, const PlannerFeedback& feedback);

private:
    FoliatedRepMap() = default;

    std::shared_ptr<const FoliatedSpace> space_;
    std::shared_ptr<const GaussianMixture> mixture_;
    std::shared_ptr<const std::vector<RepMapEdge>> edges_;
    std::shared_ptr<const Topology> topology_;
    std::shared_ptr<const std::vector<IntersectionWitness>> witnesses_;
    MapState state_;
};

}  // namespace frm
