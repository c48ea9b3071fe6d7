// Foliations, their leaves and the constraint machinery used to stay on them.
//
// A foliation i is a constraint function F_i together with a finite set of
// co-parameters theta; the leaf M_{i,theta} is {q : F_i(q) = theta}. Leaves of
// one foliation are disjoint, so switching leaves is only possible at an
// intersection with a leaf of another foliation.

#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "frm/core.hpp"

namespace frm {

/// F(q) = q[axis].
struct CoordinateConstraint {
    int axis = 0;
};

/// F(q) = || q[axes] - center ||_2.
struct RadialConstraint {
    std::vector<int> axes;
    Eigen::VectorXd center;
};

/// Position of a point rigidly attached to the robot at distance `length` in
/// heading h = q[angle_axis] / angle_scale: F(q) = (q[x] + L cos h, q[y] + L sin h).
/// Used for "object resting at a placement" leaves.
struct AttachedPointConstraint {
    int x_axis = 0;
    int y_axis = 1;
    int angle_axis = 2;
    double length = 0.5;
    /// Coordinate units per radian of heading.
    double angle_scale = 1.0;
};

using ConstraintKind = std::variant<CoordinateConstraint, RadialConstraint, AttachedPointConstraint>;

class ConstraintFamily {
public:
    ConstraintFamily(ConstraintKind kind, double tolerance);

    [[nodiscard]] const ConstraintKind& kind() const noexcept { return kind_; }
    [[nodiscard]] double tolerance() const noexcept { return tolerance_; }
    [[nodiscard]] int codimension() const;
    /// Largest axis index the constraint reads.
    [[nodiscard]] int max_axis() const;

    [[nodiscard]] Eigen::VectorXd value(const Configuration& q) const;
    [[nodiscard]] Eigen::MatrixXd jacobian(const Configuration& q) const;

private:
    ConstraintKind kind_;
    double tolerance_;
};

struct CoParameter {
    std::string label;
    Eigen::VectorXd value;
};

struct ProjectionOptions {
    int max_iters = 50;
    double max_step = 1.0;
    /// Projections displacing the input farther than this fail.
    double max_distance = std::numeric_limits<double>::infinity();
};

class Foliation {
public:
    /// `bandwidth` <= 0 selects the median pairwise co-parameter distance.
    Foliation(std::string name, ConstraintFamily constraint, std::vector<CoParameter> co_params,
              double bandwidth = 0.0);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const ConstraintFamily& constraint() const noexcept { return constraint_; }
    [[nodiscard]] const std::vector<CoParameter>& co_parameters() const noexcept { return co_params_; }
    [[nodiscard]] int size() const noexcept { return static_cast<int>(co_params_.size()); }
    [[nodiscard]] double bandwidth() const noexcept { return bandwidth_; }

    /// exp(-|theta_a - theta_b|^2 / sigma^2), precomputed.
    [[nodiscard]] double similarity(int a, int b) const { return similarity_(a, b); }
    [[nodiscard]] const Eigen::MatrixXd& similarity_matrix() const noexcept { return similarity_; }

private:
    std::string name_;
    ConstraintFamily constraint_;
    std::vector<CoParameter> co_params_;
    double bandwidth_;
    Eigen::MatrixXd similarity_;
};

/// Squared-exponential kernel on co-parameter values, clamped to [0, 1].
double similarity_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double bandwidth);

/// Median of pairwise Euclidean distances; 1.0 when fewer than two values.
double median_pairwise_distance(const std::vector<CoParameter>& co_params);

struct IntersectionWitness {
    LeafId leaf_a;
    LeafId leaf_b;
    Configuration config;
};

/// The ambient space together with all declared foliations.
class FoliatedSpace {
public:
    FoliatedSpace(int dimension, std::vector<Foliation> foliations);

    [[nodiscard]] int dimension() const noexcept { return dimension_; }
    [[nodiscard]] const std::vector<Foliation>& foliations() const noexcept { return foliations_; }
    [[nodiscard]] const Foliation& foliation(int i) const;

    /// Leaves in (foliation, co-parameter) lexicographic order.
    [[nodiscard]] const std::vector<LeafId>& leaves() const noexcept { return leaves_; }
    [[nodiscard]] int leaf_index(const LeafId& leaf) const;
    [[nodiscard]] bool contains(const LeafId& leaf) const noexcept;

    [[nodiscard]] double tolerance(const LeafId& leaf) const;
    [[nodiscard]] double similarity(int foliation, int a, int b) const;

    /// F(q) - theta for the leaf.
    [[nodiscard]] Eigen::VectorXd residual(const Configuration& q, const LeafId& leaf) const;

    /// || F(q) - theta ||_inf. Throws ContractViolation on dimension mismatch.
    [[nodiscard]] double evaluate_constraint(const Configuration& q, const LeafId& leaf) const;

    [[nodiscard]] bool on_leaf(const Configuration& q, const LeafId& leaf) const;

    /// Damped Newton (minimum-norm Gauss-Newton step, clipped to max_step).
    /// Returns q unchanged when it is already within tolerance; nullopt when the
    /// iteration does not converge or the Jacobian is singular.
    [[nodiscard]] std::optional<Configuration> project(const Configuration& q, const LeafId& leaf,
                                                       const ProjectionOptions& options = {}) const;

    /// Checks foliation distinctness, dimensions and on-leaf residuals.
    void validate_witness(const IntersectionWitness& w) const;

private:
    void check_dimension(const Configuration& q) const;

    int dimension_;
    std::vector<Foliation> foliations_;
    std::vector<LeafId> leaves_;
    std::vector<int> leaf_offset_;
};

}  // namespace frm
