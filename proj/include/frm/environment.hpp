// Desk-scale analytic environments.
//
// The robot is a disc at the workspace position (q[x_axis], q[y_axis]). An
// optional carried object is a second disc attached at distance `length` in
// heading q[angle_axis] / angle_scale, so object collisions depend on the grasp. Obstacles
// are convex 2-D shapes in the workspace plane; each list collides only with
// its own body.

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "frm/core.hpp"
#include "frm/foliation.hpp"

namespace frm {

struct Box2 {
    Eigen::Vector2d min;
    Eigen::Vector2d max;
};

struct Disc2 {
    Eigen::Vector2d center;
    double radius = 0.0;
};

using Shape = std::variant<Box2, Disc2>;

/// Signed clearance between a disc and a shape (negative when overlapping).
double clearance(const Shape& shape, const Eigen::Vector2d& center, double radius);

struct RobotBody {
    int x_axis = 0;
    int y_axis = 1;
    double radius = 0.1;
};

struct ObjectModel {
    int angle_axis = 2;
    double length = 0.5;
    double radius = 0.2;
    /// Coordinate units per radian of heading.
    double angle_scale = 1.0;
};

class Environment {
public:
    Environment(Eigen::VectorXd lower, Eigen::VectorXd upper, RobotBody robot = {},
                std::optional<ObjectModel> object = std::nullopt, std::vector<Shape> robot_obstacles = {},
                std::vector<Shape> object_obstacles = {});

    [[nodiscard]] int dimension() const noexcept { return static_cast<int>(lower_.size()); }
    [[nodiscard]] const Eigen::VectorXd& lower() const noexcept { return lower_; }
    [[nodiscard]] const Eigen::VectorXd& upper() const noexcept { return upper_; }
    [[nodiscard]] const RobotBody& robot() const noexcept { return robot_; }
    [[nodiscard]] const std::optional<ObjectModel>& object() const noexcept { return object_; }
    [[nodiscard]] const std::vector<Shape>& robot_obstacles() const noexcept { return robot_obstacles_; }
    [[nodiscard]] const std::vector<Shape>& object_obstacles() const noexcept { return object_obstacles_; }

    [[nodiscard]] bool in_bounds(const Configuration& q) const;
    [[nodiscard]] Eigen::Vector2d robot_position(const Configuration& q) const;
    [[nodiscard]] std::optional<Eigen::Vector2d> object_position(const Configuration& q) const;

    /// Out of bounds or robot disc touching a robot obstacle.
    [[nodiscard]] bool robot_collides(const Configuration& q) const;
    /// Object disc touching an object obstacle or leaving the workspace rectangle.
    [[nodiscard]] bool object_collides(const Configuration& q) const;

    /// The same bounds and bodies without obstacles.
    [[nodiscard]] Environment without_obstacles() const;

private:
    Eigen::VectorXd lower_;
    Eigen::VectorXd upper_;
    RobotBody robot_;
    std::optional<ObjectModel> object_;
    std::vector<Shape> robot_obstacles_;
    std::vector<Shape> object_obstacles_;
};

/// Tag with precedence RobotInvalid > ObjectInvalid > ConstraintInvalid.
ValidityTag check_validity(const Configuration& q, const LeafId& leaf, const FoliatedSpace& space,
                           const Environment& env);

}  // namespace frm
