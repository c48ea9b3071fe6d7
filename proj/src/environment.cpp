#include "frm/environment.hpp"

#include <algorithm>
#include <cmath>

namespace frm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool shape_inside(const Shape& s, const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
    constexpr double slack = 1e-9;
    return std::visit(Overloaded{
                          [&](const Box2& b) {
                              return (b.min.array() >= lo.array() - slack).all() &&
                                     (b.max.array() <= hi.array() + slack).all() && (b.min.array() <= b.max.array()).all();
                          },
                          [&](const Disc2& d) {
                              return d.radius > 0.0 && (d.center.array() - d.radius >= lo.array() - slack).all() &&
                                     (d.center.array() + d.radius <= hi.array() + slack).all();
                          },
                      },
                      s);
}

}  // namespace

double clearance(const Shape& shape, const Eigen::Vector2d& center, double radius) {
    return std::visit(Overloaded{
                          [&](const Box2& b) {
                              const Eigen::Vector2d closest = center.cwiseMax(b.min).cwiseMin(b.max);
                              const Eigen::Vector2d d = center - closest;
                              if (d.squaredNorm() > 0.0) return d.norm() - radius;
                              // Inside the box: negative depth to the nearest face.
                              const double depth = std::min({center.x() - b.min.x(), b.max.x() - center.x(),
                                                             center.y() - b.min.y(), b.max.y() - center.y()});
                              return -depth - radius;
                          },
                          [&](const Disc2& d) { return (center - d.center).norm() - d.radius - radius; },
                      },
                      shape);
}

Environment::Environment(Eigen::VectorXd lower, Eigen::VectorXd upper, RobotBody robot,
                         std::optional<ObjectModel> object, std::vector<Shape> robot_obstacles,
                         std::vector<Shape> object_obstacles)
    : lower_(std::move(lower)),
      upper_(std::move(upper)),
      robot_(robot),
      object_(object),
      robot_obstacles_(std::move(robot_obstacles)),
      object_obstacles_(std::move(object_obstacles)) {
    if (lower_.size() != upper_.size() || lower_.size() < 2) throw ConfigError("bounds must have matching size >= 2");
    if (!(lower_.array() < upper_.array()).all()) throw ConfigError("bounds are degenerate");
    const int d = dimension();
    if (robot_.x_axis < 0 || robot_.x_axis >= d || robot_.y_axis < 0 || robot_.y_axis >= d)
        throw ConfigError("robot position axes out of range");
    if (robot_.radius < 0.0) throw ConfigError("robot radius must be non-negative");
    if (object_) {
        if (object_->angle_axis < 0 || object_->angle_axis >= d) throw ConfigError("object angle axis out of range");
        if (object_->radius < 0.0 || object_->length < 0.0) throw ConfigError("object geometry must be non-negative");
        if (!(object_->angle_scale > 0.0)) throw ConfigError("object angle scale must be positive");
    }
    const Eigen::Vector2d lo(lower_[robot_.x_axis], lower_[robot_.y_axis]);
    const Eigen::Vector2d hi(upper_[robot_.x_axis], upper_[robot_.y_axis]);
    for (const auto* list : {&robot_obstacles_, &object_obstacles_})
        for (const auto& s : *list)
            if (!shape_inside(s, lo, hi)) throw ConfigError("obstacle lies outside the workspace bounds");
}

bool Environment::in_bounds(const Configuration& q) const {
    return q.size() == lower_.size() && (q.array() >= lower_.array()).all() && (q.array() <= upper_.array()).all();
}

Eigen::Vector2d Environment::robot_position(const Configuration& q) const {
    return {q[robot_.x_axis], q[robot_.y_axis]};
}

std::optional<Eigen::Vector2d> Environment::object_position(const Configuration& q) const {
    if (!object_) return std::nullopt;
    const double a = q[object_->angle_axis] / object_->angle_scale;
    return robot_position(q) + object_->length * Eigen::Vector2d(std::cos(a), std::sin(a));
}

bool Environment::robot_collides(const Configuration& q) const {
    if (!in_bounds(q)) return true;
    const auto p = robot_position(q);
    return std::any_of(robot_obstacles_.begin(), robot_obstacles_.end(),
                       [&](const Shape& s) { return clearance(s, p, robot_.radius) <= 0.0; });
}

bool Environment::object_collides(const Configuration& q) const {
    const auto c = object_position(q);
    if (!c) return false;
    const double r = object_->radius;
    const Eigen::Vector2d lo(lower_[robot_.x_axis], lower_[robot_.y_axis]);
    const Eigen::Vector2d hi(upper_[robot_.x_axis], upper_[robot_.y_axis]);
    if ((c->array() - r < lo.array()).any() || (c->array() + r > hi.array()).any()) return true;
    return std::any_of(object_obstacles_.begin(), object_obstacles_.end(),
                       [&](const Shape& s) { return clearance(s, *c, r) <= 0.0; });
}

Environment Environment::without_obstacles() const { return Environment(lower_, upper_, robot_, object_); }

ValidityTag check_validity(const Configuration& q, const LeafId& leaf, const FoliatedSpace& space,
                           const Environment& env) {
    if (q.size() != env.dimension()) throw ContractViolation("configuration dimension does not match environment");
    if (!q.allFinite() || env.robot_collides(q)) return ValidityTag::RobotInvalid;
    if (env.object_collides(q)) return ValidityTag::ObjectInvalid;
    if (!space.on_leaf(q, leaf)) return ValidityTag::ConstraintInvalid;
    return ValidityTag::Valid;
}

}  // namespace frm
