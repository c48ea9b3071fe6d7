#include "frm/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace frm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

ConstraintFamily::ConstraintFamily(ConstraintKind kind, double tolerance)
    : kind_(std::move(kind)), tolerance_(tolerance) {
    if (!(tolerance_ > 0.0)) throw ConfigError("constraint tolerance must be positive");
    std::visit(Overloaded{
                   [](const CoordinateConstraint& c) {
                       if (c.axis < 0) throw ConfigError("coordinate constraint axis must be >= 0");
                   },
                   [](const RadialConstraint& c) {
                       if (c.axes.empty() || static_cast<Eigen::Index>(c.axes.size()) != c.center.size())
                           throw ConfigError("radial constraint needs matching axes and center");
                   },
                   [](const AttachedPointConstraint& c) {
                       if (!(c.length > 0.0)) throw ConfigError("attached point length must be positive");
                       if (!(c.angle_scale > 0.0)) throw ConfigError("attached point angle scale must be positive");
                   },
               },
               kind_);
}

int ConstraintFamily::codimension() const {
    return std::visit(Overloaded{
                          [](const CoordinateConstraint&) { return 1; },
                          [](const RadialConstraint&) { return 1; },
                          [](const AttachedPointConstraint&) { return 2; },
                      },
                      kind_);
}

int ConstraintFamily::max_axis() const {
    return std::visit(Overloaded{
                          [](const CoordinateConstraint& c) { return c.axis; },
                          [](const RadialConstraint& c) { return *std::max_element(c.axes.begin(), c.axes.end()); },
                          [](const AttachedPointConstraint& c) {
                              return std::max({c.x_axis, c.y_axis, c.angle_axis});
                          },
                      },
                      kind_);
}

Eigen::VectorXd ConstraintFamily::value(const Configuration& q) const {
    return std::visit(Overloaded{
                          [&](const CoordinateConstraint& c) {
                              Eigen::VectorXd f(1);
                              f[0] = q[c.axis];
                              return f;
                          },
                          [&](const RadialConstraint& c) {
                              double sq = 0.0;
                              for (std::size_t k = 0; k < c.axes.size(); ++k) {
                                  const double d = q[c.axes[k]] - c.center[static_cast<Eigen::Index>(k)];
                                  sq += d * d;
                              }
                              Eigen::VectorXd f(1);
                              f[0] = std::sqrt(sq);
                              return f;
                          },
                          [&](const AttachedPointConstraint& c) {
                              Eigen::VectorXd f(2);
                              const double a = q[c.angle_axis] / c.angle_scale;
                              f[0] = q[c.x_axis] + c.length * std::cos(a);
                              f[1] = q[c.y_axis] + c.length * std::sin(a);
                              return f;
                          },
                      },
                      kind_);
}

Eigen::MatrixXd ConstraintFamily::jacobian(const Configuration& q) const {
    const auto n = q.size();
    return std::visit(Overloaded{
                          [&](const CoordinateConstraint& c) {
                              Eigen::MatrixXd J = Eigen::MatrixXd::Zero(1, n);
                              J(0, c.axis) = 1.0;
                              return J;
                          },
                          [&](const RadialConstraint& c) {
                              Eigen::MatrixXd J = Eigen::MatrixXd::Zero(1, n);
                              const double r = value(q)[0];
                              if (r > 0.0) {
                                  for (std::size_t k = 0; k < c.axes.size(); ++k)
                                      J(0, c.axes[k]) = (q[c.axes[k]] - c.center[static_cast<Eigen::Index>(k)]) / r;
                              }
                              return J;
                          },
                          [&](const AttachedPointConstraint& c) {
                              Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, n);
                              const double a = q[c.angle_axis] / c.angle_scale;
                              J(0, c.x_axis) = 1.0;
                              J(1, c.y_axis) = 1.0;
                              J(0, c.angle_axis) = -c.length * std::sin(a) / c.angle_scale;
                              J(1, c.angle_axis) = c.length * std::cos(a) / c.angle_scale;
                              return J;
                          },
                      },
                      kind_);
}

double similarity_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double bandwidth) {
    const double d2 = (a - b).squaredNorm();
    return std::clamp(std::exp(-d2 / (bandwidth * bandwidth)), 0.0, 1.0);
}

double median_pairwise_distance(const std::vector<CoParameter>& co_params) {
    std::vector<double> d;
    for (std::size_t a = 0; a < co_params.size(); ++a)
        for (std::size_t b = a + 1; b < co_params.size(); ++b)
            d.push_back((co_params[a].value - co_params[b].value).norm());
    if (d.empty()) return 1.0;
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    if (d.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(d.begin(), mid);
    return 0.5 * (lower + upper);
}

Foliation::Foliation(std::string name, ConstraintFamily constraint, std::vector<CoParameter> co_params,
                     double bandwidth)
    : name_(std::move(name)), constraint_(std::move(constraint)), co_params_(std::move(co_params)) {
    if (co_params_.empty()) throw ConfigError("foliation '" + name_ + "' has no co-parameters");
    const auto codim = constraint_.codimension();
    for (std::size_t a = 0; a < co_params_.size(); ++a) {
        const auto& v = co_params_[a].value;
        if (v.size() != codim)
            throw ConfigError("co-parameter '" + co_params_[a].label + "' of foliation '" + name_ +
                              "' has wrong size");
        if (!v.allFinite())
            throw ConfigError("co-parameter '" + co_params_[a].label + "' has non-finite entries");
        for (std::size_t b = 0; b < a; ++b)
            if (co_params_[b].value == v)
                throw ConfigError("duplicate co-parameter in foliation '" + name_ + "'");
    }
    bandwidth_ = bandwidth > 0.0 ? bandwidth : median_pairwise_distance(co_params_);
    if (!(bandwidth_ > 0.0)) bandwidth_ = 1.0;

    const auto n = static_cast<Eigen::Index>(co_params_.size());
    similarity_.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        similarity_(a, a) = 1.0;
        for (Eigen::Index b = 0; b < a; ++b) {
            const double s = similarity_kernel(co_params_[a].value, co_params_[b].value, bandwidth_);
            similarity_(a, b) = s;
            similarity_(b, a) = s;
        }
    }
}

FoliatedSpace::FoliatedSpace(int dimension, std::vector<Foliation> foliations)
    : dimension_(dimension), foliations_(std::move(foliations)) {
    if (dimension_ < 2) throw ConfigError("ambient dimension must be >= 2");
    int offset = 0;
    for (int i = 0; i < static_cast<int>(foliations_.size()); ++i) {
        const auto& f = foliations_[i];
        if (f.constraint().max_axis() >= dimension_)
            throw ConfigError("foliation '" + f.name() + "' reads an axis beyond the ambient dimension");
        leaf_offset_.push_back(offset);
        for (int c = 0; c < f.size(); ++c) leaves_.push_back({i, c});
        offset += f.size();
    }
}

const Foliation& FoliatedSpace::foliation(int i) const {
    if (i < 0 || i >= static_cast<int>(foliations_.size()))
        throw ContractViolation("unknown foliation " + std::to_string(i));
    return foliations_[i];
}

bool FoliatedSpace::contains(const LeafId& leaf) const noexcept {
    return leaf.foliation >= 0 && leaf.foliation < static_cast<int>(foliations_.size()) &&
           leaf.co_parameter >= 0 && leaf.co_parameter < foliations_[leaf.foliation].size();
}

int FoliatedSpace::leaf_index(const LeafId& leaf) const {
    if (!contains(leaf)) throw ContractViolation("unknown leaf " + to_string(leaf));
    return leaf_offset_[leaf.foliation] + leaf.co_parameter;
}

double FoliatedSpace::tolerance(const LeafId& leaf) const {
    return foliation(leaf.foliation).constraint().tolerance();
}

double FoliatedSpace::similarity(int foliation_index, int a, int b) const {
    return foliation(foliation_index).similarity(a, b);
}

void FoliatedSpace::check_dimension(const Configuration& q) const {
    if (q.size() != dimension_)
        throw ContractViolation("configuration has dimension " + std::to_string(q.size()) + ", expected " +
                                std::to_string(dimension_));
}

Eigen::VectorXd FoliatedSpace::residual(const Configuration& q, const LeafId& leaf) const {
    check_dimension(q);
    if (!contains(leaf)) throw ContractViolation("unknown leaf " + to_string(leaf));
    const auto& f = foliations_[leaf.foliation];
    return f.constraint().value(q) - f.co_parameters()[leaf.co_parameter].value;
}

double FoliatedSpace::evaluate_constraint(const Configuration& q, const LeafId& leaf) const {
    const auto r = residual(q, leaf);
    if (!r.allFinite()) return std::numeric_limits<double>::infinity();
    return r.lpNorm<Eigen::Infinity>();
}

bool FoliatedSpace::on_leaf(const Configuration& q, const LeafId& leaf) const {
    return evaluate_constraint(q, leaf) <= tolerance(leaf);
}

std::optional<Configuration> FoliatedSpace::project(const Configuration& q, const LeafId& leaf,
                                                    const ProjectionOptions& options) const {
    if (options.max_iters < 1) throw ContractViolation("projection needs max_iters >= 1");
    if (!(options.max_distance > 0.0)) throw ContractViolation("projection needs max_distance > 0");
    check_dimension(q);
    const auto& constraint = foliation(leaf.foliation).constraint();
    const double tol = constraint.tolerance();
    // Converge well inside the tolerance so rechecks never sit on the boundary.
    const double target = 0.01 * tol;

    Configuration x = q;
    Eigen::VectorXd r = residual(x, leaf);
    if (r.allFinite() && r.lpNorm<Eigen::Infinity>() <= tol) return x;

    const auto accept = [&]() -> std::optional<Configuration> {
        if ((x - q).norm() > options.max_distance) return std::nullopt;
        return x;
    };
    for (int it = 0; it < options.max_iters; ++it) {
        const Eigen::MatrixXd J = constraint.jacobian(x);
        const Eigen::MatrixXd JJt = J * J.transpose();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(JJt);
        if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array().abs() > 1e-12).all()) return std::nullopt;
        Eigen::VectorXd dx = J.transpose() * ldlt.solve(r);
        const double n = dx.norm();
        if (!std::isfinite(n)) return std::nullopt;
        if (n > options.max_step) dx *= options.max_step / n;
        x -= dx;
        r = residual(x, leaf);
        if (!r.allFinite()) return std::nullopt;
        if (r.lpNorm<Eigen::Infinity>() <= target) return accept();
    }
    if (r.lpNorm<Eigen::Infinity>() <= tol) return accept();
    return std::nullopt;
}

void FoliatedSpace::validate_witness(const IntersectionWitness& w) const {
    if (!contains(w.leaf_a) || !contains(w.leaf_b))
        throw LoadError("intersection witness references an undeclared leaf");
    if (w.leaf_a.foliation == w.leaf_b.foliation)
        throw LoadError("intersection witness joins two leaves of foliation " + std::to_string(w.leaf_a.foliation));
    if (w.config.size() != dimension_) throw LoadError("intersection witness has wrong dimension");
    if (!w.config.allFinite()) throw LoadError("intersection witness has non-finite coordinates");
    for (const auto& leaf : {w.leaf_a, w.leaf_b}) {
        const double res = evaluate_constraint(w.config, leaf);
        if (res > tolerance(leaf))
            throw LoadError("intersection witness is off leaf " + to_string(leaf) + " (residual " +
                            std::to_string(res) + ")");
    }
}

}  // namespace frm
