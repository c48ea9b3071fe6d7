// Gaussian mixture fitting (EM over a range of K, BIC model selection) and
// component assignment.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "frm/core.hpp"

namespace frm {

struct GaussianComponent {
    int id = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    double weight = 1.0;
};

/// Immutable mixture with cached Cholesky factors.
class GaussianMixture {
public:
    GaussianMixture() = default;
    explicit GaussianMixture(std::vector<GaussianComponent> components);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(components_.size()); }
    [[nodiscard]] bool empty() const noexcept { return components_.empty(); }
    [[nodiscard]] int dimension() const noexcept;
    [[nodiscard]] const std::vector<GaussianComponent>& components() const noexcept { return components_; }
    [[nodiscard]] const GaussianComponent& component(int j) const { return components_.at(static_cast<std::size_t>(j)); }

    /// log N(q; mu_j, Sigma_j).
    [[nodiscard]] double log_density(int j, const Eigen::VectorXd& q) const;
    /// log w_j + log N(q; mu_j, Sigma_j).
    [[nodiscard]] double weighted_log_density(int j, const Eigen::VectorXd& q) const;
    /// argmax_j of the weighted density; ties go to the lowest index.
    [[nodiscard]] int assign(const Eigen::VectorXd& q) const;
    /// Sum over rows of log sum_j w_j N(x; ...).
    [[nodiscard]] double log_likelihood(const Eigen::MatrixXd& points) const;
    [[nodiscard]] Eigen::VectorXd responsibilities(const Eigen::VectorXd& q) const;

    /// Lower-triangular Cholesky factor of component j's covariance.
    [[nodiscard]] const Eigen::MatrixXd& cholesky(int j) const { return chol_[static_cast<std::size_t>(j)]; }

private:
    std::vector<GaussianComponent> components_;
    std::vector<Eigen::MatrixXd> chol_;
    std::vector<double> log_norm_;
};

/// Free-function form over a plain component list.
int assign_distribution(const Configuration& q, const std::vector<GaussianComponent>& components);

struct ClusteringConfig {
    int k_min = 1;
    int k_max = 8;
    /// Candidate K values are k_min, k_min + k_step, ... up to k_max.
    int k_step = 1;
    int max_iters = 200;
    int restarts = 1;
    /// Stop when the per-sweep log-likelihood gain falls below tol * |LL|.
    double relative_tolerance = 1e-7;
    double covariance_floor = 1e-6;
    std::uint64_t seed = 0;
};

struct EmTrace {
    int k = 0;
    int restart = 0;
    std::vector<double> log_likelihood;  // one entry per E-step
    double bic = 0.0;
};

struct GmmFit {
    std::vector<GaussianComponent> components;
    int chosen_k = 0;
    double log_likelihood = 0.0;
    std::vector<EmTrace> traces;
};

/// Rows of `points` are samples. Throws ConfigError when there are fewer rows
/// than k_min or the range is empty.
GmmFit fit_gmm(const Eigen::MatrixXd& points, const ClusteringConfig& config);

/// Symmetrizes and raises every eigenvalue to at least `floor`.
Eigen::MatrixXd floor_covariance(const Eigen::MatrixXd& cov, double floor);

}  // namespace frm
