#include "frm/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace frm {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

struct MixtureParams {
    Eigen::VectorXd weights;
    Eigen::MatrixXd means;  // k x d
    std::vector<Eigen::MatrixXd> covs;
};

/// N x k matrix of log w_k + log N(x_n; ...).
Eigen::MatrixXd weighted_log_densities(const Eigen::MatrixXd& X, const MixtureParams& p) {
    const auto n = X.rows();
    const auto d = X.cols();
    const auto k = p.means.rows();
    Eigen::MatrixXd out(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::LLT<Eigen::MatrixXd> llt(p.covs[static_cast<std::size_t>(j)]);
        const Eigen::MatrixXd L = llt.matrixL();
        const double log_det = 2.0 * L.diagonal().array().log().sum();
        const Eigen::MatrixXd diff = (X.rowwise() - p.means.row(j)).transpose();
        const Eigen::MatrixXd y = L.triangularView<Eigen::Lower>().solve(diff);
        const Eigen::VectorXd maha = y.colwise().squaredNorm().transpose();
        const double lw = p.weights[j] > 0.0 ? std::log(p.weights[j]) : -std::numeric_limits<double>::infinity();
        out.col(j) = (lw - 0.5 * (static_cast<double>(d) * kLog2Pi + log_det)) - 0.5 * maha.array();
    }
    return out;
}

/// E-step: returns total log-likelihood and fills responsibilities.
double expectation(const Eigen::MatrixXd& X, const MixtureParams& p, Eigen::MatrixXd& resp) {
    resp = weighted_log_densities(X, p);
    double ll = 0.0;
    for (Eigen::Index n = 0; n < X.rows(); ++n) {
        const double lse = log_sum_exp(resp.row(n));
        ll += lse;
        resp.row(n) = (resp.row(n).array() - lse).exp();
    }
    return ll;
}

void maximization(const Eigen::MatrixXd& X, const Eigen::MatrixXd& resp, double floor, MixtureParams& p) {
    const auto n = static_cast<double>(X.rows());
    const auto k = resp.cols();
    const Eigen::VectorXd nk = resp.colwise().sum().transpose();
    for (Eigen::Index j = 0; j < k; ++j) {
        // An emptied component keeps its shape and drops out through its weight.
        p.weights[j] = nk[j] / n;
        if (nk[j] <= 1e-12) continue;
        const Eigen::RowVectorXd mu = (resp.col(j).transpose() * X) / nk[j];
        p.means.row(j) = mu;
        const Eigen::MatrixXd centered = X.rowwise() - mu;
        const Eigen::MatrixXd cov =
            (centered.array().colwise() * resp.col(j).array()).matrix().transpose() * centered / nk[j];
        p.covs[static_cast<std::size_t>(j)] = floor_covariance(cov, floor);
    }
    p.weights /= p.weights.sum();
}

/// k-means++ seeding followed by a few Lloyd sweeps.
MixtureParams initialize(const Eigen::MatrixXd& X, int k, double floor, std::mt19937_64& rng) {
    const auto n = X.rows();
    const auto d = X.cols();
    Eigen::MatrixXd centers(k, d);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centers.row(0) = X.row(pick(rng));
    Eigen::VectorXd best = (X.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = best.sum();
        Eigen::Index chosen = pick(rng);
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double r = u(rng);
            for (Eigen::Index i = 0; i < n; ++i) {
                r -= best[i];
                if (r <= 0.0) {
                    chosen = i;
                    break;
                }
            }
        }
        centers.row(c) = X.row(chosen);
        best = best.cwiseMin((X.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> label(static_cast<std::size_t>(n), 0);
    for (int sweep = 0; sweep < 10; ++sweep) {
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index arg = 0;
            (centers.rowwise() - X.row(i)).rowwise().squaredNorm().minCoeff(&arg);
            label[static_cast<std::size_t>(i)] = static_cast<int>(arg);
        }
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(label[static_cast<std::size_t>(i)]) += X.row(i);
            counts[label[static_cast<std::size_t>(i)]] += 1.0;
        }
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0.0) centers.row(c) = sums.row(c) / counts[c];
    }

    MixtureParams p;
    p.weights = Eigen::VectorXd::Zero(k);
    p.means = centers;
    p.covs.assign(static_cast<std::size_t>(k), Eigen::MatrixXd::Identity(d, d));
    const Eigen::RowVectorXd global_mean = X.colwise().mean();
    const Eigen::MatrixXd global_centered = X.rowwise() - global_mean;
    const Eigen::MatrixXd global_cov =
        floor_covariance(global_centered.transpose() * global_centered / static_cast<double>(n), floor);
    for (int c = 0; c < k; ++c) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
        double cnt = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (label[static_cast<std::size_t>(i)] != c) continue;
            const Eigen::RowVectorXd diff = X.row(i) - centers.row(c);
            acc += diff.transpose() * diff;
            cnt += 1.0;
        }
        p.weights[c] = std::max(cnt, 1.0);
        p.covs[static_cast<std::size_t>(c)] =
            cnt > static_cast<double>(d) ? floor_covariance(acc / cnt, floor) : global_cov / std::max(1, k);
    }
    p.weights /= p.weights.sum();
    return p;
}

}  // namespace

Eigen::MatrixXd floor_covariance(const Eigen::MatrixXd& cov, double floor) {
    const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components) : components_(std::move(components)) {
    for (std::size_t j = 0; j < components_.size(); ++j) {
        const auto& c = components_[j];
        if (c.mean.size() != components_.front().mean.size() || c.covariance.rows() != c.mean.size() ||
            c.covariance.cols() != c.mean.size())
            throw ContractViolation("inconsistent Gaussian component dimensions");
        Eigen::LLT<Eigen::MatrixXd> llt(c.covariance);
        if (llt.info() != Eigen::Success) throw ContractViolation("component covariance is not positive definite");
        chol_.push_back(llt.matrixL());
        const double log_det = 2.0 * chol_.back().diagonal().array().log().sum();
        log_norm_.push_back(-0.5 * (static_cast<double>(c.mean.size()) * kLog2Pi + log_det));
    }
}

int GaussianMixture::dimension() const noexcept {
    return components_.empty() ? 0 : static_cast<int>(components_.front().mean.size());
}

double GaussianMixture::log_density(int j, const Eigen::VectorXd& q) const {
    const auto idx = static_cast<std::size_t>(j);
    const Eigen::VectorXd y = chol_[idx].triangularView<Eigen::Lower>().solve(q - components_[idx].mean);
    return log_norm_[idx] - 0.5 * y.squaredNorm();
}

double GaussianMixture::weighted_log_density(int j, const Eigen::VectorXd& q) const {
    const double w = components_[static_cast<std::size_t>(j)].weight;
    return (w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity()) + log_density(j, q);
}

int GaussianMixture::assign(const Eigen::VectorXd& q) const {
    if (components_.empty()) throw ContractViolation("assign_distribution needs at least one component");
    if (q.size() != dimension()) throw ContractViolation("configuration dimension does not match the mixture");
    int best = 0;
    double best_value = weighted_log_density(0, q);
    for (int j = 1; j < size(); ++j) {
        const double v = weighted_log_density(j, q);
        if (v > best_value) {
            best_value = v;
            best = j;
        }
    }
    return best;
}

Eigen::VectorXd GaussianMixture::responsibilities(const Eigen::VectorXd& q) const {
    Eigen::RowVectorXd lw(size());
    for (int j = 0; j < size(); ++j) lw[j] = weighted_log_density(j, q);
    const double lse = log_sum_exp(lw);
    return (lw.array() - lse).exp().transpose();
}

double GaussianMixture::log_likelihood(const Eigen::MatrixXd& points) const {
    double ll = 0.0;
    Eigen::RowVectorXd lw(size());
    for (Eigen::Index n = 0; n < points.rows(); ++n) {
        const Eigen::VectorXd x = points.row(n).transpose();
        for (int j = 0; j < size(); ++j) lw[j] = weighted_log_density(j, x);
        ll += log_sum_exp(lw);
    }
    return ll;
}

int assign_distribution(const Configuration& q, const std::vector<GaussianComponent>& components) {
    return GaussianMixture(components).assign(q);
}

GmmFit fit_gmm(const Eigen::MatrixXd& points, const ClusteringConfig& config) {
    if (config.k_min < 1 || config.k_max < config.k_min || config.k_step < 1) throw ConfigError("invalid K range for GMM fitting");
    if (points.rows() < config.k_min) throw ConfigError("not enough points for the requested component count");
    if (!(config.covariance_floor > 0.0)) throw ConfigError("covariance floor must be positive");
    const auto n = points.rows();
    const auto d = points.cols();

    GmmFit fit;
    double best_bic = std::numeric_limits<double>::infinity();
    MixtureParams best_params;
    for (int k = config.k_min; k <= std::min<int>(config.k_max, static_cast<int>(n)); k += config.k_step) {
        for (int restart = 0; restart < std::max(1, config.restarts); ++restart) {
            std::mt19937_64 rng(config.seed * 1000003ULL + static_cast<std::uint64_t>(k) * 7919ULL +
                                static_cast<std::uint64_t>(restart));
            MixtureParams p = initialize(points, k, config.covariance_floor, rng);
            EmTrace trace{k, restart, {}, 0.0};
            Eigen::MatrixXd resp;
            double ll = expectation(points, p, resp);
            trace.log_likelihood.push_back(ll);
            for (int it = 0; it < config.max_iters; ++it) {
                maximization(points, resp, config.covariance_floor, p);
                const double next = expectation(points, p, resp);
                trace.log_likelihood.push_back(next);
                const double gain = next - ll;
                ll = next;
                if (gain < config.relative_tolerance * std::abs(ll)) break;
            }
            const double params = static_cast<double>(k) * (static_cast<double>(d) + d * (d + 1) / 2.0) + (k - 1);
            trace.bic = -2.0 * ll + params * std::log(static_cast<double>(n));
            if (trace.bic < best_bic) {
                best_bic = trace.bic;
                best_params = p;
                fit.chosen_k = k;
                fit.log_likelihood = ll;
            }
            fit.traces.push_back(std::move(trace));
        }
    }

    // Drop components that emptied out, then renormalize.
    double total = 0.0;
    for (Eigen::Index j = 0; j < best_params.weights.size(); ++j)
        if (best_params.weights[j] * static_cast<double>(n) > 1e-9) total += best_params.weights[j];
    for (Eigen::Index j = 0; j < best_params.weights.size(); ++j) {
        if (best_params.weights[j] * static_cast<double>(n) <= 1e-9) continue;
        GaussianComponent c;
        c.id = static_cast<int>(fit.components.size());
        c.mean = best_params.means.row(j).transpose();
        c.covariance = best_params.covs[static_cast<std::size_t>(j)];
        c.weight = best_params.weights[j] / total;
        fit.components.push_back(std::move(c));
    }
    return fit;
}

}  // namespace frm
