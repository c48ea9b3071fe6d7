#include "frm/motion.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace frm {

void MotionPlannerConfig::validate() const {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
    if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw ConfigError("goal_bias must lie in [0, 1]");
    if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("step_size must be positive");
    if (!(time_budget > 0.0)) throw ConfigError("time_budget must be positive");
    if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
    if (projection.max_iters < 1) throw ConfigError("projection max_iters must be at least 1");
    if (shortcut_attempts < 0) throw ConfigError("shortcut_attempts must be non-negative");
}

Configuration sample_biased(const Task& task, const MotionPlannerConfig& cfg, const Environment& env,
                            std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const bool biased = !task.distribution_list.empty() && unit(rng) < cfg.rho;
    if (biased) {
        std::uniform_int_distribution<std::size_t> pick(0, task.distribution_list.size() - 1);
        const auto& c = task.distribution_list[pick(rng)];
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd z(c.mean.size());
        for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(rng);
        const Eigen::MatrixXd l = c.covariance.llt().matrixL();
        return c.mean + l * z;
    }
    Configuration q(env.dimension());
    for (int k = 0; k < env.dimension(); ++k)
        q[k] = std::uniform_real_distribution<double>(env.lower()[k], env.upper()[k])(rng);
    return q;
}

double path_length(const Trajectory& path) {
    double total = 0.0;
    for (std::size_t k = 1; k < path.size(); ++k) total += (path[k] - path[k - 1]).norm();
    return total;
}

namespace {

struct Tree {
    std::vector<Configuration> nodes;
    std::vector<int> parent;

    int add(Configuration q, int p) {
        nodes.push_back(std::move(q));
        parent.push_back(p);
        return static_cast<int>(nodes.size()) - 1;
    }

    [[nodiscard]] int nearest(const Configuration& q) const {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double d = (nodes[k] - q).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(k);
            }
        }
        return best;
    }

    /// Root-to-node path.
    [[nodiscard]] Trajectory path_to(int k) const {
        Trajectory p;
        for (; k != -1; k = parent[static_cast<std::size_t>(k)]) p.push_back(nodes[static_cast<std::size_t>(k)]);
        return {p.rbegin(), p.rend()};
    }
};

enum class Growth { Trapped, Advanced, Reached };

class Planner {
public:
    Planner(const Task& task, const FoliatedSpace& space, const Environment& env, const MotionPlannerConfig& cfg,
            std::mt19937_64& rng, PlannerFeedback& fb)
        : task_(task), space_(space), env_(env), cfg_(cfg), rng_(rng), fb_(fb) {}

    ValidityTag record(const Configuration& q) {
        const ValidityTag tag = check_validity(q, task_.leaf, space_, env_);
        fb_.samples.push_back({q, tag});
        return tag;
    }

    /// Projected interpolation from a to b at step/4 resolution; every point
    /// must project, stay Valid and move continuously. Failures are recorded
    /// only when `record_failures` is set.
    bool segment_valid(const Configuration& a, const Configuration& b, bool record_failures) {
        const double resolution = cfg_.step_size / 4.0;
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / resolution)));
        Configuration prev = a;
        for (int k = 1; k < pieces; ++k) {
            const Configuration raw = a + (b - a) * (static_cast<double>(k) / pieces);
            const auto proj = space_.project(raw, task_.leaf, cfg_.projection);
            if (!proj) {
                if (record_failures) record(raw);
                return false;
            }
            const ValidityTag tag = check_validity(*proj, task_.leaf, space_, env_);
            if (tag != ValidityTag::Valid) {
                if (record_failures) fb_.samples.push_back({*proj, tag});
                return false;
            }
            if ((*proj - prev).norm() > 2.0 * resolution) return false;
            prev = *proj;
        }
        return (b - prev).norm() <= 2.0 * resolution;
    }

    std::pair<Growth, int> extend(Tree& tree, const Configuration& target) {
        const int near = tree.nearest(target);
        const Configuration& q_near = tree.nodes[static_cast<std::size_t>(near)];
        const double d = (target - q_near).norm();
        if (d == 0.0) return {Growth::Reached, near};
        const Configuration cand = d <= cfg_.step_size ? target : Configuration(q_near + (target - q_near) * (cfg_.step_size / d));
        const auto proj = space_.project(cand, task_.leaf, cfg_.projection);
        if (!proj) {
            record(cand);
            return {Growth::Trapped, near};
        }
        const Configuration q_new = *proj;
        const ValidityTag tag = record(q_new);
        const double moved = (q_new - q_near).norm();
        if (tag != ValidityTag::Valid || moved > cfg_.step_size * (1.0 + 1e-9) || moved < 1e-12)
            return {Growth::Trapped, near};
        if (!segment_valid(q_near, q_new, true)) return {Growth::Trapped, near};
        const int idx = tree.add(q_new, near);
        return {q_new == target ? Growth::Reached : Growth::Advanced, idx};
    }

    Trajectory shortcut(Trajectory path) {
        if (path.size() < 3) return path;
        for (int attempt = 0; attempt < cfg_.shortcut_attempts && path.size() >= 3; ++attempt) {
            std::uniform_int_distribution<std::size_t> pick(0, path.size() - 1);
            std::size_t i = pick(rng_), j = pick(rng_);
            if (i > j) std::swap(i, j);
            if (j < i + 2) continue;
            auto replacement = straight_segment(path[i], path[j]);
            if (!replacement) continue;
            double old_len = 0.0;
            for (std::size_t k = i + 1; k <= j; ++k) old_len += (path[k] - path[k - 1]).norm();
            Trajectory sub{path[i]};
            sub.insert(sub.end(), replacement->begin(), replacement->end());
            if (path_length(sub) >= old_len) continue;
            Trajectory next(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            next.insert(next.end(), replacement->begin(), replacement->end());
            next.insert(next.end(), path.begin() + static_cast<std::ptrdiff_t>(j) + 1, path.end());
            path = std::move(next);
        }
        return path;
    }

    PlannerFeedback& run() {
        const auto clock_start = std::chrono::steady_clock::now();
        const ValidityTag start_tag = record(task_.start_config);
        const ValidityTag goal_tag = record(task_.goal_config);
        if (start_tag != ValidityTag::Valid || goal_tag != ValidityTag::Valid) return fb_;
        if ((task_.start_config - task_.goal_config).norm() <= space_.tolerance(task_.leaf)) {
            succeed({task_.start_config});
            return fb_;
        }
        Tree from_start, from_goal;
        from_start.add(task_.start_config, -1);
        from_goal.add(task_.goal_config, -1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int it = 0; it < cfg_.max_iterations; ++it) {
            const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
            if (elapsed > cfg_.time_budget) break;
            const bool forward = it % 2 == 0;
            Tree& a = forward ? from_start : from_goal;
            Tree& b = forward ? from_goal : from_start;
            Configuration target;
            if (unit(rng_) < cfg_.goal_bias) {
                target = b.nodes.front();
            } else {
                const Configuration raw = sample_biased(task_, cfg_, env_, rng_);
                const auto proj = space_.project(raw, task_.leaf, cfg_.projection);
                if (!proj) {
                    record(raw);
                    continue;
                }
                record(*proj);
                target = *proj;
            }
            const auto [grown, ia] = extend(a, target);
            if (grown == Growth::Trapped) continue;
            const Configuration q_new = a.nodes[static_cast<std::size_t>(ia)];
            // Connect while each step strictly closes in on q_new.
            double gap = std::numeric_limits<double>::infinity();
            for (;;) {
                const auto [status, ib] = extend(b, q_new);
                if (status == Growth::Trapped) break;
                if (status == Growth::Reached) {
                    Trajectory pa = a.path_to(ia), pb = b.path_to(ib);
                    Trajectory path = std::move(pa);
                    path.insert(path.end(), pb.rbegin() + 1, pb.rend());
                    if (!forward) std::reverse(path.begin(), path.end());
                    succeed(shortcut(std::move(path)));
                    return fb_;
                }
                const double next_gap = (b.nodes[static_cast<std::size_t>(ib)] - q_new).norm();
                if (!(next_gap < gap)) break;
                gap = next_gap;
            }
        }
        return fb_;
    }

private:
    std::optional<Trajectory> straight_segment(const Configuration& a, const Configuration& b) {
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / cfg_.step_size)));
        Trajectory out;
        Configuration prev = a;
        for (int k = 1; k <= pieces; ++k) {
            Configuration q = b;
            if (k < pieces) {
                const auto proj = space_.project(a + (b - a) * (static_cast<double>(k) / pieces), task_.leaf, cfg_.projection);
                if (!proj) return std::nullopt;
                q = *proj;
            }
            if (check_validity(q, task_.leaf, space_, env_) != ValidityTag::Valid) return std::nullopt;
            if ((q - prev).norm() > cfg_.step_size) return std::nullopt;
            if (!segment_valid(prev, q, false)) return std::nullopt;
            out.push_back(q);
            prev = q;
        }
        return out;
    }

    void succeed(Trajectory path) {
        fb_.success = true;
        fb_.path_length = path_length(path);
        fb_.path = std::move(path);
    }

    const Task& task_;
    const FoliatedSpace& space_;
    const Environment& env_;
    const MotionPlannerConfig& cfg_;
    std::mt19937_64& rng_;
    PlannerFeedback& fb_;
};

}  // namespace

PlannerFeedback plan_task(const Task& task, const FoliatedSpace& space, const Environment& env,
                          const MotionPlannerConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    if (!space.contains(task.leaf)) throw ContractViolation("task leaf " + to_string(task.leaf) + " is not declared");
    PlannerFeedback fb;
    Planner(task, space, env, cfg, rng, fb).run();
    return fb;
}

}  // namespace frm
