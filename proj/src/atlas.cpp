#include "frm/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <set>

namespace frm {

namespace {

class FreeSpace {
public:
    FreeSpace(const Environment& env, double resolution) : env_(env), resolution_(resolution) {}

    [[nodiscard]] bool valid(const Configuration& q) const { return !env_.robot_collides(q); }

    [[nodiscard]] bool motion_valid(const Configuration& a, const Configuration& b) const {
        const double d = (b - a).norm();
        const int steps = std::max(1, static_cast<int>(std::ceil(d / resolution_)));
        for (int s = 1; s <= steps; ++s) {
            if (!valid(a + (b - a) * (static_cast<double>(s) / steps))) return false;
        }
        return true;
    }

    Configuration uniform(std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Configuration q(env_.dimension());
        for (int i = 0; i < env_.dimension(); ++i) q[i] = env_.lower()[i] + u(rng) * (env_.upper()[i] - env_.lower()[i]);
        return q;
    }

    std::optional<Configuration> uniform_valid(std::mt19937_64& rng, int tries = 1000) const {
        for (int t = 0; t < tries; ++t) {
            auto q = uniform(rng);
            if (valid(q)) return q;
        }
        return std::nullopt;
    }

private:
    const Environment& env_;
    double resolution_;
};

std::optional<Trajectory> rrt_star(const FreeSpace& space, const Configuration& start, const Configuration& goal,
                                   const DatasetConfig& cfg, std::mt19937_64& rng) {
    std::vector<Configuration> nodes{start};
    std::vector<int> parent{-1};
    std::vector<double> cost{0.0};
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    int goal_parent = -1;
    double goal_cost = std::numeric_limits<double>::infinity();
    int solved_at = -1;

    for (int it = 0; it < cfg.max_iterations; ++it) {
        if (solved_at >= 0 && it - solved_at >= cfg.refine_iterations) break;
        const Configuration target = coin(rng) < cfg.goal_bias ? goal : space.uniform(rng);

        int nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
            const double d = (nodes[static_cast<std::size_t>(i)] - target).squaredNorm();
            if (d < best) {
                best = d;
                nearest = i;
            }
        }
        const Configuration& from = nodes[static_cast<std::size_t>(nearest)];
        Configuration q_new = target;
        const double dist = std::sqrt(best);
        if (dist > cfg.step_size) q_new = from + (target - from) * (cfg.step_size / dist);
        if (dist == 0.0 || !space.motion_valid(from, q_new)) continue;

        // Choose the cheapest valid parent in the rewire ball.
        std::vector<int> near;
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
            if ((nodes[static_cast<std::size_t>(i)] - q_new).norm() <= cfg.rewire_radius) near.push_back(i);
        int best_parent = nearest;
        double best_cost = cost[static_cast<std::size_t>(nearest)] + (q_new - from).norm();
        for (int i : near) {
            const auto& qi = nodes[static_cast<std::size_t>(i)];
            const double c = cost[static_cast<std::size_t>(i)] + (q_new - qi).norm();
            if (c < best_cost && space.motion_valid(qi, q_new)) {
                best_cost = c;
                best_parent = i;
            }
        }
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(q_new);
        parent.push_back(best_parent);
        cost.push_back(best_cost);

        for (int i : near) {
            if (i == best_parent) continue;
            const auto& qi = nodes[static_cast<std::size_t>(i)];
            const double c = best_cost + (qi - q_new).norm();
            if (c < cost[static_cast<std::size_t>(i)] && space.motion_valid(q_new, qi)) {
                parent[static_cast<std::size_t>(i)] = id;
                cost[static_cast<std::size_t>(i)] = c;
            }
        }

        const double to_goal = (goal - q_new).norm();
        if (to_goal <= cfg.step_size && best_cost + to_goal < goal_cost && space.motion_valid(q_new, goal)) {
            goal_cost = best_cost + to_goal;
            goal_parent = id;
            if (solved_at < 0) solved_at = it;
        }
    }
    if (goal_parent < 0) return std::nullopt;

    Trajectory path{goal};
    for (int v = goal_parent; v >= 0; v = parent[static_cast<std::size_t>(v)]) path.push_back(nodes[static_cast<std::size_t>(v)]);
    std::reverse(path.begin(), path.end());
    return path;
}

Trajectory shortcut(const FreeSpace& space, Trajectory path, int attempts, std::mt19937_64& rng) {
    if (path.size() > 2 && space.motion_valid(path.front(), path.back())) return {path.front(), path.back()};
    for (int a = 0; a < attempts && path.size() > 2; ++a) {
        std::uniform_int_distribution<std::size_t> pick(0, path.size() - 1);
        std::size_t i = pick(rng);
        std::size_t j = pick(rng);
        if (i > j) std::swap(i, j);
        if (j - i < 2) continue;
        if (space.motion_valid(path[i], path[j])) path.erase(path.begin() + static_cast<std::ptrdiff_t>(i + 1), path.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return path;
}

Trajectory densify(const Trajectory& path, double spacing) {
    Trajectory out{path.front()};
    for (std::size_t i = 1; i < path.size(); ++i) {
        const auto& a = path[i - 1];
        const auto& b = path[i];
        const int steps = std::max(1, static_cast<int>(std::ceil((b - a).norm() / spacing)));
        for (int s = 1; s <= steps; ++s) out.push_back(s == steps ? b : Configuration(a + (b - a) * (static_cast<double>(s) / steps)));
    }
    return out;
}

}  // namespace

std::size_t TrajectoryDataset::waypoint_count() const {
    std::size_t n = 0;
    for (const auto& t : trajectories) n += t.size();
    return n;
}

Eigen::MatrixXd TrajectoryDataset::waypoint_matrix() const {
    const auto n = static_cast<Eigen::Index>(waypoint_count());
    const auto d = trajectories.empty() || trajectories.front().empty() ? 0 : trajectories.front().front().size();
    Eigen::MatrixXd X(n, d);
    Eigen::Index row = 0;
    for (const auto& t : trajectories)
        for (const auto& q : t) X.row(row++) = q.transpose();
    return X;
}

TrajectoryDataset generate_dataset(const Environment& env_free, const DatasetConfig& config) {
    if (config.n_pairs < 1) throw ConfigError("n_pairs must be >= 1");
    if (!(config.step_size > 0.0) || !(config.waypoint_spacing > 0.0)) throw ConfigError("step sizes must be positive");
    const FreeSpace space(env_free, config.step_size / 4.0);
    std::mt19937_64 rng(config.seed);
    TrajectoryDataset dataset;
    for (int p = 0; p < config.n_pairs; ++p) {
        std::optional<Trajectory> path;
        for (int attempt = 0; attempt < config.max_retries && !path; ++attempt) {
            const auto a = space.uniform_valid(rng);
            const auto b = space.uniform_valid(rng);
            if (!a || !b) throw ConfigError("training environment has no valid configurations");
            path = rrt_star(space, *a, *b, config, rng);
        }
        if (!path) throw ConfigError("dataset planner failed repeatedly; training environment too cluttered");
        dataset.trajectories.push_back(densify(shortcut(space, std::move(*path), config.shortcut_attempts, rng),
                                               config.waypoint_spacing));
    }
    return dataset;
}

std::vector<int> distribution_sequence(const Trajectory& trajectory, const GaussianMixture& mixture) {
    std::vector<int> seq;
    for (const auto& q : trajectory) {
        const int j = mixture.assign(q);
        if (seq.empty() || seq.back() != j) seq.push_back(j);
    }
    return seq;
}

std::map<std::pair<int, int>, int> count_transition_votes(const TrajectoryDataset& dataset,
                                                          const GaussianMixture& mixture) {
    std::map<std::pair<int, int>, int> votes;
    for (const auto& t : dataset.trajectories) {
        const auto seq = distribution_sequence(t, mixture);
        std::set<std::pair<int, int>> voted;
        for (std::size_t k = 1; k < seq.size(); ++k)
            voted.insert(std::minmax(seq[k - 1], seq[k]));
        for (const auto& e : voted) ++votes[e];
    }
    return votes;
}

BaseRoadmap build_base_roadmap(const TrajectoryDataset& dataset, const std::vector<GaussianComponent>& components,
                               int tau_edge) {
    if (tau_edge < 1) throw ConfigError("tau_edge must be >= 1");
    const GaussianMixture mixture(components);
    const int k = mixture.size();

    std::vector<std::pair<int, int>> edges;
    for (const auto& [e, n] : count_transition_votes(dataset, mixture))
        if (n >= tau_edge) edges.push_back(e);

    // Largest connected component; ties go to the one holding the lowest id.
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(k));
    for (const auto& [a, b] : edges) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    std::vector<int> label(static_cast<std::size_t>(k), -1);
    std::vector<int> sizes;
    for (int s = 0; s < k; ++s) {
        if (label[static_cast<std::size_t>(s)] >= 0) continue;
        const int c = static_cast<int>(sizes.size());
        sizes.push_back(0);
        std::vector<int> stack{s};
        label[static_cast<std::size_t>(s)] = c;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            ++sizes.back();
            for (int w : adj[static_cast<std::size_t>(v)])
                if (label[static_cast<std::size_t>(w)] < 0) {
                    label[static_cast<std::size_t>(w)] = c;
                    stack.push_back(w);
                }
        }
    }

    BaseRoadmap roadmap;
    if (edges.empty()) return roadmap;
    const int keep = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<int> remap(static_cast<std::size_t>(k), -1);
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
        if (label[static_cast<std::size_t>(j)] != keep) continue;
        remap[static_cast<std::size_t>(j)] = roadmap.size();
        GaussianComponent c = components[static_cast<std::size_t>(j)];
        c.id = roadmap.size();
        total += c.weight;
        roadmap.components.push_back(std::move(c));
        roadmap.source_ids.push_back(j);
    }
    for (auto& c : roadmap.components) c.weight /= total;
    for (const auto& [a, b] : edges)
        if (remap[static_cast<std::size_t>(a)] >= 0)
            roadmap.edges.emplace_back(remap[static_cast<std::size_t>(a)], remap[static_cast<std::size_t>(b)]);
    std::sort(roadmap.edges.begin(), roadmap.edges.end());
    return roadmap;
}

Atlas build_atlas(const Environment& env_free, const AtlasConfig& config) {
    Atlas atlas;
    atlas.dataset = generate_dataset(env_free, config.dataset);
    atlas.fit = fit_gmm(atlas.dataset.waypoint_matrix(), config.clustering);
    atlas.roadmap = build_base_roadmap(atlas.dataset, atlas.fit.components, config.tau_edge);
    return atlas;
}

}  // namespace frm
