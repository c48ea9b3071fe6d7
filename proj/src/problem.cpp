#include "frm/problem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace frm {

namespace {

// Desk geometry shared by every benchmark.
constexpr double kDeskSize = 10.0;
constexpr double kArmLength = 0.8;
constexpr double kCupRadius = 0.2;
constexpr double kHandRadius = 0.1;
constexpr double kLeafTolerance = 1e-6;
constexpr double kGraspBandwidth = 0.5;
constexpr double kPlacementBandwidth = 1.0;
// Heading coordinate units per radian.

Box2 box(double x0, double y0, double x1, double y1) { return Box2{{x0, y0}, {x1, y1}}; }

Eigen::Vector2d unit(double a) { return {std::cos(a), std::sin(a)}; }

Configuration config_at(const Eigen::Vector2d& cup, double angle) {
    const Eigen::Vector2d hand = cup - kArmLength * unit(angle);
    Configuration q(3);
    q << hand.x(), hand.y(), angle;
    return q;
}

struct Layout {
    std::vector<Shape> walls;
    std::vector<Eigen::Vector2d> placements;  // start first, goal last
    std::vector<std::string> labels;
};

std::vector<double> grasp_angles(int count) {
    std::vector<double> angles;
    for (int k = 0; k < count; ++k)
        angles.push_back(-std::numbers::pi + (k + 0.5) * 2.0 * std::numbers::pi / count);
    return angles;
}

double jitter(std::mt19937_64& rng, double amplitude) {
    return std::uniform_real_distribution<double>(-amplitude, amplitude)(rng);
}

double segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const Eigen::Vector2d ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / std::max(ab.squaredNorm(), 1e-12), 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

Layout simple_layout(std::mt19937_64& rng, double density) {
    Layout out;
    const Eigen::Vector2d s(2.5 + jitter(rng, 0.5), 5.0 + jitter(rng, 0.5));
    const Eigen::Vector2d g(7.5 + jitter(rng, 0.5), 5.0 + jitter(rng, 0.5));
    out.placements = {s, g};
    out.labels = {"start", "goal"};
    const int count = static_cast<int>(std::lround(std::max(density, 0.0) * kDeskSize * kDeskSize));
    std::uniform_real_distribution<double> coord(0.0, kDeskSize);
    std::uniform_real_distribution<double> radius(0.3, 0.6);
    // The band around the start-goal segment stays clear for every grasp.
    constexpr double keep_out = kArmLength + kHandRadius + 0.3;
    for (int placed = 0, tries = 0; placed < count && tries < 100 * count; ++tries) {
        const double r = radius(rng);
        const Eigen::Vector2d c(coord(rng), coord(rng));
        if ((c.array() - r < 0.0).any() || (c.array() + r > kDeskSize).any()) continue;
        if (segment_distance(c, s, g) < keep_out + r) continue;
        out.walls.push_back(Disc2{c, r});
        ++placed;
    }
    return out;
}

// Walls collide with both hand and cup. A door admits a grasp only when the
// hand-cup pair fits through it lengthwise, so a door in a horizontal wall
// passes near-vertical grasps only.
constexpr double kWall = 0.8;
constexpr double kDoorHalfWidth = 0.4;
// Alcoves hold the cup against a back wall; the hand must stay inside the
// side walls, which admits grasps within about 30 degrees of the opening.
constexpr double kAlcoveWall = 0.3;
constexpr double kAlcoveHalfWidth = 0.5;
constexpr double kAlcoveDepth = 1.2;
constexpr double kAlcoveBack = 0.35;

// Thick wall across y = y0 spanning [x0, x1], with a door centered at door_x.
std::vector<Box2> horizontal_wall(double y0, double x0, double x1, double door_x) {
    return {box(x0, y0 - kWall / 2, door_x - kDoorHalfWidth, y0 + kWall / 2),
            box(door_x + kDoorHalfWidth, y0 - kWall / 2, x1, y0 + kWall / 2)};
}

void add_walls(Layout& out, const std::vector<Box2>& walls) { out.walls.insert(out.walls.end(), walls.begin(), walls.end()); }

// Three-sided pocket around `cup`, open towards +x (axis 0) or +y (axis 1).
std::vector<Box2> alcove(const Eigen::Vector2d& cup, int axis) {
    const double a0 = -kAlcoveBack - kAlcoveWall, a1 = -kAlcoveBack, a2 = kAlcoveDepth;
    const double b0 = kAlcoveHalfWidth, b1 = kAlcoveHalfWidth + kAlcoveWall;
    // Boxes in (along, across) offsets from the cup.
    const std::vector<std::array<double, 4>> local{{a0, -b1, a1, b1}, {a0, -b1, a2, -b0}, {a0, b0, a2, b1}};
    std::vector<Box2> out;
    for (const auto& [u0, v0, u1, v1] : local) {
        if (axis == 0)
            out.push_back(box(cup.x() + u0, cup.y() + v0, cup.x() + u1, cup.y() + v1));
        else
            out.push_back(box(cup.x() + v0, cup.y() + u0, cup.x() + v1, cup.y() + u1));
    }
    return out;
}

Layout sequential_layout(std::mt19937_64& rng) {
    Layout out;
    // The cup starts in an alcove opening east and ends in one opening north,
    // so no grasp serves both: one re-grasp is mandatory. The pen's door sits
    // in its top wall, so the start grasps cannot carry the cup into it.
    const Eigen::Vector2d start(kAlcoveBack + kAlcoveWall, 6.5 + jitter(rng, 1.0));
    const Eigen::Vector2d goal(8.0 + jitter(rng, 0.8), kAlcoveBack + kAlcoveWall);
    add_walls(out, alcove(start, 0));
    add_walls(out, alcove(goal, 1));
    const Eigen::Vector2d pen(4.2 + jitter(rng, 0.2), 2.8 + jitter(rng, 0.2));
    constexpr double inner = 1.2;
    out.walls.push_back(box(pen.x() - inner - kWall, pen.y() - inner - kWall, pen.x() + inner + kWall, pen.y() - inner));
    out.walls.push_back(box(pen.x() - inner - kWall, pen.y() - inner, pen.x() - inner, pen.y() + inner));
    out.walls.push_back(box(pen.x() + inner, pen.y() - inner, pen.x() + inner + kWall, pen.y() + inner));
    add_walls(out, horizontal_wall(pen.y() + inner + kWall / 2, pen.x() - inner - kWall, pen.x() + inner + kWall, pen.x()));
    const Eigen::Vector2d open(5.0 + jitter(rng, 0.8), 7.5 + jitter(rng, 0.8));
    out.placements = {start, pen, open, goal};
    out.labels = {"start", "regrasp_pen", "regrasp_open", "goal"};
    return out;
}

Layout crossing_layout(std::mt19937_64& rng, int regrasps) {
    Layout out;
    // A wall across the desk with one door: only near-vertical grasps cross
    // it. Re-grasp placements on either side let the planner switch grasps.
    add_walls(out, horizontal_wall(5.0, 0.0, kDeskSize, 5.0 + jitter(rng, 1.5)));
    const Eigen::Vector2d s(2.5 + jitter(rng, 0.5), 2.5 + jitter(rng, 0.5));
    const Eigen::Vector2d g(7.5 + jitter(rng, 0.5), 7.5 + jitter(rng, 0.5));
    const Eigen::Vector2d a(7.5 + jitter(rng, 0.5), 2.0 + jitter(rng, 0.3));
    const Eigen::Vector2d b(2.5 + jitter(rng, 0.5), 8.0 + jitter(rng, 0.3));
    out.placements = {s, a};
    out.labels = {"start", "regrasp_a"};
    if (regrasps == 2) {
        out.placements.push_back(b);
        out.labels.push_back("regrasp_b");
    }
    out.placements.push_back(g);
    out.labels.push_back("goal");
    return out;
}

}  // namespace

std::string_view to_string(Category c) {
    switch (c) {
        case Category::Simple: return "simple";
        case Category::Sequential: return "sequential";
        case Category::Crossing: return "crossing";
        case Category::Custom: return "custom";
    }
    return "custom";
}

Category category_from_string(std::string_view name) {
    for (auto c : {Category::Simple, Category::Sequential, Category::Crossing, Category::Custom})
        if (to_string(c) == name) return c;
    throw ConfigError("unknown benchmark category '" + std::string(name) + "'");
}

void Problem::validate() const {
    if (!space || !env) throw LoadError("problem is missing its space or environment");
    if (space->dimension() != env->dimension()) throw LoadError("environment and space dimensions differ");
    for (std::size_t k = 0; k < witnesses.size(); ++k) {
        const auto& w = witnesses[k];
        space->validate_witness(w);
        if (!env->in_bounds(w.config))
            throw LoadError("intersection witness " + std::to_string(k) + " lies outside the bounds");
    }
    for (const auto* lc : {&start, &goal}) {
        if (!space->contains(lc->leaf)) throw LoadError("query references undeclared leaf " + to_string(lc->leaf));
        if (lc->config.size() != space->dimension()) throw LoadError("query configuration has wrong dimension");
    }
}

Environment desk_environment(std::vector<Shape> robot_obstacles, std::vector<Shape> object_obstacles) {
    Eigen::VectorXd lo(3), hi(3);
    lo << 0.0, 0.0, -std::numbers::pi;
    hi << kDeskSize, kDeskSize, std::numbers::pi;
    return Environment(lo, hi, RobotBody{0, 1, kHandRadius}, ObjectModel{2, kArmLength, kCupRadius},
                       std::move(robot_obstacles), std::move(object_obstacles));
}

Problem make_benchmark(Category category, std::uint64_t seed, const BenchmarkOptions& options) {
    if (options.grasps < 1) throw ConfigError("benchmark needs at least one grasp");
    if (options.regrasp_placements < 1 || options.regrasp_placements > 2)
        throw ConfigError("crossing benchmark supports 1 or 2 re-grasp placements");
    if (category != Category::Simple && options.obstacle_density > 0.0)
        throw ConfigError("obstacle density applies to the simple category only");
    std::mt19937_64 rng(seed);
    Layout layout;
    switch (category) {
        case Category::Simple:
            layout = simple_layout(rng, options.obstacle_density < 0.0 ? 0.0 : options.obstacle_density);
            break;
        case Category::Sequential: layout = sequential_layout(rng); break;
        case Category::Crossing: layout = crossing_layout(rng, options.regrasp_placements); break;
        case Category::Custom: throw ConfigError("custom problems are loaded from files, not generated");
    }
    auto env = std::make_shared<Environment>(desk_environment(layout.walls, layout.walls));

    const auto angles = grasp_angles(options.grasps);
    std::vector<CoParameter> grasps;
    for (std::size_t k = 0; k < angles.size(); ++k)
        grasps.push_back({"grasp_" + std::to_string(k), (Eigen::VectorXd(1) << angles[k]).finished()});
    std::vector<CoParameter> placements;
    for (std::size_t k = 0; k < layout.placements.size(); ++k)
        placements.push_back({layout.labels[k], layout.placements[k]});

    std::vector<Foliation> foliations;
    foliations.emplace_back("grasp", ConstraintFamily(CoordinateConstraint{2}, kLeafTolerance), grasps,
                            kGraspBandwidth);
    foliations.emplace_back("placement", ConstraintFamily(AttachedPointConstraint{0, 1, 2, kArmLength}, kLeafTolerance),
                            placements, kPlacementBandwidth);
    auto space = std::make_shared<FoliatedSpace>(3, std::move(foliations));

    Problem problem;
    problem.name = std::string(to_string(category)) + "-" + std::to_string(seed);
    problem.category = category;
    problem.space = space;
    problem.env = env;
    for (int p = 0; p < static_cast<int>(placements.size()); ++p) {
        for (int k = 0; k < static_cast<int>(angles.size()); ++k) {
            const Configuration q = config_at(layout.placements[static_cast<std::size_t>(p)], angles[static_cast<std::size_t>(k)]);
            const LeafId grasp{0, k};
            if (check_validity(q, grasp, *space, *env) != ValidityTag::Valid) continue;
            if (!space->on_leaf(q, LeafId{1, p})) continue;
            problem.witnesses.push_back({grasp, LeafId{1, p}, q});
        }
    }

    // Start and goal rest on the first and last placement at a random valid angle.
    std::uniform_real_distribution<double> angle(-std::numbers::pi + 0.05, std::numbers::pi - 0.05);
    auto pick = [&](int p) {
        const LeafId leaf{1, p};
        for (int tries = 0; tries < 1000; ++tries) {
            const Configuration q = config_at(layout.placements[static_cast<std::size_t>(p)], angle(rng));
            if (check_validity(q, leaf, *space, *env) == ValidityTag::Valid) return LeafConfiguration{leaf, q};
        }
        throw ConfigError("benchmark generator found no valid resting configuration");
    };
    problem.start = pick(0);
    problem.goal = pick(static_cast<int>(placements.size()) - 1);
    problem.validate();
    return problem;
}

}  // namespace frm
