#include <doctest.h>

#include <Eigen/LU>
#include <cmath>
#include <random>

#include "frm/motion.hpp"
#include "support/fixtures.hpp"

using namespace frm;
using fx::vec;

namespace {

Task line_task(double x0, double x1, std::vector<GaussianComponent> dists = {}) {
    Task t;
    t.leaf = {0, 0};
    t.start_config = vec({x0, 5.0});
    t.goal_config = vec({x1, 5.0});
    t.distribution_list = std::move(dists);
    return t;
}

}  // namespace

TEST_CASE("rho = 0 samples uniformly over the bounds") {
    const auto env = fx::box();
    MotionPlannerConfig cfg;
    cfg.rho = 0.0;
    const Task task = line_task(1.0, 9.0, {fx::component(0, 2.0, 2.0)});
    std::mt19937_64 rng(43);
    std::array<int, 16> bins{};
    const int draws = 10000;
    for (int k = 0; k < draws; ++k) {
        const auto q = sample_biased(task, cfg, env, rng);
        REQUIRE(env.in_bounds(q));
        const int i = std::min(3, static_cast<int>(q[0] / 2.5)), j = std::min(3, static_cast<int>(q[1] / 2.5));
        ++bins[static_cast<std::size_t>(j * 4 + i)];
    }
    double chi2 = 0.0;
    const double expect = draws / 16.0;
    for (int b : bins) chi2 += (b - expect) * (b - expect) / expect;
    // 99th percentile of chi-square with 15 degrees of freedom.
    CHECK(chi2 < 30.58);
}

TEST_CASE("rho = 1 samples concentrate within 4 sigma of a listed component") {
    const auto env = fx::box();
    MotionPlannerConfig cfg;
    cfg.rho = 1.0;
    Eigen::MatrixXd cov(2, 2);
    cov << 0.4, 0.1, 0.1, 0.2;
    const Task task = line_task(1.0, 9.0, {{0, vec({3.0, 4.0}), cov, 0.5}, {1, vec({7.0, 6.0}), cov, 0.5}});
    const Eigen::MatrixXd inv = cov.inverse();
    std::mt19937_64 rng(47);
    int inside = 0;
    const int draws = 5000;
    for (int k = 0; k < draws; ++k) {
        const auto q = sample_biased(task, cfg, env, rng);
        for (const auto& c : task.distribution_list) {
            const Eigen::VectorXd d = q - c.mean;
            if (d.dot(inv * d) <= 16.0) {
                ++inside;
                break;
            }
        }
    }
    CHECK(inside >= 0.99 * draws);
}

TEST_CASE("an empty distribution list samples uniformly even at rho = 1") {
    const auto env = fx::box();
    MotionPlannerConfig cfg;
    cfg.rho = 1.0;
    std::mt19937_64 rng(53);
    double mean_x = 0.0;
    for (int k = 0; k < 2000; ++k) mean_x += sample_biased(line_task(1.0, 9.0), cfg, env, rng)[0] / 2000.0;
    CHECK(std::abs(mean_x - 5.0) < 0.3);
}

TEST_CASE("motion planner config validation") {
    CHECK_THROWS_AS((MotionPlannerConfig{.rho = 1.5}.validate()), ConfigError);
    CHECK_THROWS_AS((MotionPlannerConfig{.step_size = 0.0}.validate()), ConfigError);
    CHECK_THROWS_AS((MotionPlannerConfig{.max_iterations = 0}.validate()), ConfigError);
}

TEST_CASE("start equal to goal returns a one-waypoint path") {
    const auto space = fx::plane({5.0}, {});
    std::mt19937_64 rng(1);
    const auto fb = plan_task(line_task(3.0, 3.0), *space, fx::box(), {}, rng);
    REQUIRE(fb.success);
    CHECK(fb.path->size() == 1);
    CHECK(fb.path_length == 0.0);
    CHECK(fb.samples.size() == 2);
}

TEST_CASE("an invalid start fails without planning") {
    const auto space = fx::plane({5.0}, {});
    std::mt19937_64 rng(1);
    const auto fb = plan_task(line_task(-0.5, 3.0), *space, fx::box(), {}, rng);
    CHECK_FALSE(fb.success);
    REQUIRE(fb.samples.size() == 2);
    CHECK(fb.samples[0].tag == ValidityTag::RobotInvalid);
}

TEST_CASE("a walled-off goal fails and reports collisions") {
    const auto space = fx::plane({5.0}, {});
    const auto env = fx::box(10.0, {Box2{{3.9, 0.0}, {4.1, 10.0}}});
    std::mt19937_64 rng(59);
    const auto fb = plan_task(line_task(1.0, 9.0), *space, env, {.max_iterations = 300}, rng);
    CHECK_FALSE(fb.success);
    CHECK_FALSE(fb.path);
    int robot = 0;
    for (const auto& s : fb.samples) robot += s.tag == ValidityTag::RobotInvalid;
    CHECK(robot > 0);
}

TEST_CASE("paths on a line leaf are short, dense and valid") {
    const auto space = fx::plane({5.0}, {});
    const auto env = fx::box();
    const MotionPlannerConfig cfg;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(seed);
        const Task task = line_task(1.0, 9.0);
        const auto fb = plan_task(task, *space, env, cfg, rng);
        REQUIRE(fb.success);
        const auto& path = *fb.path;
        CHECK(path.front() == task.start_config);
        CHECK(path.back() == task.goal_config);
        CHECK(fb.path_length <= 1.5 * 8.0);
        CHECK(fb.path_length == doctest::Approx(path_length(path)));
        for (std::size_t k = 0; k < path.size(); ++k) {
            CHECK(check_validity(path[k], task.leaf, *space, env) == ValidityTag::Valid);
            if (k == 0) continue;
            CHECK((path[k] - path[k - 1]).norm() <= cfg.step_size * (1.0 + 1e-9));
            const Configuration mid = 0.5 * (path[k] + path[k - 1]);
            const auto proj = space->project(mid, task.leaf);
            REQUIRE(proj);
            CHECK(check_validity(*proj, task.leaf, *space, env) == ValidityTag::Valid);
        }
    }
}

TEST_CASE("recorded tags agree with a recheck") {
    const auto space = fx::plane({5.0}, {5.0});
    const auto env = fx::box(10.0, {Disc2{{5.0, 5.0}, 1.0}, Box2{{2.0, 4.0}, {2.5, 6.0}}});
    Task task;
    task.leaf = {1, 0};
    task.start_config = vec({5.0, 1.0});
    task.goal_config = vec({5.0, 9.0});
    std::mt19937_64 rng(61);
    const auto fb = plan_task(task, *space, env, {.max_iterations = 200}, rng);
    REQUIRE(fb.samples.size() > 10);
    for (const auto& s : fb.samples) CHECK(check_validity(s.config, task.leaf, *space, env) == s.tag);
}

TEST_CASE("planning is deterministic per seed") {
    const auto space = fx::plane({5.0}, {});
    const auto env = fx::box(10.0, {Disc2{{2.0, 8.0}, 1.0}});
    const Task task = line_task(1.0, 9.0, {fx::component(0, 5.0, 5.0)});
    std::mt19937_64 a(67), b(67);
    const auto fa = plan_task(task, *space, env, {}, a);
    const auto fb = plan_task(task, *space, env, {}, b);
    REQUIRE(fa.samples.size() == fb.samples.size());
    for (std::size_t k = 0; k < fa.samples.size(); ++k) {
        CHECK(fa.samples[k].config == fb.samples[k].config);
        CHECK(fa.samples[k].tag == fb.samples[k].tag);
    }
    CHECK(fa.path == fb.path);
}
