#include <doctest.h>

#include <cmath>
#include <numbers>

#include "frm/environment.hpp"
#include "frm/io.hpp"
#include "frm/problem.hpp"
#include "support/fixtures.hpp"
#include "support/grid_oracle.hpp"

using namespace frm;
using fx::vec;

namespace {

// x, y, heading; the hand carries a cup 0.5 ahead.
Environment carry_env(std::vector<Shape> robot_obs, std::vector<Shape> object_obs) {
    return Environment(vec({0.0, 0.0, -std::numbers::pi}), vec({10.0, 10.0, std::numbers::pi}), RobotBody{0, 1, 0.1},
                       ObjectModel{2, 0.5, 0.2}, std::move(robot_obs), std::move(object_obs));
}

std::shared_ptr<const FoliatedSpace> heading_space() {
    std::vector<Foliation> f;
    f.emplace_back("heading", ConstraintFamily(CoordinateConstraint{2}, 1e-6), fx::scalars({0.0, 1.0}));
    return std::make_shared<FoliatedSpace>(3, std::move(f));
}

}  // namespace

TEST_CASE("clearance of discs against shapes") {
    const Shape b = Box2{{1.0, 1.0}, {2.0, 2.0}};
    CHECK(clearance(b, {3.0, 1.5}, 0.5) == doctest::Approx(0.5));
    CHECK(clearance(b, {1.5, 1.5}, 0.1) == doctest::Approx(-0.6));
    const Shape d = Disc2{{0.0, 0.0}, 1.0};
    CHECK(clearance(d, {3.0, 4.0}, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("check_validity examples and precedence") {
    const auto s = heading_space();
    const auto env = carry_env({Box2{{4.0, 4.0}, {5.0, 5.0}}}, {Box2{{4.0, 4.0}, {5.0, 5.0}}});
    const LeafId leaf{0, 0};
    CHECK(check_validity(vec({4.5, 4.5, 0.0}), leaf, *s, env) == ValidityTag::RobotInvalid);
    CHECK(check_validity(vec({2.0, 2.0, 0.3}), leaf, *s, env) == ValidityTag::ConstraintInvalid);
    CHECK(check_validity(vec({2.0, 2.0, 0.0}), leaf, *s, env) == ValidityTag::Valid);
    // Hand clear, cup inside the box.
    CHECK(check_validity(vec({3.6, 4.5, 0.0}), leaf, *s, env) == ValidityTag::ObjectInvalid);
    // Cup in the box and off the leaf: the collision wins.
    CHECK(check_validity(vec({3.6, 4.5, 0.01}), leaf, *s, env) == ValidityTag::ObjectInvalid);
    // Out of bounds counts as a robot collision.
    CHECK(check_validity(vec({-0.1, 2.0, 0.0}), leaf, *s, env) == ValidityTag::RobotInvalid);
    CHECK(check_validity(vec({2.0, 2.0, std::nan("")}), leaf, *s, env) == ValidityTag::RobotInvalid);
    // The cup leaving the desk is an object collision.
    CHECK(check_validity(vec({9.6, 5.0, 0.0}), leaf, *s, env) == ValidityTag::ObjectInvalid);
    CHECK_THROWS_AS(check_validity(vec({1.0, 1.0}), leaf, *s, env), ContractViolation);
}

TEST_CASE("object obstacles only stop the object") {
    const auto s = heading_space();
    const auto env = carry_env({}, {Box2{{4.0, 4.0}, {5.0, 5.0}}});
    CHECK(check_validity(vec({4.5, 4.5, 1.0}), {0, 1}, *s, env) == ValidityTag::ObjectInvalid);
    CHECK(check_validity(vec({4.5, 2.5, 0.0}), {0, 0}, *s, env) == ValidityTag::Valid);
}

TEST_CASE("environment rejects bad geometry") {
    CHECK_THROWS_AS(Environment(vec({0.0, 0.0}), vec({0.0, 1.0})), ConfigError);
    CHECK_THROWS_AS(Environment(vec({0.0, 0.0}), vec({1.0, 1.0}), {}, std::nullopt, {Box2{{0.5, 0.5}, {1.5, 0.8}}}),
                    ConfigError);
    CHECK_THROWS_AS(Environment(vec({0.0, 0.0}), vec({1.0, 1.0}), RobotBody{0, 2, 0.1}), ConfigError);
}

TEST_CASE("benchmarks are deterministic per seed") {
    for (auto c : {Category::Simple, Category::Sequential, Category::Crossing}) {
        const auto a = make_benchmark(c, 7), b = make_benchmark(c, 7);
        CHECK(problem_to_json(a).dump() == problem_to_json(b).dump());
        CHECK(problem_to_json(a).dump() != problem_to_json(make_benchmark(c, 8)).dump());
    }
}

TEST_CASE("benchmark generator contracts") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto simple = make_benchmark(Category::Simple, seed);
        CHECK(simple.space->foliations().size() == 2);
        CHECK(simple.space->foliation(1).size() == 2);

        const auto crossing = make_benchmark(Category::Crossing, seed);
        CHECK(crossing.space->foliations().size() >= 2);
        CHECK(crossing.space->leaves().size() >= 4);
        CHECK(crossing.witnesses.size() >= 3);

        const auto seq = make_benchmark(Category::Sequential, seed);
        CHECK(seq.start.leaf != seq.goal.leaf);

        for (const auto* p : {&simple, &crossing, &seq}) {
            CHECK(check_validity(p->start.config, p->start.leaf, *p->space, *p->env) == ValidityTag::Valid);
            CHECK(check_validity(p->goal.config, p->goal.leaf, *p->space, *p->env) == ValidityTag::Valid);
            for (const auto& w : p->witnesses) {
                CHECK(w.leaf_a.foliation != w.leaf_b.foliation);
                CHECK(check_validity(w.config, w.leaf_a, *p->space, *p->env) == ValidityTag::Valid);
                CHECK(check_validity(w.config, w.leaf_b, *p->space, *p->env) == ValidityTag::Valid);
            }
        }
    }
    CHECK_THROWS_AS(make_benchmark(Category::Custom, 1), ConfigError);
    CHECK_THROWS_AS(make_benchmark(Category::Crossing, 1, {.regrasp_placements = 3}), ConfigError);
    CHECK_THROWS_AS(category_from_string("maze"), ConfigError);
}

TEST_CASE("obstacle density adds discs to the simple desk") {
    const auto bare = make_benchmark(Category::Simple, 3);
    const auto dense = make_benchmark(Category::Simple, 3, {.obstacle_density = 0.05});
    CHECK(bare.env->robot_obstacles().empty());
    CHECK(dense.env->robot_obstacles().size() > 0);
}

TEST_CASE("grid oracle: every generated problem is solvable") {
    for (auto c : {Category::Simple, Category::Sequential, Category::Crossing})
        for (std::uint64_t seed = 1; seed <= 12; ++seed) {
            const auto p = make_benchmark(c, seed);
            CAPTURE(p.name);
            CHECK(oracle::analyze(p).solvable);
        }
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto dense = make_benchmark(Category::Simple, seed, {.obstacle_density = 0.03});
        CAPTURE(dense.name);
        CHECK(oracle::analyze(dense).solvable);
    }
}

TEST_CASE("grid oracle: sequential problems need a re-grasp") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto p = make_benchmark(Category::Sequential, seed);
        const int last = p.space->foliation(1).size() - 1;
        const auto a = oracle::analyze(p);
        CAPTURE(p.name);
        // No grasp leaf joins the start placement to the goal placement.
        CHECK(a.grasps_joining.count({0, last}) == 0);
        CHECK(a.solvable);
    }
}

TEST_CASE("grid oracle: crossing blocks a strict subset of grasps") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto p = make_benchmark(Category::Crossing, seed);
        const int last = p.space->foliation(1).size() - 1;
        const auto a = oracle::analyze(p);
        CAPTURE(p.name);
        REQUIRE(a.grasps_joining.count({0, last}) == 1);
        const auto& through = a.grasps_joining.at({0, last});
        CHECK(!through.empty());
        CHECK(static_cast<int>(through.size()) < p.space->foliation(0).size());
    }
}
