#include <doctest.h>

#include <map>

#include "frm/harness.hpp"
#include "frm/io.hpp"
#include "support/fixtures.hpp"

using namespace frm;
using fx::vec;

namespace {

HarnessConfig quick_config() {
    HarnessConfig c = default_harness_config();
    c.max_loops = 5;
    return c;
}

/// A small atlas over the free desk, shared by the battery tests.
const BaseRoadmap& desk_roadmap() {
    static const BaseRoadmap roadmap = [] {
        AtlasConfig cfg;
        cfg.dataset.n_pairs = 30;
        cfg.clustering = {.k_min = 8, .k_max = 8, .max_iters = 60};
        return build_atlas(desk_environment(), cfg).roadmap;
    }();
    return roadmap;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const LoadError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("variant names round-trip") {
    for (const auto& v : all_variants()) CHECK(PlannerVariant::from_string(v.name()) == v);
    CHECK(all_variants().size() == 4);
    CHECK_THROWS_AS(PlannerVariant::from_string("astar"), ConfigError);
}

TEST_CASE("a query inside one open leaf succeeds on the first loop") {
    const auto space = fx::plane({5.0}, {});
    const auto p = fx::plane_problem(space, {{0, 0}, vec({1.0, 5.0})}, {{0, 0}, vec({9.0, 5.0})});
    const auto map = FoliatedRepMap::instantiate(fx::grid_roadmap(), p);
    for (const auto& v : all_variants()) {
        CAPTURE(v.name());
        const auto r = run_query(p, map, v, 1, quick_config());
        CHECK(r.success);
        CHECK(r.loops_used == 1);
        CHECK(r.failure == FailureReason::None);
        CHECK(r.path_violations == 0);
        CHECK(r.solution_paths.size() == r.solution_tasks.size());
        CHECK(r.total_path_length >= 8.0 - 1e-9);
        if (v.with_frm) {
            CHECK(r.samples_ingested == r.samples_total);
            CHECK(r.count_mass == r.samples_ingested);
        } else {
            CHECK(r.samples_ingested == 0);
            CHECK(r.count_mass == 0);
        }
    }
}

TEST_CASE("without witnesses a cross-foliation goal has no path") {
    const auto space = fx::plane({5.0}, {5.0});
    const auto p = fx::plane_problem(space, {{0, 0}, vec({1.0, 5.0})}, {{1, 0}, vec({5.0, 9.0})}, {}, false);
    const auto map = FoliatedRepMap::instantiate(fx::grid_roadmap(), p);
    for (const auto& v : all_variants()) {
        const auto r = run_query(p, map, v, 1, quick_config());
        CHECK_FALSE(r.success);
        CHECK(r.failure == FailureReason::NoPath);
        CHECK(r.loops_used == 1);
        CHECK(r.samples_total == 0);
    }
}

TEST_CASE("crossing foliations through a witness takes two tasks") {
    const auto space = fx::plane({5.0}, {5.0});
    const auto p = fx::plane_problem(space, {{0, 0}, vec({1.0, 5.0})}, {{1, 0}, vec({5.0, 9.0})});
    const auto map = FoliatedRepMap::instantiate(fx::grid_roadmap(), p);
    const auto r = run_query(p, map, {TaskPlannerKind::Mtg, true}, 3, quick_config());
    REQUIRE(r.success);
    CHECK(r.solution_tasks.size() == 2);
    CHECK(r.solution_paths.back().back() == p.goal.config);
}

TEST_CASE("queries with invalid endpoints are rejected") {
    const auto space = fx::plane({5.0}, {});
    const auto p = fx::plane_problem(space, {{0, 0}, vec({1.0, 5.0})}, {{0, 0}, vec({9.0, 5.0})}, {Disc2{{9.0, 5.0}, 0.5}});
    const auto map = FoliatedRepMap::instantiate(fx::grid_roadmap(), p);
    CHECK_THROWS_AS(run_query(p, map, {}, 1, quick_config()), QueryRejected);
}

TEST_CASE("init_weights seeds robot-invalid priors") {
    const auto space = fx::plane({5.0}, {});
    auto map = FoliatedRepMap::instantiate(fx::grid_roadmap(), space, {}, fx::box());
    init_weights(map, {{0, 1.0}, {3, 0.25}, {8, 0.0}}, 10.0);
    CHECK(map.robot_invalid(0) == 0.0);
    CHECK(map.robot_invalid(3) == doctest::Approx(7.5));
    CHECK(map.robot_invalid(8) == doctest::Approx(10.0));
    CHECK(map.count_mass() == 0);
    CHECK_THROWS_AS(init_weights(map, {{1, 1.5}}, 10.0), ConfigError);
    CHECK_THROWS_AS(init_weights(map, {{9, 0.5}}, 10.0), ConfigError);
    CHECK_THROWS_AS(init_weights(map, {}, -1.0), ConfigError);
}

TEST_CASE("warm start carries counts into FRM variants only") {
    const auto space = fx::plane({5.0}, {});
    const auto p = fx::plane_problem(space, {{0, 0}, vec({1.0, 5.0})}, {{0, 0}, vec({9.0, 5.0})});
    const auto map = FoliatedRepMap::instantiate(fx::grid_roadmap(), p);
    auto cfg = quick_config();
    FoliatedRepMap after = map;
    const auto first = run_query(p, map, {TaskPlannerKind::Mtg, true}, 5, cfg, &after);
    cfg.warm_start = after.state();
    const auto second = run_query(p, map, {TaskPlannerKind::Mtg, true}, 5, cfg);
    CHECK(second.samples_ingested == first.samples_ingested + second.samples_total);
    const auto base = run_query(p, map, {TaskPlannerKind::Mtg, false}, 5, cfg);
    CHECK(base.count_mass == 0);
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 12345.678901234567, 1e-300})
        CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("batteries are reproducible and summaries follow from the runs") {
    BatteryConfig cfg;
    cfg.category = Category::Simple;
    cfg.n_runs = 2;
    cfg.threads = 2;
    cfg.harness.max_loops = 10;
    const auto a = run_battery(cfg, desk_roadmap());
    cfg.threads = 1;
    const auto b = run_battery(cfg, desk_roadmap());
    REQUIRE(a.records.size() == 8);
    CHECK(runs_csv(a.records) == runs_csv(b.records));
    CHECK(summary_csv(a.summary) == summary_csv(b.summary));
    CHECK(a.records[0].seed == 1);
    CHECK(a.records[4].seed == 2);
    CHECK(a.records[1].variant == all_variants()[1]);

    const auto rows = read_runs_csv(runs_csv(a.records));
    REQUIRE(rows.size() == a.records.size());
    for (const auto& s : a.summary) {
        int runs = 0, ok = 0;
        double dist = 0.0, loops = 0.0;
        for (const auto& r : rows) {
            if (r.variant != s.variant.name()) continue;
            ++runs;
            loops += r.loops_used;
            if (r.success) {
                ++ok;
                dist += r.total_path_length;
            }
        }
        CHECK(s.runs == runs);
        CHECK(s.successes == ok);
        CHECK(s.success_rate == doctest::Approx(static_cast<double>(ok) / runs));
        CHECK(s.mean_loops == doctest::Approx(loops / runs));
        if (ok > 0) {
            REQUIRE(s.mean_distance);
            CHECK(*s.mean_distance == doctest::Approx(dist / ok));
        }
    }
    CHECK_THROWS_AS(read_runs_csv("h\n1,2,3\n"), LoadError);
}

TEST_CASE("problem JSON round-trips") {
    for (auto c : {Category::Simple, Category::Sequential, Category::Crossing}) {
        const auto p = make_benchmark(c, 4);
        const auto doc = problem_to_json(p);
        const auto q = problem_from_json(parse_json(doc.dump(), "mem"));
        CHECK(problem_to_json(q).dump() == doc.dump());
        CHECK(q.witnesses.size() == p.witnesses.size());
        CHECK(q.start.config == p.start.config);
    }
}

TEST_CASE("roadmap JSON round-trips") {
    const auto rm = fx::grid_roadmap();
    const auto back = roadmap_from_json(parse_json(roadmap_to_json(rm).dump(), "mem"));
    REQUIRE(back.size() == rm.size());
    CHECK(back.edges == rm.edges);
    for (int j = 0; j < rm.size(); ++j) {
        CHECK(back.components[static_cast<std::size_t>(j)].mean == rm.components[static_cast<std::size_t>(j)].mean);
        CHECK(back.components[static_cast<std::size_t>(j)].covariance == rm.components[static_cast<std::size_t>(j)].covariance);
    }
}

TEST_CASE("map state JSON round-trips") {
    std::mt19937_64 rng(71);
    auto map = fx::random_map(rng, 5, 2, 20);
    map.set_robot_invalid_prior(1, 2.5);
    const auto doc = map_state_to_json(map);
    auto copy = map;
    copy.reset_counts();
    map_state_from_json(parse_json(doc.dump(), "mem"), copy);
    CHECK(copy.state() == map.state());

    auto wrong = doc;
    wrong["nodes"] = 3;
    CHECK_THROWS_AS(map_state_from_json(wrong, copy), LoadError);
}

TEST_CASE("load errors carry a location") {
    const auto syntax = message_of([] { (void)parse_json("{\n  \"a\": ,\n}", "bad.json"); });
    CHECK(syntax.rfind("bad.json:2:", 0) == 0);

    auto doc = problem_to_json(make_benchmark(Category::Simple, 1));
    doc.erase("start");
    const auto missing = message_of([&] { (void)problem_from_json(doc, "p.json"); });
    CHECK(missing.find("p.json") != std::string::npos);
    CHECK(missing.find("start") != std::string::npos);

    CHECK_THROWS_AS(load_problem("/nonexistent/problem.json"), LoadError);
}
