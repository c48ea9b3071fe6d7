#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "frm/mtg.hpp"
#include "support/fixtures.hpp"

using namespace frm;
using fx::vec;

namespace {

// Two parallel horizontal leaves half a unit apart, one component row each.
FoliatedRepMap twin_leaf_map() {
    BaseRoadmap base;
    for (int j = 0; j < 3; ++j) {
        base.components.push_back(fx::component(j, 2.0 + 3.0 * j, 2.0, 0.5, 1.0 / 3));
        base.source_ids.push_back(j);
    }
    base.edges = {{0, 1}, {1, 2}};
    return FoliatedRepMap::instantiate(base, fx::plane({2.0, 2.5}, {}), {}, fx::box());
}

/// Minimum weight over every simple path, by depth-first enumeration.
double brute_force_min(const Topology& g, int s, int t, const std::vector<double>& w) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> on(static_cast<std::size_t>(g.node_count), 0);
    std::function<void(int, double)> dfs = [&](int u, double acc) {
        if (u == t) {
            best = std::min(best, acc);
            return;
        }
        on[static_cast<std::size_t>(u)] = 1;
        for (const auto& [v, e] : g.adjacency[static_cast<std::size_t>(u)])
            if (!on[static_cast<std::size_t>(v)]) dfs(v, acc + w[static_cast<std::size_t>(e)]);
        on[static_cast<std::size_t>(u)] = 0;
    };
    dfs(s, 0.0);
    return best;
}

}  // namespace

TEST_CASE("node score examples") {
    auto map = twin_leaf_map();
    const double S = std::exp(-0.25);
    REQUIRE(map.space().foliation(0).similarity(0, 1) == doctest::Approx(S));
    const MtgParams params;

    // Three valid samples and one object collision in leaf 0, component 0.
    for (int k = 0; k < 3; ++k) map.ingest_sample({0, 0}, vec({2.0, 2.0}), ValidityTag::Valid);
    map.ingest_sample({0, 0}, vec({2.1, 2.0}), ValidityTag::ObjectInvalid);
    CHECK(compute_node_score(map, 0, params) == doctest::Approx(53.0));
    CHECK(compute_node_score(map, 3, params) == doctest::Approx(53.0 * S));

    // A shared robot collision adds v+ to every leaf's copy.
    map.ingest_sample({1, 0}, vec({2.0, 2.0}), ValidityTag::RobotInvalid);
    CHECK(compute_node_score(map, 0, params) == doctest::Approx(103.0));
    CHECK(compute_node_score(map, 3, params) == doctest::Approx(53.0 * S + 50.0));

    CHECK(compute_node_score(map, 1, params) == 0.0);
    map.ingest_sample({0, 1}, vec({5.0, 2.5}), ValidityTag::Valid);
    map.ingest_sample({0, 1}, vec({5.0, 2.5}), ValidityTag::Valid);
    CHECK(compute_node_score(map, 4, params) == doctest::Approx(2.0));
    CHECK(compute_node_score(map, 1, params) == doctest::Approx(2.0 * S));
}

TEST_CASE("edge weight sums its endpoint scores") {
    auto map = twin_leaf_map();
    const MtgParams params;
    map.ingest_sample({0, 0}, vec({2.0, 2.0}), ValidityTag::ConstraintInvalid);
    for (int k = 0; k < 3; ++k) map.ingest_sample({0, 0}, vec({2.0, 2.0}), ValidityTag::Valid);
    map.ingest_sample({0, 0}, vec({5.0, 2.0}), ValidityTag::Valid);
    map.ingest_sample({0, 0}, vec({5.0, 2.0}), ValidityTag::Valid);
    // Node 0 scores 50 + 3, node 1 scores 2.
    CHECK(edge_weight(map, 0, params) == doctest::Approx(55.0));
    const auto w = edge_weights(map, params);
    for (int e = 0; e < map.edge_count(); ++e) CHECK(w[static_cast<std::size_t>(e)] == doctest::Approx(edge_weight(map, e, params)));
}

TEST_CASE("MTG penalties are validated") {
    CHECK_THROWS_AS((MtgParams{0.0, 50.0}.validate()), ConfigError);
    CHECK_THROWS_AS((MtgParams{5.0, 5.0}.validate()), ConfigError);
    CHECK_NOTHROW(MtgParams{}.validate());
}

TEST_CASE("shortest route corner cases") {
    const auto g = Topology::from_edges(3, {{0, 1}, {1, 2}});
    const std::vector<double> w{1.0, 1.0};
    const auto same = shortest_route(g, 1, 1, w);
    REQUIRE(same);
    CHECK(same->nodes == std::vector<int>{1});
    CHECK(same->edges.empty());
    CHECK_FALSE(shortest_route(Topology::from_edges(3, {{0, 1}}), 0, 2, std::vector<double>{1.0}));
    CHECK_THROWS_AS((void)shortest_route(g, 0, 2, std::vector<double>{1.0, -1.0}), ContractViolation);
    CHECK_THROWS_AS((void)shortest_route(g, 0, 2, std::vector<double>{1.0}), ContractViolation);
    CHECK_THROWS_AS((void)shortest_route(g, 0, 5, w), ContractViolation);
}

TEST_CASE("equal weights prefer fewer edges, then smaller node sequences") {
    // 0-1-2-3 costs 5 + 5 + 5; 0-4-5-6-7-3 costs 3 * 5.
    const auto g = Topology::from_edges(8, {{0, 1}, {1, 2}, {2, 3}, {0, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 3}});
    const std::vector<double> w{5, 5, 5, 3, 3, 3, 3, 3};
    const auto r = shortest_route(g, 0, 3, w);
    REQUIRE(r);
    CHECK(r->nodes == std::vector<int>{0, 1, 2, 3});
    CHECK(route_weight(*r, w) == 15.0);

    const auto diamond = Topology::from_edges(4, {{0, 2}, {2, 3}, {0, 1}, {1, 3}});
    const auto d = shortest_route(diamond, 0, 3, std::vector<double>{1, 1, 1, 1});
    REQUIRE(d);
    CHECK(d->nodes == std::vector<int>{0, 1, 3});
    CHECK(d->edges == std::vector<int>{2, 3});
}

TEST_CASE("parallel edges: the cheaper copy is used") {
    const auto g = Topology::from_edges(2, {{0, 1}, {0, 1}});
    const auto r = shortest_route(g, 0, 1, std::vector<double>{4.0, 2.0});
    REQUIRE(r);
    CHECK(r->edges == std::vector<int>{1});
}

TEST_CASE("Dijkstra matches exhaustive path enumeration") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> weight(0.0, 10.0);
    std::bernoulli_distribution coin(0.35);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = std::uniform_int_distribution<int>(2, 8)(rng);
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (coin(rng)) edges.emplace_back(a, b);
        const auto g = Topology::from_edges(n, edges);
        std::vector<double> w;
        for (std::size_t e = 0; e < edges.size(); ++e) w.push_back(std::round(weight(rng)));
        const double expect = brute_force_min(g, 0, n - 1, w);
        const auto r = shortest_route(g, 0, n - 1, w);
        CAPTURE(trial);
        if (std::isinf(expect)) {
            CHECK_FALSE(r);
            continue;
        }
        REQUIRE(r);
        CHECK(r->nodes.front() == 0);
        CHECK(r->nodes.back() == n - 1);
        CHECK(route_weight(*r, w) == doctest::Approx(expect));
    }
}

TEST_CASE("invalid evidence never makes an edge cheaper") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    const MtgParams params;
    for (int trial = 0; trial < 30; ++trial) {
        auto map = fx::random_map(rng, 5, 2);
        const auto before = edge_weights(map, params);
        const LeafId leaf = map.space().leaves()[static_cast<std::size_t>(trial % 2)];
        const auto tag = static_cast<ValidityTag>(1 + trial % 3);
        map.ingest_sample(leaf, vec({u(rng), u(rng)}), tag);
        const auto after = edge_weights(map, params);
        for (std::size_t e = 0; e < before.size(); ++e) CHECK(after[e] >= before[e]);
    }
}

TEST_CASE("an invalid sample in a similar leaf raises an edge by 2 S v+") {
    auto map = twin_leaf_map();
    const MtgParams params;
    const double S = map.space().foliation(0).similarity(0, 1);
    // Edge 0 joins components 0 and 1 of leaf (0, 0).
    const double before = edge_weight(map, 0, params);
    map.ingest_sample({0, 1}, vec({2.0, 2.5}), ValidityTag::ObjectInvalid);
    map.ingest_sample({0, 1}, vec({5.0, 2.5}), ValidityTag::ConstraintInvalid);
    CHECK(edge_weight(map, 0, params) - before == doctest::Approx(2.0 * S * params.v_plus));
}

TEST_CASE("plan_sequence_mtg routes around penalized nodes") {
    const auto space = fx::plane({2.0}, {});
    const auto map0 = FoliatedRepMap::instantiate(fx::grid_roadmap(), space, {}, fx::box());
    auto map = map0;
    // Component 1 sits between 0 and 2 on the bottom row.
    map.ingest_sample({0, 0}, vec({5.0, 1.67}), ValidityTag::ObjectInvalid);
    const auto r = plan_sequence_mtg(map, 0, 2, {});
    REQUIRE(r);
    CHECK(std::find(r->nodes.begin(), r->nodes.end(), 1) == r->nodes.end());
    const auto direct = plan_sequence_mtg(map0, 0, 2, {});
    REQUIRE(direct);
    CHECK(direct->nodes == std::vector<int>{0, 1, 2});
}
