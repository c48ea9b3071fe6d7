#include <doctest.h>

#include <cmath>
#include <random>

#include "frm/foliation.hpp"
#include "support/fixtures.hpp"

using namespace frm;
using fx::vec;

namespace {

std::shared_ptr<const FoliatedSpace> circle_space() {
    std::vector<Foliation> f;
    f.emplace_back("circle", ConstraintFamily(RadialConstraint{{0, 1}, vec({0.0, 0.0})}, 1e-6),
                   fx::scalars({1.0, 2.0}));
    f.emplace_back("height", ConstraintFamily(CoordinateConstraint{1}, 1e-6), fx::scalars({0.0, 0.5}));
    return std::make_shared<FoliatedSpace>(2, std::move(f));
}

}  // namespace

TEST_CASE("evaluate_constraint examples") {
    const auto s = circle_space();
    CHECK(s->evaluate_constraint(vec({1.0, 0.0}), {0, 0}) == doctest::Approx(0.0));
    CHECK(s->evaluate_constraint(vec({2.0, 0.0}), {0, 0}) == doctest::Approx(1.0));
    CHECK(s->evaluate_constraint(vec({3.0, 0.5}), {1, 1}) == 0.0);
    CHECK_THROWS_AS((void)s->evaluate_constraint(vec({1.0, 0.0, 0.0}), {0, 0}), ContractViolation);
}

TEST_CASE("projection examples") {
    const auto s = circle_space();
    const Configuration on = vec({0.6, 0.8});
    CHECK(*s->project(on, {0, 0}) == on);

    const auto r = s->project(vec({2.0, 0.0}), {0, 0});
    REQUIRE(r);
    CHECK((*r - vec({1.0, 0.0})).norm() < 1e-6);

    const auto h = s->project(vec({3.25, 0.7}), {1, 0});
    REQUIRE(h);
    CHECK((*h)[0] == doctest::Approx(3.25));
    CHECK(std::abs((*h)[1]) <= 1e-6);

    CHECK_THROWS_AS((void)s->project(on, {0, 0}, {.max_iters = 0}), ContractViolation);
    // The circle's centre has a singular Jacobian.
    CHECK_FALSE(s->project(vec({0.0, 0.0}), {0, 0}));
}

TEST_CASE("projection honours the displacement bound") {
    const auto s = circle_space();
    CHECK_FALSE(s->project(vec({3.0, 0.0}), {0, 0}, {.max_distance = 1.0}));
    CHECK(s->project(vec({1.5, 0.0}), {0, 0}, {.max_distance = 1.0}));
}

TEST_CASE("projection is idempotent and lands on the leaf") {
    const auto s = circle_space();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int projected = 0;
    for (int k = 0; k < 200; ++k) {
        const Configuration q = vec({u(rng), u(rng)});
        for (const LeafId leaf : {LeafId{0, 0}, LeafId{0, 1}, LeafId{1, 1}}) {
            const auto p = s->project(q, leaf);
            if (!p) continue;
            ++projected;
            CHECK(s->evaluate_constraint(*p, leaf) <= 1e-6);
            const auto again = s->project(*p, leaf);
            REQUIRE(again);
            CHECK((*again - *p).norm() < 1e-6);
        }
    }
    CHECK(projected > 500);
}

TEST_CASE("attached point constraint and its Jacobian") {
    const ConstraintFamily c(AttachedPointConstraint{0, 1, 2, 0.8}, 1e-6);
    const Configuration q = vec({1.0, 2.0, 0.3});
    const auto f = c.value(q);
    CHECK(f[0] == doctest::Approx(1.0 + 0.8 * std::cos(0.3)));
    CHECK(f[1] == doctest::Approx(2.0 + 0.8 * std::sin(0.3)));
    const Eigen::MatrixXd J = c.jacobian(q);
    const double h = 1e-7;
    for (int k = 0; k < 3; ++k) {
        Configuration qp = q, qm = q;
        qp[k] += h;
        qm[k] -= h;
        const Eigen::VectorXd col = (c.value(qp) - c.value(qm)) / (2 * h);
        CHECK((J.col(k) - col).norm() < 1e-6);
    }
    CHECK_THROWS_AS(ConstraintFamily(AttachedPointConstraint{0, 1, 2, -1.0}, 1e-6), ConfigError);
    CHECK_THROWS_AS(ConstraintFamily(CoordinateConstraint{0}, 0.0), ConfigError);
}

TEST_CASE("similarity kernel examples") {
    const auto a = vec({0.0, 0.0});
    CHECK(similarity_kernel(a, a, 0.7) == 1.0);
    CHECK(similarity_kernel(a, vec({0.7, 0.0}), 0.7) == doctest::Approx(std::exp(-1.0)));
    const double far = similarity_kernel(a, vec({1e6, 0.0}), 0.7);
    CHECK(far >= 0.0);
    CHECK(far < 1e-300);
}

TEST_CASE("similarity matrix is symmetric with unit diagonal") {
    std::vector<CoParameter> cps;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int k = 0; k < 9; ++k) cps.push_back({"c" + std::to_string(k), vec({n(rng)})});
    const Foliation f("f", ConstraintFamily(CoordinateConstraint{0}, 1e-6), cps);
    CHECK(f.bandwidth() == doctest::Approx(median_pairwise_distance(cps)));
    const auto& S = f.similarity_matrix();
    for (int a = 0; a < f.size(); ++a) {
        CHECK(S(a, a) == 1.0);
        for (int b = 0; b < f.size(); ++b) {
            CHECK(S(a, b) == S(b, a));
            CHECK(S(a, b) >= 0.0);
            CHECK(S(a, b) <= 1.0);
        }
    }
}

TEST_CASE("median pairwise distance") {
    CHECK(median_pairwise_distance(fx::scalars({0.0, 1.0, 3.0})) == doctest::Approx(2.0));
    CHECK(median_pairwise_distance(fx::scalars({4.0})) == 1.0);
}

TEST_CASE("foliation rejects empty or duplicate co-parameters") {
    const ConstraintFamily c(CoordinateConstraint{0}, 1e-6);
    CHECK_THROWS_AS(Foliation("f", c, {}), ConfigError);
    CHECK_THROWS_AS(Foliation("f", c, fx::scalars({1.0, 1.0})), ConfigError);
}

TEST_CASE("leaves are enumerated in lexicographic order") {
    const auto s = fx::plane({1.0, 2.0}, {3.0, 4.0, 5.0});
    REQUIRE(s->leaves().size() == 5);
    CHECK(s->leaves()[2] == LeafId{1, 0});
    CHECK(s->leaf_index({1, 2}) == 4);
    CHECK_FALSE(s->contains({2, 0}));
    CHECK_THROWS_AS((void)s->leaf_index({0, 2}), ContractViolation);
}

TEST_CASE("witness validation") {
    const auto s = fx::plane({1.0}, {3.0});
    CHECK_NOTHROW(s->validate_witness(fx::crossing(*s, 0, 0)));
    CHECK_THROWS_AS(s->validate_witness({{0, 0}, {0, 0}, vec({3.0, 1.0})}), LoadError);
    CHECK_THROWS_AS(s->validate_witness({{0, 0}, {1, 0}, vec({3.0, 1.2})}), LoadError);
    CHECK_THROWS_AS(s->validate_witness({{0, 0}, {1, 5}, vec({3.0, 1.0})}), LoadError);
}
