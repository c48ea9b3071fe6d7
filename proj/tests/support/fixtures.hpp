// Small hand-built worlds shared by the unit tests.
//
// The plane fixture has two foliations of straight lines: foliation 0 holds
// horizontal lines y = b, foliation 1 vertical lines x = a. Every horizontal
// leaf meets every vertical leaf at (a, b), which makes witnesses trivial.

#pragma once

#include <memory>
#include <random>
#include <vector>

#include "frm/atlas.hpp"
#include "frm/environment.hpp"
#include "frm/foliation.hpp"
#include "frm/problem.hpp"
#include "frm/repmap.hpp"

namespace fx {

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double x : v) out[k++] = x;
    return out;
}

inline std::vector<frm::CoParameter> scalars(const std::vector<double>& values) {
    std::vector<frm::CoParameter> out;
    for (std::size_t k = 0; k < values.size(); ++k) out.push_back({"p" + std::to_string(k), vec({values[k]})});
    return out;
}

inline std::shared_ptr<const frm::FoliatedSpace> plane(const std::vector<double>& ys, const std::vector<double>& xs,
                                                       double bandwidth = 1.0, double tolerance = 1e-6) {
    std::vector<frm::Foliation> f;
    f.emplace_back("horizontal", frm::ConstraintFamily(frm::CoordinateConstraint{1}, tolerance), scalars(ys), bandwidth);
    if (!xs.empty())
        f.emplace_back("vertical", frm::ConstraintFamily(frm::CoordinateConstraint{0}, tolerance), scalars(xs), bandwidth);
    return std::make_shared<frm::FoliatedSpace>(2, std::move(f));
}

inline frm::Environment box(double size = 10.0, std::vector<frm::Shape> obstacles = {}) {
    return frm::Environment(vec({0.0, 0.0}), vec({size, size}), frm::RobotBody{0, 1, 0.05}, std::nullopt,
                            std::move(obstacles));
}

inline frm::GaussianComponent component(int id, double x, double y, double var = 0.5, double weight = 1.0) {
    return {id, vec({x, y}), Eigen::MatrixXd::Identity(2, 2) * var, weight};
}

/// Witness at the crossing of horizontal leaf h and vertical leaf v.
inline frm::IntersectionWitness crossing(const frm::FoliatedSpace& s, int h, int v) {
    const double y = s.foliation(0).co_parameters()[static_cast<std::size_t>(h)].value[0];
    const double x = s.foliation(1).co_parameters()[static_cast<std::size_t>(v)].value[0];
    return {{0, h}, {1, v}, vec({x, y})};
}

/// A random map with one horizontal and one vertical leaf, k components,
/// random base edges, up to `max_witnesses` witnesses and random counts.
inline frm::FoliatedRepMap random_map(std::mt19937_64& rng, int k, int max_witnesses, std::uint64_t max_count = 6) {
    std::uniform_real_distribution<double> coord(0.5, 9.5);
    const double y = coord(rng), x = coord(rng);
    auto space = plane({y}, {x});
    frm::BaseRoadmap base;
    for (int j = 0; j < k; ++j) {
        base.components.push_back(component(j, coord(rng), coord(rng), 0.5, 1.0 / k));
        base.source_ids.push_back(j);
    }
    std::bernoulli_distribution coin(0.5);
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            if (coin(rng)) base.edges.emplace_back(a, b);
    std::vector<frm::IntersectionWitness> witnesses;
    const int n_w = std::uniform_int_distribution<int>(0, max_witnesses)(rng);
    // The leaves cross at one point, so extra witnesses add parallel edges.
    for (int w = 0; w < n_w; ++w) witnesses.push_back(crossing(*space, 0, 0));
    auto map = frm::FoliatedRepMap::instantiate(base, space, witnesses, box());
    frm::MapState state = map.state();
    std::uniform_int_distribution<std::uint64_t> count(0, max_count);
    for (auto& c : state.nodes) c = {count(rng), count(rng) / 2, count(rng) / 3};
    for (auto& r : state.robot_invalid) r = count(rng) / 2;
    state.samples_ingested = 0;
    for (const auto& c : state.nodes) state.samples_ingested += c.valid + c.object_invalid + c.const_invalid;
    for (auto r : state.robot_invalid) state.samples_ingested += r;
    map.restore(state);
    return map;
}

/// Problem on the plane fixture with every horizontal/vertical crossing
/// registered as a witness.
inline frm::Problem plane_problem(std::shared_ptr<const frm::FoliatedSpace> space, frm::LeafConfiguration start,
                                  frm::LeafConfiguration goal, std::vector<frm::Shape> obstacles = {},
                                  bool witnesses = true) {
    frm::Problem p;
    p.name = "plane";
    p.space = space;
    p.env = std::make_shared<frm::Environment>(box(10.0, std::move(obstacles)));
    if (witnesses && space->foliations().size() > 1)
        for (int h = 0; h < space->foliation(0).size(); ++h)
            for (int v = 0; v < space->foliation(1).size(); ++v) p.witnesses.push_back(crossing(*space, h, v));
    p.start = std::move(start);
    p.goal = std::move(goal);
    return p;
}

/// A 3 x 3 grid of components covering the box, linked to their 4-neighbours.
inline frm::BaseRoadmap grid_roadmap() {
    frm::BaseRoadmap base;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            const int id = r * 3 + c;
            base.components.push_back(component(id, 5.0 / 3.0 + c * 10.0 / 3.0, 5.0 / 3.0 + r * 10.0 / 3.0, 1.5, 1.0 / 9));
            base.source_ids.push_back(id);
        }
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            const int id = r * 3 + c;
            if (c < 2) base.edges.emplace_back(id, id + 1);
            if (r < 2) base.edges.emplace_back(id, id + 3);
        }
    return base;
}

}  // namespace fx
