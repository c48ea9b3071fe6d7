// Planning problems and the desk-scale benchmark generators.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "frm/environment.hpp"
#include "frm/foliation.hpp"

namespace frm {

enum class Category { Simple, Sequential, Crossing, Custom };

std::string_view to_string(Category c);
Category category_from_string(std::string_view name);

struct LeafConfiguration {
    LeafId leaf;
    Configuration config;
};

struct Problem {
    std::string name;
    Category category = Category::Custom;
    std::shared_ptr<const FoliatedSpace> space;
    std::shared_ptr<const Environment> env;
    std::vector<IntersectionWitness> witnesses;
    LeafConfiguration start;
    LeafConfiguration goal;

    /// Witness and start/goal consistency checks; throws LoadError.
    void validate() const;
};

struct BenchmarkOptions {
    /// Random disc obstacles per unit workspace area; < 0 keeps the category default.
    double obstacle_density = -1.0;
    int grasps = 12;
    /// Intermediate re-grasp placements in the crossing maze (1 or 2).
    int regrasp_placements = 2;
};

/// Desk dimensions shared by every benchmark: x, y in [0, 10], grasp angle in [-pi, pi].
Environment desk_environment(std::vector<Shape> robot_obstacles = {}, std::vector<Shape> object_obstacles = {});

/// Deterministic for a fixed (category, seed, options).
Problem make_benchmark(Category category, std::uint64_t seed, const BenchmarkOptions& options = {});

}  // namespace frm
