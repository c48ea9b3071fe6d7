// SVG rendering of a problem's workspace with roadmap distributions.

#pragma once

#include <string>
#include <vector>

#include "frm/atlas.hpp"
#include "frm/problem.hpp"

namespace frm {

/// Top-down view: obstacles, 2-sigma xy ellipses of every component, the
/// start and goal robot positions and any given paths.
std::string render_svg(const Problem& problem, const BaseRoadmap* roadmap, const std::vector<Trajectory>& paths = {});

/// Bar chart of per-variant success rates for one battery.
std::string render_success_svg(const std::vector<std::pair<std::string, double>>& rates, const std::string& title);

}  // namespace frm
