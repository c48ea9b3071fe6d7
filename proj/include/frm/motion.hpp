// Constrained bidirectional RRT with distribution-biased sampling.

#pragma once

#include <cstdint>
#include <random>

#include "frm/environment.hpp"
#include "frm/repmap.hpp"

namespace frm {

struct MotionPlannerConfig {
    /// Probability of drawing from the task's distribution list.
    double rho = 0.5;
    double step_size = 0.2;
    /// Wall-clock budget per task, in seconds.
    double time_budget = 2.0;
    /// Tree-growth iterations per task; bounds work independently of the clock.
    int max_iterations = 1500;
    double goal_bias = 0.05;
    ProjectionOptions projection{};
    int shortcut_attempts = 50;

    /// Throws ConfigError when any field is out of range.
    void validate() const;
};

/// Raw draw before projection: a Gaussian from a uniformly chosen list
/// component with probability rho, otherwise uniform over the bounds. An
/// empty list always samples uniformly.
Configuration sample_biased(const Task& task, const MotionPlannerConfig& cfg, const Environment& env,
                            std::mt19937_64& rng);

double path_length(const Trajectory& path);

PlannerFeedback plan_task(const Task& task, const FoliatedSpace& space, const Environment& env,
                          const MotionPlannerConfig& cfg, std::mt19937_64& rng);

}  // namespace frm
