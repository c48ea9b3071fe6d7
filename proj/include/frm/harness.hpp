// The plan / split / motion-plan / ingest loop, benchmark batteries and their
// CSV artifacts.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frm/mdp.hpp"
#include "frm/motion.hpp"
#include "frm/mtg.hpp"
#include "frm/problem.hpp"
#include "frm/repmap.hpp"

namespace frm {

enum class TaskPlannerKind { Mtg, Mdp };

struct PlannerVariant {
    TaskPlannerKind planner = TaskPlannerKind::Mtg;
    /// false selects the baseline: empty distribution lists, no ingestion,
    /// static uniform weights or probabilities.
    bool with_frm = true;

    [[nodiscard]] std::string name() const;
    static PlannerVariant from_string(const std::string& name);
    friend bool operator==(const PlannerVariant&, const PlannerVariant&) = default;
};

/// MTG+FRM, MTG baseline, MDP+FRM, MDP baseline.
std::vector<PlannerVariant> all_variants();

enum class FailureReason { None, TimeoutLoops, NoPath };
std::string to_string(FailureReason reason);

struct HarnessConfig {
    MtgParams mtg{};
    MdpParams mdp{};
    MotionPlannerConfig motion{};
    int max_loops = 100;
    /// Pseudo-count scale for init_weights.
    double kappa = 10.0;
    std::map<int, double> init_scores;
    /// Recheck every waypoint of every successful task against its leaf.
    bool verify_paths = true;
    /// Counts carried over from an earlier query (FRM variants only).
    std::optional<MapState> warm_start;

    void validate() const;
};

/// Harness defaults: the motion planner is bounded by its iteration cap
/// rather than the clock, and value iteration runs to near machine precision.
HarnessConfig default_harness_config();

struct TaskLog {
    LeafId leaf;
    bool success = false;
    std::array<std::uint64_t, kValidityTagCount> tag_counts{};
    std::size_t distributions = 0;
    double path_length = 0.0;
};

struct LoopLog {
    Route route;
    std::vector<TaskLog> tasks;
    bool success = false;
};

struct RunRecord {
    std::string problem;
    std::uint64_t seed = 0;
    PlannerVariant variant;
    bool success = false;
    FailureReason failure = FailureReason::None;
    int loops_used = 0;
    double wall_time = 0.0;
    double task_planning_time = 0.0;
    double motion_planning_time = 0.0;
    double total_path_length = 0.0;
    std::uint64_t samples_total = 0;
    std::uint64_t samples_ingested = 0;
    std::uint64_t count_mass = 0;
    /// Waypoints of successful tasks that failed the recheck.
    std::uint64_t path_violations = 0;
    std::vector<LoopLog> loops;
    /// Tasks and paths of the successful sequence.
    std::vector<Task> solution_tasks;
    std::vector<Trajectory> solution_paths;
};

/// Seeds C_robot_invalid^j priors of (1 - score_j) * kappa. Throws
/// ConfigError for scores outside [0, 1] or unknown distribution ids.
void init_weights(FoliatedRepMap& map, const std::map<int, double>& scores, double kappa);

/// Runs one query on a fresh copy of `map_template` (counts reset). Throws
/// QueryRejected when start or goal is not Valid on its leaf. When
/// `final_map` is given it receives the map after the last loop.
RunRecord run_query(const Problem& problem, const FoliatedRepMap& map_template, const PlannerVariant& variant,
                    std::uint64_t seed, const HarnessConfig& config, FoliatedRepMap* final_map = nullptr);

struct BatteryConfig {
    Category category = Category::Simple;
    BenchmarkOptions benchmark{};
    std::vector<PlannerVariant> variants = all_variants();
    int n_runs = 50;
    std::uint64_t seed0 = 1;
    /// 0 uses the hardware concurrency.
    int threads = 0;
    HarnessConfig harness = default_harness_config();
};

struct VariantSummary {
    PlannerVariant variant;
    int runs = 0;
    int successes = 0;
    double success_rate = 0.0;
    /// Over successful runs; nullopt when there are none.
    std::optional<double> mean_distance;
    double mean_loops = 0.0;
    double median_time = 0.0;
    double mean_time = 0.0;
};

struct BatteryResult {
    /// Ordered by (seed, variant position).
    std::vector<RunRecord> records;
    std::vector<VariantSummary> summary;
};

BatteryResult run_battery(const BatteryConfig& config, const BaseRoadmap& roadmap);

std::vector<VariantSummary> summarize(const std::vector<RunRecord>& records, const std::vector<PlannerVariant>& variants);

/// Deterministic per-run fields only.
std::string runs_csv(const std::vector<RunRecord>& records);
/// Wall-clock fields, kept apart so runs.csv stays byte-reproducible.
std::string timings_csv(const std::vector<RunRecord>& records);
/// success_rate, mean_distance, mean_loops per variant.
std::string summary_csv(const std::vector<VariantSummary>& summary);
std::string timing_summary_csv(const std::vector<VariantSummary>& summary);

struct CsvRun {
    std::string problem;
    std::uint64_t seed = 0;
    std::string variant;
    bool success = false;
    std::string failure;
    int loops_used = 0;
    double total_path_length = 0.0;
};

/// Parses runs_csv output; throws LoadError on malformed rows.
std::vector<CsvRun> read_runs_csv(const std::string& text);

/// Round-trip-exact decimal rendering used in every CSV.
std::string format_double(double v);

}  // namespace frm
