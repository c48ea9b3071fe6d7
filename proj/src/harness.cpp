#include "frm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>
#include <mutex>
#include <sstream>
#include <thread>

namespace frm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::uint64_t recheck_path(const Trajectory& path, const LeafId& leaf, const Problem& problem) {
    std::uint64_t bad = 0;
    for (const auto& q : path)
        if (problem.space->evaluate_constraint(q, leaf) > problem.space->tolerance(leaf) ||
            check_validity(q, leaf, *problem.space, *problem.env) != ValidityTag::Valid)
            ++bad;
    return bad;
}

}  // namespace

std::string PlannerVariant::name() const {
    return std::string(planner == TaskPlannerKind::Mtg ? "mtg" : "mdp") + (with_frm ? "_frm" : "_baseline");
}

PlannerVariant PlannerVariant::from_string(const std::string& name) {
    for (const auto& v : all_variants())
        if (v.name() == name) return v;
    throw ConfigError("unknown planner variant '" + name + "' (expected mtg_frm, mtg_baseline, mdp_frm or mdp_baseline)");
}

std::vector<PlannerVariant> all_variants() {
    return {{TaskPlannerKind::Mtg, true}, {TaskPlannerKind::Mtg, false}, {TaskPlannerKind::Mdp, true}, {TaskPlannerKind::Mdp, false}};
}

std::string to_string(FailureReason reason) {
    switch (reason) {
        case FailureReason::None: return "none";
        case FailureReason::TimeoutLoops: return "timeout-loops";
        case FailureReason::NoPath: return "no-path";
    }
    return "none";
}

void HarnessConfig::validate() const {
    mtg.validate();
    mdp.validate();
    motion.validate();
    if (max_loops < 1 || max_loops > 100) throw ConfigError("max_loops must lie in [1, 100]");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be finite and non-negative");
}

HarnessConfig default_harness_config() {
    HarnessConfig c;
    c.motion.time_budget = 60.0;
    c.mdp.vi_tolerance = 1e-13;
    // Only the ratio of goal reward to dead-end penalty shapes the policy; a
    // mild penalty keeps low-probability routes to the goal worth more than
    // idling on certain edges.
    c.mdp.deadend_penalty = -1e-6;
    return c;
}

void init_weights(FoliatedRepMap& map, const std::map<int, double>& scores, double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be finite and non-negative");
    for (const auto& [j, score] : scores) {
        if (!(score >= 0.0 && score <= 1.0)) throw ConfigError("initialization score for distribution " + std::to_string(j) + " lies outside [0, 1]");
        if (j < 0 || j >= map.distributions()) throw ConfigError("initialization score names unknown distribution " + std::to_string(j));
    }
    for (const auto& [j, score] : scores) map.set_robot_invalid_prior(j, (1.0 - score) * kappa);
}

RunRecord run_query(const Problem& problem, const FoliatedRepMap& map_template, const PlannerVariant& variant,
                    std::uint64_t seed, const HarnessConfig& config, FoliatedRepMap* final_map) {
    config.validate();
    for (const auto* lc : {&problem.start, &problem.goal}) {
        const ValidityTag tag = check_validity(lc->config, lc->leaf, *problem.space, *problem.env);
        if (tag != ValidityTag::Valid)
            throw QueryRejected(std::string(lc == &problem.start ? "start" : "goal") + " configuration is " +
                                std::string(to_string(tag)));
    }
    FoliatedRepMap map = map_template;
    map.reset_counts();
    if (variant.with_frm && config.warm_start) map.restore(*config.warm_start);
    if (variant.with_frm) init_weights(map, config.init_scores, config.kappa);
    const auto [start_node, goal_node] =
        map.attach_start_goal(problem.start.config, problem.start.leaf, problem.goal.config, problem.goal.leaf);

    RunRecord rec;
    rec.problem = problem.name;
    rec.seed = seed;
    rec.variant = variant;
    std::mt19937_64 rng(seed);
    const std::vector<double> uniform_weights(map.edges().size(), 1.0);
    const std::vector<double> uniform_probabilities(map.edges().size(), 0.5);

    for (int loop = 1; loop <= config.max_loops; ++loop) {
        rec.loops_used = loop;
        auto t0 = Clock::now();
        std::optional<Route> route;
        if (variant.planner == TaskPlannerKind::Mtg) {
            route = variant.with_frm ? plan_sequence_mtg(map, start_node, goal_node, config.mtg)
                                     : shortest_route(map.topology(), start_node, goal_node, uniform_weights);
        } else {
            route = variant.with_frm ? plan_sequence_mdp(map, start_node, goal_node, config.mdp)
                                     : plan_route_mdp(map.topology(), start_node, goal_node, uniform_probabilities, config.mdp);
        }
        rec.task_planning_time += seconds_since(t0);
        if (!route) {
            rec.failure = FailureReason::NoPath;
            break;
        }
        auto tasks = map.split_into_tasks(*route, problem.start.config, problem.goal.config);
        if (!variant.with_frm)
            for (auto& t : tasks) t.distribution_list.clear();

        LoopLog log;
        log.route = *route;
        std::vector<Trajectory> paths;
        bool all_ok = true;
        for (const auto& task : tasks) {
            t0 = Clock::now();
            PlannerFeedback fb = plan_task(task, *problem.space, *problem.env, config.motion, rng);
            rec.motion_planning_time += seconds_since(t0);
            TaskLog tl;
            tl.leaf = task.leaf;
            tl.success = fb.success;
            tl.distributions = task.distribution_list.size();
            tl.path_length = fb.path_length;
            for (const auto& s : fb.samples) ++tl.tag_counts[static_cast<std::size_t>(s.tag)];
            rec.samples_total += fb.samples.size();
            if (fb.success && config.verify_paths) rec.path_violations += recheck_path(*fb.path, task.leaf, problem);
            if (variant.with_frm) map.ingest_feedback(task, fb);
            log.tasks.push_back(tl);
            if (!fb.success) {
                all_ok = false;
                break;
            }
            paths.push_back(std::move(*fb.path));
        }
        log.success = all_ok;
        rec.loops.push_back(std::move(log));
        if (all_ok) {
            rec.success = true;
            for (const auto& p : paths) rec.total_path_length += path_length(p);
            rec.solution_tasks = std::move(tasks);
            rec.solution_paths = std::move(paths);
            break;
        }
        if (loop == config.max_loops) rec.failure = FailureReason::TimeoutLoops;
    }
    rec.wall_time = rec.task_planning_time + rec.motion_planning_time;
    rec.samples_ingested = map.samples_ingested();
    rec.count_mass = map.count_mass();
    if (final_map) *final_map = std::move(map);
    return rec;
}

BatteryResult run_battery(const BatteryConfig& config, const BaseRoadmap& roadmap) {
    config.harness.validate();
    if (config.n_runs < 1) throw ConfigError("n_runs must be at least 1");
    if (config.variants.empty()) throw ConfigError("at least one planner variant is required");
    const auto n_runs = static_cast<std::size_t>(config.n_runs);
    const std::size_t n_var = config.variants.size();

    std::vector<Problem> problems;
    std::vector<FoliatedRepMap> maps;
    for (std::size_t k = 0; k < n_runs; ++k) {
        problems.push_back(make_benchmark(config.category, config.seed0 + k, config.benchmark));
        maps.push_back(FoliatedRepMap::instantiate(roadmap, problems.back()));
    }

    BatteryResult result;
    result.records.resize(n_runs * n_var);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t job; (job = next.fetch_add(1)) < result.records.size();) {
            const std::size_t run = job / n_var, v = job % n_var;
            try {
                result.records[job] = run_query(problems[run], maps[run], config.variants[v], config.seed0 + run, config.harness);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    int threads = config.threads > 0 ? config.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min<int>(threads, static_cast<int>(result.records.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    result.summary = summarize(result.records, config.variants);
    return result;
}

std::vector<VariantSummary> summarize(const std::vector<RunRecord>& records, const std::vector<PlannerVariant>& variants) {
    std::vector<VariantSummary> out;
    for (const auto& v : variants) {
        VariantSummary s;
        s.variant = v;
        std::vector<double> times;
        double distance = 0.0, loops = 0.0;
        for (const auto& r : records) {
            if (!(r.variant == v)) continue;
            ++s.runs;
            times.push_back(r.wall_time);
            loops += r.loops_used;
            if (r.success) {
                ++s.successes;
                distance += r.total_path_length;
            }
        }
        if (s.runs > 0) {
            s.success_rate = static_cast<double>(s.successes) / s.runs;
            s.mean_loops = loops / s.runs;
            s.mean_time = std::accumulate(times.begin(), times.end(), 0.0) / s.runs;
            std::sort(times.begin(), times.end());
            const std::size_t m = times.size() / 2;
            s.median_time = times.size() % 2 ? times[m] : 0.5 * (times[m - 1] + times[m]);
        }
        if (s.successes > 0) s.mean_distance = distance / s.successes;
        out.push_back(s);
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string runs_csv(const std::vector<RunRecord>& records) {
    std::ostringstream out;
    out << "# schema: frm-runs/1\n";
    out << "problem,seed,variant,success,failure,loops_used,total_path_length,tasks,samples_total,samples_ingested,count_mass\n";
    for (const auto& r : records) {
        out << r.problem << ',' << r.seed << ',' << r.variant.name() << ',' << (r.success ? 1 : 0) << ','
            << to_string(r.failure) << ',' << r.loops_used << ',' << format_double(r.total_path_length) << ','
            << r.solution_tasks.size() << ',' << r.samples_total << ',' << r.samples_ingested << ',' << r.count_mass << '\n';
    }
    return out.str();
}

std::string timings_csv(const std::vector<RunRecord>& records) {
    std::ostringstream out;
    out << "# schema: frm-timings/1\n";
    out << "problem,seed,variant,wall_time,task_planning_time,motion_planning_time\n";
    for (const auto& r : records)
        out << r.problem << ',' << r.seed << ',' << r.variant.name() << ',' << format_double(r.wall_time) << ','
            << format_double(r.task_planning_time) << ',' << format_double(r.motion_planning_time) << '\n';
    return out.str();
}

std::string summary_csv(const std::vector<VariantSummary>& summary) {
    std::ostringstream out;
    out << "# schema: frm-summary/1\n";
    out << "variant,runs,successes,success_rate,mean_distance,mean_loops\n";
    for (const auto& s : summary)
        out << s.variant.name() << ',' << s.runs << ',' << s.successes << ',' << format_double(s.success_rate) << ','
            << (s.mean_distance ? format_double(*s.mean_distance) : "") << ',' << format_double(s.mean_loops) << '\n';
    return out.str();
}

std::string timing_summary_csv(const std::vector<VariantSummary>& summary) {
    std::ostringstream out;
    out << "# schema: frm-timing-summary/1\n";
    out << "variant,median_time,mean_time\n";
    for (const auto& s : summary)
        out << s.variant.name() << ',' << format_double(s.median_time) << ',' << format_double(s.mean_time) << '\n';
    return out.str();
}

std::vector<CsvRun> read_runs_csv(const std::string& text) {
    std::vector<CsvRun> rows;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
        if (f.size() != 11) throw LoadError("runs csv line " + std::to_string(line_no) + ": expected 11 fields");
        try {
            rows.push_back({f[0], std::stoull(f[1]), f[2], f[3] == "1", f[4], std::stoi(f[5]), std::stod(f[6])});
        } catch (const std::exception&) {
            throw LoadError("runs csv line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return rows;
}

}  // namespace frm
