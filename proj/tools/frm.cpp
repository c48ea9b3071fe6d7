// Command-line entry point: build-atlas, make-problem, plan, battery, inspect.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "frm/atlas.hpp"
#include "frm/harness.hpp"
#include "frm/io.hpp"
#include "frm/plot.hpp"
#include "frm/problem.hpp"

namespace fs = std::filesystem;
using namespace frm;

namespace {

struct Common {
    std::string output_dir = "frm_out";
};

fs::path out_path(const Common& c, const std::string& file) {
    const fs::path p(file);
    return p.is_absolute() ? p : fs::path(c.output_dir) / p;
}

void add_harness_flags(CLI::App* app, HarnessConfig& h) {
    app->add_option("--rho", h.motion.rho, "Probability of sampling from the distribution list")->capture_default_str();
    app->add_option("--step", h.motion.step_size, "Motion planner step size")->capture_default_str();
    app->add_option("--time-budget", h.motion.time_budget, "Motion planner wall-clock budget per task (s)")->capture_default_str();
    app->add_option("--max-iterations", h.motion.max_iterations, "Motion planner iterations per task")->capture_default_str();
    app->add_option("--goal-bias", h.motion.goal_bias, "Motion planner goal bias")->capture_default_str();
    app->add_option("--projection-iters", h.motion.projection.max_iters, "Projection Newton iterations")->capture_default_str();
    app->add_option("--projection-radius", h.motion.projection.max_distance, "Largest displacement a sample projection may apply")->capture_default_str();
    app->add_option("--v-minus", h.mtg.v_minus, "MTG small penalty")->capture_default_str();
    app->add_option("--v-plus", h.mtg.v_plus, "MTG large penalty")->capture_default_str();
    app->add_option("--goal-reward", h.mdp.goal_reward, "MDP goal reward")->capture_default_str();
    app->add_option("--deadend-penalty", h.mdp.deadend_penalty, "MDP dead-end penalty")->capture_default_str();
    app->add_option("--gamma", h.mdp.discount, "MDP discount")->capture_default_str();
    app->add_option("--vi-tolerance", h.mdp.vi_tolerance, "Value iteration tolerance")->capture_default_str();
    app->add_option("--vi-max-iters", h.mdp.vi_max_iters, "Value iteration sweep cap")->capture_default_str();
    app->add_option("--max-loops", h.max_loops, "Loop cap per query")->capture_default_str();
    app->add_option("--kappa", h.kappa, "Pseudo-count scale for initialization scores")->capture_default_str();
}

std::map<int, double> load_scores(const std::string& path) {
    const auto doc = parse_json(read_file(path), path);
    std::map<int, double> scores;
    if (!doc.is_object()) throw LoadError(path + ": expected an object mapping distribution id to score");
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_number()) throw LoadError(path + ": at /" + key + ": expected a number");
        try {
            scores[std::stoi(key)] = value.get<double>();
        } catch (const std::invalid_argument&) {
            throw LoadError(path + ": at /" + key + ": keys must be distribution ids");
        }
    }
    return scores;
}

BaseRoadmap roadmap_or_build(const std::string& path, const AtlasConfig& atlas) {
    if (!path.empty()) return load_roadmap(path);
    std::cerr << "building atlas (" << atlas.dataset.n_pairs << " trajectories)...\n";
    return build_atlas(desk_environment(), atlas).roadmap;
}

void print_roadmap_stats(const BaseRoadmap& r) {
    std::vector<int> degree(static_cast<std::size_t>(r.size()), 0);
    for (const auto& [a, b] : r.edges) {
        ++degree[static_cast<std::size_t>(a)];
        ++degree[static_cast<std::size_t>(b)];
    }
    const auto [mn, mx] = std::minmax_element(degree.begin(), degree.end());
    std::cout << "components: " << r.size() << "\nedges: " << r.edges.size() << "\ndimension: " << r.dimension() << "\n";
    if (!degree.empty()) std::cout << "degree min/max: " << *mn << "/" << *mx << "\n";
}

void print_loops(const RunRecord& r, const FoliatedRepMap& map) {
    for (std::size_t k = 0; k < r.loops.size(); ++k) {
        const auto& loop = r.loops[k];
        std::cout << "loop " << k + 1 << ": " << loop.route.nodes.size() << " nodes, leaves";
        LeafId last{-1, -1};
        for (int n : loop.route.nodes) {
            const LeafId l = map.node_leaf(n);
            if (l != last) std::cout << ' ' << to_string(l);
            last = l;
        }
        std::cout << "\n";
        for (const auto& t : loop.tasks) {
            std::cout << "  task " << to_string(t.leaf) << (t.success ? " ok" : " FAIL") << " dists " << t.distributions
                      << " tags";
            for (auto c : t.tag_counts) std::cout << ' ' << c;
            std::cout << " length " << t.path_length << "\n";
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Foliated repetition roadmap task and motion planner"};
    app.require_subcommand(1);
    Common common;
    if (const char* env = std::getenv("FRM_OUTPUT_DIR")) common.output_dir = env;
    app.add_option("--output-dir", common.output_dir, "Directory for output files (env FRM_OUTPUT_DIR)");

    // build-atlas
    AtlasConfig atlas;
    std::string atlas_out = "roadmap.json";
    std::string atlas_plot;
    auto* build = app.add_subcommand("build-atlas", "Generate a trajectory dataset, fit the GMM and write the roadmap");
    build->add_option("--pairs", atlas.dataset.n_pairs, "Trajectories in the dataset")->capture_default_str();
    build->add_option("--seed", atlas.dataset.seed, "Dataset seed")->capture_default_str();
    build->add_option("--k-min", atlas.clustering.k_min, "Smallest component count")->capture_default_str();
    build->add_option("--k-max", atlas.clustering.k_max, "Largest component count")->capture_default_str();
    build->add_option("--k-step", atlas.clustering.k_step, "Spacing of candidate component counts")->capture_default_str();
    build->add_option("--em-iters", atlas.clustering.max_iters, "EM sweeps per fit")->capture_default_str();
    build->add_option("--tau-edge", atlas.tau_edge, "Votes needed for an edge")->capture_default_str();
    build->add_option("--out", atlas_out, "Roadmap file")->capture_default_str();
    build->add_option("--plot", atlas_plot, "Optional SVG of the distributions");

    // make-problem
    std::string category_name = "crossing";
    std::uint64_t problem_seed = 1;
    BenchmarkOptions bench;
    std::string problem_out = "problem.json";
    auto* make = app.add_subcommand("make-problem", "Write a generated benchmark problem to a file");
    make->add_option("--category", category_name, "simple, sequential or crossing")->capture_default_str();
    make->add_option("--seed", problem_seed, "Generator seed")->capture_default_str();
    make->add_option("--density", bench.obstacle_density, "Obstacle density (simple only)");
    make->add_option("--grasps", bench.grasps, "Grasp leaves")->capture_default_str();
    make->add_option("--regrasps", bench.regrasp_placements, "Crossing re-grasp placements (1 or 2)")->capture_default_str();
    make->add_option("--out", problem_out, "Problem file")->capture_default_str();

    // plan
    HarnessConfig plan_cfg = default_harness_config();
    std::string plan_roadmap, plan_problem, plan_variant = "mtg_frm", map_in, map_out, scores_file, plan_plot;
    std::uint64_t plan_seed = 1;
    bool verbose = false;
    auto* plan = app.add_subcommand("plan", "Run a single query");
    plan->add_option("--roadmap", plan_roadmap, "Roadmap file (built on the fly when omitted)");
    plan->add_option("--problem", plan_problem, "Problem file (otherwise --category/--problem-seed)");
    plan->add_option("--category", category_name, "Benchmark category when no problem file is given")->capture_default_str();
    plan->add_option("--problem-seed", problem_seed, "Benchmark seed when no problem file is given")->capture_default_str();
    plan->add_option("--variant", plan_variant, "mtg_frm, mtg_baseline, mdp_frm or mdp_baseline")->capture_default_str();
    plan->add_option("--seed", plan_seed, "Planner seed")->capture_default_str();
    plan->add_option("--map-in", map_in, "Warm-start counts from a map-state file");
    plan->add_option("--map-out", map_out, "Write the final map state");
    plan->add_option("--init-scores", scores_file, "JSON object of distribution id -> score in [0, 1]");
    plan->add_option("--plot", plan_plot, "Optional SVG of the solution");
    plan->add_flag("--verbose", verbose, "Print the per-loop log");
    add_harness_flags(plan, plan_cfg);

    // battery
    BatteryConfig battery;
    std::string battery_roadmap, battery_variants, battery_plot, battery_scores;
    auto* bat = app.add_subcommand("battery", "Run a benchmark battery and write CSV results");
    bat->add_option("--category", category_name, "simple, sequential or crossing")->capture_default_str();
    bat->add_option("--runs", battery.n_runs, "Runs per variant")->capture_default_str();
    bat->add_option("--seed0", battery.seed0, "Seed of the first run")->capture_default_str();
    bat->add_option("--threads", battery.threads, "Worker threads (0 = hardware)")->capture_default_str();
    bat->add_option("--variants", battery_variants, "Comma-separated variants (default all four)");
    bat->add_option("--roadmap", battery_roadmap, "Roadmap file (built on the fly when omitted)");
    bat->add_option("--density", battery.benchmark.obstacle_density, "Obstacle density (simple only)");
    bat->add_option("--grasps", battery.benchmark.grasps, "Grasp leaves")->capture_default_str();
    bat->add_option("--regrasps", battery.benchmark.regrasp_placements, "Crossing re-grasp placements")->capture_default_str();
    bat->add_option("--init-scores", battery_scores, "JSON object of distribution id -> score in [0, 1]");
    bat->add_option("--plot", battery_plot, "Optional SVG of the success rates");
    add_harness_flags(bat, battery.harness);

    // inspect
    std::string inspect_roadmap, inspect_problem;
    auto* inspect = app.add_subcommand("inspect", "Print roadmap and problem statistics");
    inspect->add_option("--roadmap", inspect_roadmap, "Roadmap file")->required();
    inspect->add_option("--problem", inspect_problem, "Problem file to instantiate against");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*build) {
            const Atlas a = build_atlas(desk_environment(), atlas);
            save_roadmap(out_path(common, atlas_out), a.roadmap);
            std::cout << "trajectories: " << a.dataset.trajectories.size() << "\nwaypoints: " << a.dataset.waypoint_count()
                      << "\nselected K: " << a.fit.chosen_k << "\n";
            print_roadmap_stats(a.roadmap);
            if (!atlas_plot.empty()) {
                const Problem p = make_benchmark(Category::Simple, 0);
                write_file(out_path(common, atlas_plot), render_svg(p, &a.roadmap));
            }
            std::cout << "wrote " << out_path(common, atlas_out).string() << "\n";
        } else if (*make) {
            const Problem p = make_benchmark(category_from_string(category_name), problem_seed, bench);
            save_problem(out_path(common, problem_out), p);
            std::cout << "wrote " << out_path(common, problem_out).string() << "\n";
        } else if (*plan) {
            const BaseRoadmap roadmap = roadmap_or_build(plan_roadmap, atlas);
            const Problem problem = plan_problem.empty() ? make_benchmark(category_from_string(category_name), problem_seed)
                                                         : load_problem(plan_problem);
            FoliatedRepMap map = FoliatedRepMap::instantiate(roadmap, problem);
            if (!map_in.empty()) {
                FoliatedRepMap warm = map;
                map_state_from_json(parse_json(read_file(map_in), map_in), warm, map_in);
                plan_cfg.warm_start = warm.state();
            }
            if (!scores_file.empty()) plan_cfg.init_scores = load_scores(scores_file);
            FoliatedRepMap final_map = map;
            const RunRecord r = run_query(problem, map, PlannerVariant::from_string(plan_variant), plan_seed, plan_cfg, &final_map);
            if (verbose) print_loops(r, final_map);
            std::cout << "problem: " << r.problem << "\nvariant: " << r.variant.name() << "\nsuccess: " << (r.success ? "yes" : "no")
                      << "\nfailure: " << to_string(r.failure) << "\nloops: " << r.loops_used
                      << "\npath length: " << format_double(r.total_path_length) << "\ntasks: " << r.solution_tasks.size()
                      << "\nwall time: " << r.wall_time << " s\n";
            if (!map_out.empty()) write_file(out_path(common, map_out), map_state_to_json(final_map).dump() + "\n");
            if (!plan_plot.empty()) write_file(out_path(common, plan_plot), render_svg(problem, &roadmap, r.solution_paths));
            return r.success ? 0 : 2;
        } else if (*bat) {
            battery.category = category_from_string(category_name);
            if (!battery_variants.empty()) {
                battery.variants.clear();
                std::stringstream ss(battery_variants);
                for (std::string v; std::getline(ss, v, ',');) battery.variants.push_back(PlannerVariant::from_string(v));
            }
            if (!battery_scores.empty()) battery.harness.init_scores = load_scores(battery_scores);
            const BaseRoadmap roadmap = roadmap_or_build(battery_roadmap, atlas);
            const BatteryResult result = run_battery(battery, roadmap);
            write_file(out_path(common, "runs.csv"), runs_csv(result.records));
            write_file(out_path(common, "summary.csv"), summary_csv(result.summary));
            write_file(out_path(common, "timings.csv"), timings_csv(result.records));
            write_file(out_path(common, "timing_summary.csv"), timing_summary_csv(result.summary));
            std::vector<std::pair<std::string, double>> rates;
            for (const auto& s : result.summary) {
                std::cout << s.variant.name() << ": success " << s.successes << "/" << s.runs << ", mean loops "
                          << s.mean_loops << ", median time " << s.median_time << " s";
                if (s.mean_distance) std::cout << ", mean distance " << *s.mean_distance;
                std::cout << "\n";
                rates.emplace_back(s.variant.name(), s.success_rate);
            }
            if (!battery_plot.empty())
                write_file(out_path(common, battery_plot), render_success_svg(rates, category_name + " battery"));
            std::cout << "wrote results to " << common.output_dir << "\n";
        } else if (*inspect) {
            const BaseRoadmap roadmap = load_roadmap(inspect_roadmap);
            print_roadmap_stats(roadmap);
            if (!inspect_problem.empty()) {
                const Problem problem = load_problem(inspect_problem);
                const FoliatedRepMap map = FoliatedRepMap::instantiate(roadmap, problem);
                int intersections = 0;
                for (const auto& e : map.edges()) intersections += e.kind == EdgeKind::Intersection;
                std::cout << "problem: " << problem.name << "\nfoliations: " << problem.space->foliations().size()
                          << "\nleaves: " << problem.space->leaves().size() << "\nwitnesses: " << problem.witnesses.size()
                          << "\nmap nodes: " << map.node_count() << "\nmap edges: " << map.edge_count()
                          << " (" << intersections << " intersection)\n";
            }
        }
    } catch (const LoadError& e) {
        std::cerr << "load error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
