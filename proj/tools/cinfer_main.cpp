#include "cinfer/demo_sampler.hpp"
#include "cinfer/gridworld.hpp"
#include "cinfer/inference.hpp"
#include "cinfer/io.hpp"
#include "cinfer/oracle.hpp"
#include "cinfer/soft_bellman.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace cinfer;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_usage = 2;

int cmd_synthesize(const std::string& spec_path, std::uint64_t seed, int n,
                   const std::string& out_dir) {
    const GridSpec spec = io::load_gridspec(spec_path);
    GridworldModel world = build_gridworld(spec);
    const DemonstrationSet demos =
        sample_demonstrations(world.mdp, world.ground_truth, world.start_state, n, seed);

    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    io::save_mdp(world.mdp, (out / "mdp.json").string());
    io::save_constraints(world.ground_truth, (out / "ground_truth.json").string());
    io::save_demos(demos, (out / "demos.json").string());
    io::save_mapping(world.mapping, (out / "mapping.json").string());
    std::cout << "wrote mdp.json, ground_truth.json, demos.json, mapping.json to " << out_dir
              << " (" << n << " trajectories, " << demos.meta.abort_count << " aborted)\n";
    return exit_ok;
}

int cmd_infer(const std::string& mdp_path, const std::string& demos_path, int max_iters,
              double stop_gain, std::optional<double> fixed_psi, bool dump_values,
              const std::string& out_dir) {
    const Mdp mdp = io::load_mdp(mdp_path);
    const auto violations = validate_mdp(mdp);
    if (!violations.empty()) {
        for (const Violation& v : violations) std::cerr << mdp_path << ": " << v.describe() << '\n';
        return exit_validation;
    }
    const DemonstrationSet demos = io::load_demos(demos_path);
    if (demos.horizon != mdp.horizon()) {
        std::cerr << demos_path << ": demonstration horizon " << demos.horizon
                  << " does not match MDP horizon " << mdp.horizon() << '\n';
        return exit_validation;
    }
    try {
        for (const Trajectory& traj : demos.trajectories) validate_trajectory(mdp, traj);
    } catch (const std::invalid_argument& e) {
        std::cerr << demos_path << ": " << e.what() << '\n';
        return exit_validation;
    }

    InferenceOptions options;
    options.max_iterations = max_iters;
    options.stop_gain = stop_gain;
    options.fixed_psi = fixed_psi;
    const InferenceResult result =
        greedy_infer(mdp, demos, ConstraintSet::unconstrained(mdp.num_states()), options);

    fs::create_directories(fs::path(out_dir) / "trace");
    const fs::path out(out_dir);
    io::save_result(result, options, (out / "result.json").string());
    for (const IterationTrace& trace : result.trace) {
        io::save_iteration_csv(
            trace, (out / "trace" / ("iter_" + std::to_string(trace.iteration) + ".csv")).string());
    }
    if (dump_values) {
        io::save_values_csv(soft_backup(mdp, result.final_constraints),
                            (out / "values.csv").string());
    }

    std::cout << "status: " << to_string(result.status) << ", selected " << result.selected.size()
              << " constraints over " << result.trace.size() << " iterations\n";
    for (const SelectedConstraint& s : result.selected) {
        std::cout << "  iter " << s.iteration << ": ";
        if (s.candidate.kind == CandidateConstraint::Kind::state) {
            std::cout << "state " << s.candidate.target << " psi " << s.candidate.psi;
        } else {
            std::cout << "action " << s.candidate.target;
        }
        std::cout << " (score " << s.score << ")\n";
    }
    return exit_ok;
}

int cmd_validate(const std::optional<std::string>& mdp_path, int trials, std::uint64_t seed) {
    if (mdp_path) {
        const Mdp mdp = io::load_mdp(*mdp_path);
        const auto violations = validate_mdp(mdp);
        if (violations.empty()) {
            std::cout << *mdp_path << ": OK (" << mdp.num_states() << " states, "
                      << mdp.num_actions() << " actions, horizon " << mdp.horizon() << ")\n";
            return exit_ok;
        }
        for (const Violation& v : violations) std::cout << *mdp_path << ": " << v.describe() << '\n';
        return exit_validation;
    }

    oracle::SuiteOptions options;
    options.trials = trials;
    options.seed = seed;
    bool all_passed = true;
    for (const oracle::SuiteCheck& check : oracle::run_suite(options)) {
        std::cout << (check.passed ? "PASS" : "FAIL") << ' ' << check.name << ": " << check.detail
                  << '\n';
        all_passed = all_passed && check.passed;
    }
    return all_passed ? exit_ok : exit_validation;
}

int cmd_export_heatmap(const std::string& result_dir, int iteration,
                       const std::optional<std::string>& mapping_path,
                       std::optional<std::string> out_path) {
    const InferenceResult result = io::load_result((fs::path(result_dir) / "result.json").string());
    const IterationTrace* trace = nullptr;
    for (const IterationTrace& it : result.trace) {
        if (it.iteration == iteration) trace = &it;
    }
    if (trace == nullptr) {
        throw std::invalid_argument("iteration " + std::to_string(iteration) +
                                    " not present in " + result_dir + "/result.json");
    }
    std::optional<GridMapping> mapping;
    if (mapping_path) mapping = io::load_mapping(*mapping_path);
    if (!out_path) {
        out_path = (fs::path(result_dir) / ("heatmap_iter_" + std::to_string(iteration) + ".csv"))
                       .string();
    }
    io::save_heatmap_csv(*trace, mapping ? &*mapping : nullptr, *out_path);
    std::cout << "wrote " << *out_path << '\n';
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constraint and risk-tolerance inference from demonstrations in stochastic MDPs"};
    app.require_subcommand(1);

    // synthesize
    std::string spec_path, out_dir;
    std::uint64_t seed = 0;
    int n = 100;
    auto* synth = app.add_subcommand("synthesize", "Build a gridworld dataset from a spec file");
    synth->add_option("--spec", spec_path, "grid spec JSON")->required();
    synth->add_option("--seed", seed, "sampling seed (default 0)");
    synth->add_option("--n", n, "number of demonstrations (default 100)");
    synth->add_option("--out", out_dir, "output directory")->required();

    // infer
    std::string mdp_path, demos_path, infer_out;
    int max_iters = 10;
    double stop_gain = 0.05;
    double fixed_psi_value = 0.0;
    bool dump_values = false;
    auto* infer = app.add_subcommand("infer", "Infer constraints from demonstrations");
    infer->add_option("--mdp", mdp_path, "MDP JSON")->required();
    infer->add_option("--demos", demos_path, "demonstrations JSON")->required();
    infer->add_option("--max-iters", max_iters, "iteration budget (default 10)");
    infer->add_option("--stop-gain", stop_gain,
                      "stop when the best gain in nats per demonstration drops below this "
                      "(default 0.05; 0 disables)");
    auto* fixed_psi_opt =
        infer->add_option("--fixed-psi", fixed_psi_value,
                          "use this fixed threshold for every state candidate instead of the "
                          "data-driven selection")
            ->check(CLI::Range(0.0, 1.0));
    infer->add_flag("--dump-values", dump_values, "write values.csv for the final constraint set");
    infer->add_option("--out", infer_out, "output directory")->required();

    // validate
    std::optional<std::string> validate_mdp_path;
    int trials = 100;
    std::uint64_t validate_seed = 0;
    auto* validate = app.add_subcommand(
        "validate", "Run the brute-force property suite (or check an MDP file with --mdp)");
    validate->add_option("--mdp", validate_mdp_path, "validate this MDP JSON instead");
    validate->add_option("--trials", trials, "random instances per property (default 100)");
    validate->add_option("--seed", validate_seed, "base seed (default 0)");

    // export-heatmap
    std::string result_dir;
    int iteration = 0;
    std::optional<std::string> mapping_path, heatmap_out;
    auto* heatmap = app.add_subcommand("export-heatmap",
                                       "Export one iteration's candidate scores as CSV");
    heatmap->add_option("--result", result_dir, "directory written by infer")->required();
    heatmap->add_option("--iteration", iteration, "iteration index")->required();
    heatmap->add_option("--mapping", mapping_path, "mapping.json for cell coordinates");
    heatmap->add_option("--out", heatmap_out, "output CSV (default inside the result dir)");

    try {
        app.parse(argc, argv);
        if (synth->parsed()) return cmd_synthesize(spec_path, seed, n, out_dir);
        if (infer->parsed()) {
            std::optional<double> fixed_psi;
            if (fixed_psi_opt->count() > 0) fixed_psi = fixed_psi_value;
            return cmd_infer(mdp_path, demos_path, max_iters, stop_gain, fixed_psi, dump_values,
                             infer_out);
        }
        if (validate->parsed()) return cmd_validate(validate_mdp_path, trials, validate_seed);
        if (heatmap->parsed())
            return cmd_export_heatmap(result_dir, iteration, mapping_path, heatmap_out);
        return exit_usage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return exit_validation;
    }
}
