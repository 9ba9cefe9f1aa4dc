// Acceptance suite: one numbered check per release criterion, each printing a
// PASS/FAIL line. Exits nonzero if any criterion fails.

#include "cinfer/demo_sampler.hpp"
#include "cinfer/f_ratio.hpp"
#include "cinfer/gridworld.hpp"
#include "cinfer/inference.hpp"
#include "cinfer/io.hpp"
#include "cinfer/numeric.hpp"
#include "cinfer/oracle.hpp"
#include "cinfer/rng.hpp"
#include "cinfer/soft_bellman.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

using namespace cinfer;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool passed, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", passed ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!passed) ++failures;
}

bool is_neg_inf(double v) { return std::isinf(v) && v < 0; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

// shared across criteria 1-3 and 5
struct SweepStats {
    double worst_equiv = 0.0;
    bool inf_pattern_ok = true;
    double worst_row = 0.0;
    bool infeasible_zero = true;
    double worst_range = 0.0;
    bool terminal_zero = true;
};

void scan_policy(const Mdp& mdp, const ConstraintSet& c, const SoftBackupResult& backup,
                 SweepStats& stats) {
    const Policy policy = policy_from_backup(mdp, c, backup);
    const auto mask = feasibility_mask(mdp, c);
    for (int t = 0; t < mdp.horizon(); ++t) {
        for (int x = 0; x < mdp.num_states(); ++x) {
            double row = 0.0;
            for (int a = 0; a < mdp.num_actions(); ++a) {
                if (!mask(x, a) && policy.prob[t](x, a) != 0.0) stats.infeasible_zero = false;
                row += policy.prob[t](x, a);
            }
            if (is_neg_inf(backup.v(t, x))) {
                if (row != 0.0) stats.infeasible_zero = false;
            } else {
                stats.worst_row = std::max(stats.worst_row, std::abs(row - 1.0));
            }
        }
    }
}

void scan_range(const FTable& table, SweepStats& stats) {
    for (Eigen::Index t = 0; t < table.delta.rows(); ++t)
        for (Eigen::Index x = 0; x < table.delta.cols(); ++x)
            if (!is_neg_inf(table.delta(t, x)))
                stats.worst_range = std::max(stats.worst_range, table.delta(t, x));
    stats.terminal_zero =
        stats.terminal_zero && (table.delta.row(table.delta.rows() - 1).array() == 0.0).all();
}

void criterion_1_2_3_5(SweepStats& stats) {
    // 1: combined backup vs two independent probability-space backups
    auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Mdp mdp = oracle::random_mdp(seed);
        ConstraintSet base = ConstraintSet::unconstrained(mdp.num_states());
        if (seed % 3 == 2) base = augment(base, oracle::random_candidate(seed ^ 0x5117, mdp, base));
        const CandidateConstraint cand = oracle::random_candidate(seed, mdp, base);

        const auto cb = combined_backup(mdp, base, {cand});
        const Eigen::MatrixXd ref = oracle::two_backup_f(mdp, base, cand);
        for (int t = 0; t <= mdp.horizon(); ++t) {
            for (int x = 0; x < mdp.num_states(); ++x) {
                const double got = cb.tables[0].delta(t, x);
                const double want = ref(t, x);
                if (std::isnan(want)) continue;
                if (is_neg_inf(want) || is_neg_inf(got)) {
                    if (is_neg_inf(want) != is_neg_inf(got)) stats.inf_pattern_ok = false;
                    continue;
                }
                stats.worst_equiv = std::max(stats.worst_equiv, std::abs(got - want));
            }
        }
        scan_range(cb.tables[0], stats);
        scan_policy(mdp, base, cb.base, stats);
    }
    const double t1 = seconds_since(t0);
    report(1, stats.worst_equiv <= 1e-9 && stats.inf_pattern_ok && t1 < 10.0,
           fmt("single-pass ratio vs two-backup reference over 100 instances: max |delta - (v+ - v0)| = %.3g "
               "(tol 1e-9), -inf patterns %s, %.2f s (limit 10 s)",
               stats.worst_equiv, stats.inf_pattern_ok ? "agree" : "DISAGREE", t1));

    // 2: deterministic reduction against exhaustive path enumeration
    t0 = std::chrono::steady_clock::now();
    double worst_det = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        oracle::RandomMdpOptions opt;
        opt.deterministic = true;
        const Mdp mdp = oracle::random_mdp(seed + 500, opt);
        ConstraintSet c = ConstraintSet::unconstrained(mdp.num_states());
        if (seed % 2 == 1) c = augment(c, oracle::random_candidate(seed, mdp, c));
        const auto backup = soft_backup(mdp, c);
        for (int x0 = 0; x0 < mdp.num_states(); ++x0) {
            const double direct = oracle::enumerate_paths_value(mdp, c, x0);
            const double got = backup.v(0, x0);
            if (is_neg_inf(direct) || is_neg_inf(got)) {
                if (is_neg_inf(direct) != is_neg_inf(got))
                    worst_det = std::numeric_limits<double>::infinity();
                continue;
            }
            worst_det =
                std::max(worst_det, std::abs(got - direct) / std::max(1.0, std::abs(direct)));
        }
        scan_policy(mdp, c, backup, stats);
    }
    const double t2 = seconds_since(t0);
    report(2, worst_det <= 1e-9 && t2 < 10.0,
           fmt("deterministic reduction over 50 instances: max rel error %.3g (tol 1e-9), "
               "%.2f s (limit 10 s)",
               worst_det, t2));

    // 3: policy rows collected across the instances of (1) and (2)
    report(3, stats.worst_row <= 1e-9 && stats.infeasible_zero,
           fmt("policy rows: max |sum - 1| = %.3g (tol 1e-9); infeasible actions %s",
               stats.worst_row,
               stats.infeasible_zero ? "carry exactly zero mass" : "LEAK probability"));
}

void criterion_4(SweepStats& stats) {
    const double sweep[] = {0.9, 0.7, 0.5, 0.35, 0.25, 0.15, 0.08, 0.03, 0.0};
    bool monotone = true;
    double worst_gap = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Mdp mdp = oracle::random_mdp(seed + 900);
        const ConstraintSet base = ConstraintSet::unconstrained(mdp.num_states());
        const int target = rng::substream(seed, 77).next_below(mdp.num_states());
        std::vector<CandidateConstraint> cands;
        for (double psi : sweep) cands.push_back({CandidateConstraint::Kind::state, target, psi});
        const auto cb = combined_backup(mdp, base, cands);
        for (const FTable& table : cb.tables) scan_range(table, stats);
        for (std::size_t k = 1; k < cands.size(); ++k) {
            for (int x = 0; x < mdp.num_states(); ++x) {
                const double lo = cb.tables[k].delta(0, x);
                const double hi = cb.tables[k - 1].delta(0, x);
                if (lo > hi + 1e-12) {
                    monotone = false;
                    worst_gap = std::max(worst_gap, lo - hi);
                }
            }
        }
    }
    report(4, monotone,
           monotone ? "lowering psi never increases delta(0, x) across 50 sweep instances "
                      "(slack 1e-12)"
                    : fmt("monotonicity violated by %.3g", worst_gap));
}

void criterion_5(const SweepStats& stats) {
    report(5, stats.worst_range <= 1e-12 && stats.terminal_zero,
           fmt("log-ratio range: max delta = %.3g (bound 0 + 1e-12); terminal rows %s",
               stats.worst_range, stats.terminal_zero ? "exactly 0" : "NONZERO"));
}

void criterion_6_7() {
    const std::string config = std::string(CINFER_SOURCE_DIR) + "/configs/experiment_9x9.json";
    const GridSpec spec = io::load_gridspec(config);
    const GridworldModel world = build_gridworld(spec);

    std::set<int> truth;
    for (const CellConstraint& cc : spec.true_constraints)
        truth.insert(world.mapping.to_state(cc.cell));

    const auto t0 = std::chrono::steady_clock::now();
    const int num_seeds = 20;
    int recovered = 0;
    double gain1_sum = 0.0, gain5_sum = 0.0;
    int gain_runs = 0;
    bool risk_levels_ok = true;

    for (std::uint64_t seed = 1; seed <= num_seeds; ++seed) {
        const DemonstrationSet demos =
            sample_demonstrations(world.mdp, world.ground_truth, world.start_state, 100, seed);

        // criterion 7 on the same datasets: thresholds keep every
        // demonstrated transition and respect the precursor floor
        for (int target = 0; target < world.mdp.num_states(); ++target) {
            const double psi = select_risk_level(world.mdp, demos, target);
            if (psi < precursor_floor(world.mdp, target)) risk_levels_ok = false;
            for (const Trajectory& traj : demos.trajectories)
                for (std::size_t t = 0; t < traj.actions.size(); ++t)
                    if (world.mdp.transition(traj.states[t], traj.actions[t], target) > psi)
                        risk_levels_ok = false;
        }

        InferenceOptions opt;
        opt.max_iterations = 5;
        opt.stop_gain = 0.0;
        const InferenceResult result = greedy_infer(
            world.mdp, demos, ConstraintSet::unconstrained(world.mdp.num_states()), opt);

        int hits = 0;
        for (const SelectedConstraint& s : result.selected) {
            if (s.candidate.kind == CandidateConstraint::Kind::state &&
                truth.count(s.candidate.target))
                ++hits;
        }
        if (hits >= 4) ++recovered;
        if (result.selected.size() == 5) {
            gain1_sum += -result.selected[0].score;
            gain5_sum += -result.selected[4].score;
            ++gain_runs;
        }
    }
    const double elapsed = seconds_since(t0);
    const double mean_g1 = gain_runs > 0 ? gain1_sum / gain_runs : 0.0;
    const double mean_g5 = gain_runs > 0 ? gain5_sum / gain_runs : neg_inf;
    const bool recovery_ok = recovered >= (num_seeds * 8 + 9) / 10;
    const bool decay_ok = gain_runs == num_seeds && mean_g5 <= 0.5 * mean_g1;
    report(6, recovery_ok && decay_ok && elapsed < 120.0,
           fmt("benchmark reproduction over %d seeds: %d/%d runs placed >=4 of 5 true cells in "
               "the first 5 picks (need 80%%); mean gain iter5/iter1 = %.3f/%.3f = %.2f "
               "(need <= 0.5); %.1f s (limit 120 s)",
               num_seeds, recovered, num_seeds, mean_g5, mean_g1,
               mean_g1 > 0 ? mean_g5 / mean_g1 : 0.0, elapsed));
    report(7, risk_levels_ok,
           risk_levels_ok
               ? "selected risk levels never exclude a demonstrated transition (exact) and "
                 "stay above the precursor floor on all 20 datasets"
               : "a selected risk level excluded a demonstration or undercut the floor");
}

double time_combined_backup(const GridworldModel& world, int k_candidates, int reps) {
    // k state candidates spread over the grid, all tight
    std::vector<CandidateConstraint> cands;
    const int step = std::max(1, world.mdp.num_states() / k_candidates);
    for (int x = 0; x < world.mdp.num_states() && static_cast<int>(cands.size()) < k_candidates;
         x += step) {
        if (x == world.goal_state) continue;
        cands.push_back({CandidateConstraint::Kind::state, x, 0.01});
    }
    const ConstraintSet base = ConstraintSet::unconstrained(world.mdp.num_states());
    (void)combined_backup(world.mdp, base, cands); // warm up
    std::vector<double> times;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto cb = combined_backup(world.mdp, base, cands);
        times.push_back(seconds_since(t0));
        if (cb.tables.size() != cands.size()) return -1.0; // defeat dead-code elimination
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

void criterion_8() {
    GridSpec spec;
    spec.slip = 0.1;
    spec.horizon = 20;
    spec.start = {0, 0};

    spec.width = spec.height = 9;
    spec.goal = {8, 8};
    const GridworldModel small = build_gridworld(spec);
    spec.width = spec.height = 18;
    spec.goal = {17, 17};
    const GridworldModel large = build_gridworld(spec);

    const double t_small = time_combined_backup(small, 24, 7);
    const double t_large = time_combined_backup(large, 24, 7);
    const double factor = t_large / t_small;
    const double exponent = std::log(factor) / std::log(4.0);

    // sanity on batch growth: 24 candidates cost at most linearly more than 1
    const double t_one = time_combined_backup(small, 1, 7);
    const double k_ratio = t_small / t_one;

    const bool ok = factor >= 2.0 && factor <= 8.0 && k_ratio <= 60.0;
    report(8, ok,
           fmt("complexity scaling: |X| x4 (81 -> 324 states) grew combined_backup wall time "
               "x%.2f (need [2, 8]; measured |X|-exponent %.2f, loop structure predicts "
               "T*|X|*degree*|A|, i.e. x4; the printed claim O(|X|^2(|X|+|A|)) would predict "
               "x64 dense); batch of 24 candidates cost x%.1f of one candidate (linear bound 24)",
               factor, exponent, k_ratio));
}

void criterion_9() {
    const std::string cli = CINFER_CLI_PATH;
    const std::string config = std::string(CINFER_SOURCE_DIR) + "/configs/experiment_9x9.json";
    const fs::path dir = fs::temp_directory_path() / ("cinfer_accept_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto run = [&](const std::string& out) {
        const std::string cmd = cli + " synthesize --spec " + config + " --seed 7 --n 100 --out " +
                                out + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    bool ok = run((dir / "a").string()) && run((dir / "b").string());
    std::string mismatch;
    if (ok) {
        for (const char* name : {"mdp.json", "demos.json", "ground_truth.json", "mapping.json"}) {
            if (slurp(dir / "a" / name) != slurp(dir / "b" / name)) {
                ok = false;
                mismatch = name;
            }
        }
    }
    fs::remove_all(dir);
    report(9, ok,
           ok ? "synthesize with a fixed seed is byte-identical across runs "
                "(mdp, demos, ground truth, mapping)"
              : ("reproducibility failed" + (mismatch.empty() ? "" : " on " + mismatch)));
}

} // namespace

int main() {
    SweepStats stats;
    criterion_1_2_3_5(stats);
    criterion_4(stats);
    criterion_5(stats);
    criterion_6_7();
    criterion_8();
    criterion_9();

    if (failures == 0) {
        std::printf("all 9 acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", failures);
    return 1;
}
