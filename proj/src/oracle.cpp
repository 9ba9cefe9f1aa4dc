#include "cinfer/oracle.hpp"

#include "cinfer/f_ratio.hpp"
#include "cinfer/numeric.hpp"
#include "cinfer/rng.hpp"
#include "cinfer/soft_bellman.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace cinfer::oracle {

namespace {

bool is_neg_inf(double v) { return std::isinf(v) && v < 0; }

std::string fmt_detail(const char* pattern, double v) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

void enumerate_rec(const Mdp& mdp, const ConstraintSet& c, int t, int x, double acc,
                   std::vector<double>& path_rewards) {
    if (t == mdp.horizon()) {
        path_rewards.push_back(acc + mdp.terminal_reward(x));
        return;
    }
    for (int a = 0; a < mdp.num_actions(); ++a) {
        if (!phi_indicator(mdp, c, x, a)) continue;
        const int xp = mdp.successors(x, a).front().state;
        enumerate_rec(mdp, c, t + 1, xp, acc + mdp.running_reward(x, a), path_rewards);
    }
}

} // namespace

double enumerate_paths_value(const Mdp& mdp, const ConstraintSet& c, int x0) {
    mdp.check_state(x0);
    for (int x = 0; x < mdp.num_states(); ++x) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
            const auto& succ = mdp.successors(x, a);
            if (succ.size() != 1 || std::abs(succ.front().prob - 1.0) > row_sum_tol)
                throw std::invalid_argument(
                    "enumerate_paths_value: kernel is not deterministic at (x=" +
                    std::to_string(x) + ", a=" + std::to_string(a) + ")");
        }
    }
    std::vector<double> path_rewards;
    enumerate_rec(mdp, c, 0, x0, 0.0, path_rewards);
    if (path_rewards.empty()) return neg_inf;
    return log_sum_exp(Eigen::Map<const Eigen::ArrayXd>(path_rewards.data(),
                                                        static_cast<Eigen::Index>(path_rewards.size())));
}

Eigen::MatrixXd soft_values_reference(const Mdp& mdp, const ConstraintSet& c) {
    using ld = long double;
    const int nx = mdp.num_states();
    const int na = mdp.num_actions();
    const int horizon = mdp.horizon();

    Eigen::MatrixXd v(horizon + 1, nx);
    v.row(horizon) = mdp.terminal_reward().transpose();

    // zhat holds partition masses rescaled so the largest finite entry is 1;
    // kernel rows sum to 1, so the rescaling shift passes through the
    // geometric mean unchanged.
    std::vector<ld> zhat(nx), zsum(nx);
    ld shift = static_cast<ld>(mdp.terminal_reward().maxCoeff());
    for (int x = 0; x < nx; ++x) {
        zhat[x] = std::exp(static_cast<ld>(mdp.terminal_reward(x)) - shift);
    }

    for (int t = horizon - 1; t >= 0; --t) {
        for (int x = 0; x < nx; ++x) {
            ld z = 0.0L;
            for (int a = 0; a < na; ++a) {
                if (!phi_indicator(mdp, c, x, a)) continue;
                ld prod = std::exp(static_cast<ld>(mdp.running_reward(x, a)));
                for (int xp = 0; xp < nx; ++xp) {
                    const double p = mdp.transition(a)(x, xp);
                    if (p != 0.0) prod *= std::pow(zhat[xp], static_cast<ld>(p));
                }
                z += prod;
            }
            zsum[x] = z;
        }
        ld top = 0.0L;
        for (int x = 0; x < nx; ++x) {
            v(t, x) = zsum[x] > 0.0L ? static_cast<double>(shift + std::log(zsum[x])) : neg_inf;
            top = std::max(top, zsum[x]);
        }
        if (top > 0.0L) {
            const ld log_top = std::log(top);
            for (int x = 0; x < nx; ++x) {
                zhat[x] = zsum[x] > 0.0L ? std::exp(std::log(zsum[x]) - log_top) : 0.0L;
            }
            shift += log_top;
        } else {
            std::fill(zhat.begin(), zhat.end(), 0.0L);
        }
    }
    return v;
}

Eigen::MatrixXd two_backup_f(const Mdp& mdp, const ConstraintSet& base,
                             const CandidateConstraint& cand) {
    const Eigen::MatrixXd v_aug = soft_values_reference(mdp, augment(base, cand));
    const Eigen::MatrixXd v_base = soft_values_reference(mdp, base);
    Eigen::MatrixXd diff(v_base.rows(), v_base.cols());
    for (Eigen::Index t = 0; t < diff.rows(); ++t) {
        for (Eigen::Index x = 0; x < diff.cols(); ++x) {
            if (is_neg_inf(v_base(t, x))) {
                diff(t, x) = std::numeric_limits<double>::quiet_NaN();
            } else if (is_neg_inf(v_aug(t, x))) {
                diff(t, x) = neg_inf;
            } else {
                diff(t, x) = v_aug(t, x) - v_base(t, x);
            }
        }
    }
    return diff;
}

Mdp random_mdp(std::uint64_t seed, const RandomMdpOptions& opt) {
    rng::CounterStream g = rng::substream(seed, 0x6d6470 /* instance tag */);
    const int nx = opt.max_states >= 2 ? 2 + g.next_below(opt.max_states - 1) : 1;
    const int na = opt.max_actions >= 2 ? 2 + g.next_below(opt.max_actions - 1) : 1;
    const int horizon = 1 + g.next_below(opt.max_horizon);

    std::vector<Eigen::MatrixXd> transition(na, Eigen::MatrixXd::Zero(nx, nx));
    for (int a = 0; a < na; ++a) {
        for (int x = 0; x < nx; ++x) {
            if (opt.deterministic) {
                transition[a](x, g.next_below(nx)) = 1.0;
                continue;
            }
            const int support = 1 + g.next_below(std::min(3, nx));
            std::vector<int> targets;
            while (static_cast<int>(targets.size()) < support) {
                const int xp = g.next_below(nx);
                if (std::find(targets.begin(), targets.end(), xp) == targets.end())
                    targets.push_back(xp);
            }
            double total = 0.0;
            std::vector<double> weights(targets.size());
            for (auto& w : weights) {
                w = -std::log(1.0 - g.next_uniform());
                total += w;
            }
            for (std::size_t i = 0; i < targets.size(); ++i) {
                transition[a](x, targets[i]) = weights[i] / total;
            }
        }
    }

    Eigen::MatrixXd running(nx, na);
    for (int x = 0; x < nx; ++x)
        for (int a = 0; a < na; ++a)
            running(x, a) = (2.0 * g.next_uniform() - 1.0) * opt.reward_scale;
    Eigen::VectorXd terminal(nx);
    for (int x = 0; x < nx; ++x)
        terminal(x) = (2.0 * g.next_uniform() - 1.0) * opt.reward_scale * 0.5;

    return Mdp(nx, na, horizon, std::move(transition), std::move(running), std::move(terminal));
}

CandidateConstraint random_candidate(std::uint64_t seed, const Mdp& mdp,
                                     const ConstraintSet& base) {
    rng::CounterStream g = rng::substream(seed, 0x63616e64 /* candidate tag */);
    const bool want_action = g.next_uniform() < 0.35;
    if (want_action) {
        std::vector<int> allowed;
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (!base.action_forbidden(a)) allowed.push_back(a);
        if (!allowed.empty())
            return {CandidateConstraint::Kind::action, allowed[g.next_below(static_cast<int>(allowed.size()))], 0.0};
    }
    for (int tries = 0; tries < 4 * mdp.num_states(); ++tries) {
        const int x = g.next_below(mdp.num_states());
        if (base.psi(x) <= 0.0) continue;
        const double u = g.next_uniform();
        const double psi = u < 0.15 ? 0.0 : base.psi(x) * u * 0.95;
        return {CandidateConstraint::Kind::state, x, psi};
    }
    throw std::logic_error("random_candidate: base leaves nothing to augment");
}

std::vector<SuiteCheck> run_suite(const SuiteOptions& opt) {
    std::vector<SuiteCheck> checks;

    // shared tallies across the trial loops
    double worst_equiv = 0.0;
    double worst_row = 0.0;
    double worst_range = 0.0;
    double worst_det = 0.0;
    bool inf_pattern_ok = true;
    bool terminal_zero = true;
    bool infeasible_zero = true;
    bool monotone_ok = true;

    for (int trial = 0; trial < opt.trials; ++trial) {
        const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(trial);
        const Mdp mdp = random_mdp(seed);
        ConstraintSet base = ConstraintSet::unconstrained(mdp.num_states());
        if (trial % 3 == 2) {
            // exercise augmented baselines too
            const CandidateConstraint pre = random_candidate(seed ^ 0x700ull, mdp, base);
            base = augment(base, pre);
        }
        const CandidateConstraint cand = random_candidate(seed, mdp, base);

        auto cb = combined_backup(mdp, base, {cand});
        if (opt.inject_fault) cb.tables[0].delta(0, 0) += 1e-6;
        const Eigen::MatrixXd ref = two_backup_f(mdp, base, cand);

        for (Eigen::Index t = 0; t < ref.rows(); ++t) {
            for (Eigen::Index x = 0; x < ref.cols(); ++x) {
                const double got = cb.tables[0].delta(t, x);
                const double want = ref(t, x);
                if (std::isnan(want)) continue; // base dead end, ratio undefined
                if (is_neg_inf(want) || is_neg_inf(got)) {
                    if (is_neg_inf(want) != is_neg_inf(got)) inf_pattern_ok = false;
                    continue;
                }
                worst_equiv = std::max(worst_equiv, std::abs(got - want));
            }
        }

        // log-ratio range: delta <= 0 everywhere, terminal row exactly 0
        for (const FTable& table : cb.tables) {
            for (Eigen::Index t = 0; t < table.delta.rows(); ++t)
                for (Eigen::Index x = 0; x < table.delta.cols(); ++x)
                    if (!is_neg_inf(table.delta(t, x)))
                        worst_range = std::max(worst_range, table.delta(t, x));
            terminal_zero = terminal_zero && (table.delta.row(table.delta.rows() - 1).array() == 0.0).all();
        }

        // policy normalization and feasibility on the same instance
        const Policy policy = policy_from_backup(mdp, base, cb.base);
        const auto mask = feasibility_mask(mdp, base);
        for (int t = 0; t < mdp.horizon(); ++t) {
            for (int x = 0; x < mdp.num_states(); ++x) {
                double row = 0.0;
                for (int a = 0; a < mdp.num_actions(); ++a) {
                    if (!mask(x, a) && policy.prob[t](x, a) != 0.0) infeasible_zero = false;
                    row += policy.prob[t](x, a);
                }
                const bool dead = is_neg_inf(cb.base.v(t, x));
                if (!dead) worst_row = std::max(worst_row, std::abs(row - 1.0));
                if (dead && row != 0.0) infeasible_zero = false;
            }
        }
    }

    checks.push_back({"single_pass_equivalence",
                      worst_equiv <= 1e-9 && inf_pattern_ok,
                      fmt_detail("max |delta - (v_aug - v_base)| = %.3g over finite entries", worst_equiv) +
                          (inf_pattern_ok ? "" : "; -inf patterns disagree")});

    // deterministic reduction against exhaustive path enumeration
    {
        const int det_trials = std::max(1, opt.trials / 2);
        for (int trial = 0; trial < det_trials; ++trial) {
            RandomMdpOptions det_opt;
            det_opt.deterministic = true;
            const std::uint64_t seed = opt.seed + 7000 + static_cast<std::uint64_t>(trial);
            const Mdp mdp = random_mdp(seed, det_opt);
            ConstraintSet base = ConstraintSet::unconstrained(mdp.num_states());
            if (trial % 2 == 1) base = augment(base, random_candidate(seed, mdp, base));
            const SoftBackupResult backup = soft_backup(mdp, base);
            for (int x0 = 0; x0 < mdp.num_states(); ++x0) {
                const double direct = enumerate_paths_value(mdp, base, x0);
                const double got = backup.v(0, x0);
                if (is_neg_inf(direct) || is_neg_inf(got)) {
                    if (is_neg_inf(direct) != is_neg_inf(got)) worst_det = std::numeric_limits<double>::infinity();
                    continue;
                }
                const double rel = std::abs(got - direct) / std::max(1.0, std::abs(direct));
                worst_det = std::max(worst_det, rel);
            }
        }
        checks.push_back({"deterministic_reduction", worst_det <= 1e-9,
                          fmt_detail("max relative |v - path enumeration| = %.3g", worst_det)});
    }

    checks.push_back({"policy_normalization", worst_row <= 1e-9,
                      fmt_detail("max |row sum - 1| = %.3g over live rows", worst_row)});
    checks.push_back({"policy_feasibility", infeasible_zero,
                      infeasible_zero ? "infeasible actions carry zero probability"
                                      : "an infeasible action received positive probability"});

    // threshold monotonicity: lowering a candidate's psi never raises delta
    {
        const double sweep[] = {0.9, 0.7, 0.5, 0.3, 0.15, 0.05, 0.0};
        const int mono_trials = std::max(1, opt.trials / 2);
        for (int trial = 0; trial < mono_trials; ++trial) {
            const std::uint64_t seed = opt.seed + 9000 + static_cast<std::uint64_t>(trial);
            const Mdp mdp = random_mdp(seed);
            const ConstraintSet base = ConstraintSet::unconstrained(mdp.num_states());
            const int target = rng::substream(seed, 3).next_below(mdp.num_states());
            std::vector<CandidateConstraint> cands;
            for (double psi : sweep)
                cands.push_back({CandidateConstraint::Kind::state, target, psi});
            const auto cb = combined_backup(mdp, base, cands);
            for (std::size_t k = 1; k < cands.size(); ++k) {
                // cands[k] has the lower psi
                const auto& lo = cb.tables[k].delta;
                const auto& hi = cb.tables[k - 1].delta;
                for (Eigen::Index t = 0; t < lo.rows(); ++t)
                    for (Eigen::Index x = 0; x < lo.cols(); ++x)
                        if (lo(t, x) > hi(t, x) + 1e-12) monotone_ok = false;
            }
        }
        checks.push_back({"threshold_monotonicity", monotone_ok,
                          monotone_ok ? "delta non-increasing along every psi sweep"
                                      : "delta increased when psi was lowered"});
    }

    checks.push_back({"f_range", worst_range <= 1e-12 && terminal_zero,
                      fmt_detail("max delta = %.3g; ", worst_range) +
                          (terminal_zero ? "terminal rows exactly 0" : "terminal row nonzero")});

    return checks;
}

} // namespace cinfer::oracle
