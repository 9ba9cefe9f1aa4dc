#include "cinfer/inference.hpp"

#include "cinfer/numeric.hpp"
#include "cinfer/soft_bellman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cinfer {

namespace {

bool is_neg_inf(double v) { return std::isinf(v) && v < 0; }

bool action_taken(const DemonstrationSet& demos, int a) {
    for (const Trajectory& traj : demos.trajectories) {
        if (std::find(traj.actions.begin(), traj.actions.end(), a) != traj.actions.end())
            return true;
    }
    return false;
}

// A state candidate excludes a demonstration iff some demonstrated transition
// carries more mass into the target than the new threshold allows. (Feasibility
// under `current` is an invariant maintained by the greedy loop, so only the
// new bound needs checking.)
bool state_candidate_excludes(const Mdp& mdp, const DemonstrationSet& demos,
                              int target, double psi) {
    if (psi >= 1.0) return false;
    for (const Trajectory& traj : demos.trajectories) {
        for (std::size_t t = 0; t < traj.actions.size(); ++t) {
            if (mdp.transition(traj.states[t], traj.actions[t], target) > psi + psi_slack)
                return true;
        }
    }
    return false;
}

// P_{C+}(demo action) = 0 iff its backup term is annihilated: some successor
// of a demonstrated transition has delta(t+1) = -inf, or the action itself is
// newly infeasible. The latter is ruled out by generate_candidates, so check
// the successors.
bool candidate_zeroes_demo(const Mdp& mdp, const DemonstrationSet& demos, const FTable& table) {
    for (const Trajectory& traj : demos.trajectories) {
        if (is_neg_inf(table.delta(0, traj.states.front()))) return true;
        for (std::size_t t = 0; t < traj.actions.size(); ++t) {
            for (const Successor& s : mdp.successors(traj.states[t], traj.actions[t])) {
                if (is_neg_inf(table.delta(static_cast<int>(t) + 1, s.state))) return true;
            }
        }
    }
    return false;
}

void require_demos_feasible(const Mdp& mdp, const DemonstrationSet& demos,
                            const ConstraintSet& c, const char* when) {
    for (const Trajectory& traj : demos.trajectories) {
        for (std::size_t t = 0; t < traj.actions.size(); ++t) {
            if (!phi_indicator(mdp, c, traj.states[t], traj.actions[t]))
                throw std::invalid_argument(std::string("greedy_infer: demonstration infeasible ") + when);
        }
    }
}

} // namespace

std::string to_string(InferenceStatus status) {
    switch (status) {
    case InferenceStatus::max_iterations: return "max_iterations";
    case InferenceStatus::converged: return "converged";
    case InferenceStatus::exhausted: return "exhausted";
    }
    return "unknown";
}

std::vector<CandidateConstraint> generate_candidates(const Mdp& mdp,
                                                     const DemonstrationSet& demos,
                                                     const ConstraintSet& current,
                                                     std::optional<double> fixed_psi) {
    std::vector<CandidateConstraint> out;
    for (int x = 0; x < mdp.num_states(); ++x) {
        const double psi = fixed_psi ? *fixed_psi : select_risk_level(mdp, demos, x);
        if (!(psi < current.psi(x))) continue; // already constrained at or below
        if (state_candidate_excludes(mdp, demos, x, psi)) continue;
        out.push_back({CandidateConstraint::Kind::state, x, psi});
    }
    for (int a = 0; a < mdp.num_actions(); ++a) {
        if (current.action_forbidden(a) || action_taken(demos, a)) continue;
        out.push_back({CandidateConstraint::Kind::action, a, 0.0});
    }
    return out;
}

InferenceResult greedy_infer(const Mdp& mdp, const DemonstrationSet& demos,
                             const ConstraintSet& base, const InferenceOptions& options) {
    if (demos.trajectories.empty())
        throw std::invalid_argument("greedy_infer: no demonstrations");
    for (const Trajectory& traj : demos.trajectories) validate_trajectory(mdp, traj);
    require_demos_feasible(mdp, demos, base, "under the base constraint set");
    {
        // feasible must also mean positive likelihood: a base with dead ends
        // reachable from demonstrated transitions cannot anchor the ratios
        const Policy policy = policy_from_backup(mdp, base, soft_backup(mdp, base));
        for (const Trajectory& traj : demos.trajectories) {
            if (!std::isfinite(trajectory_log_likelihood(policy, mdp, traj).action))
                throw std::invalid_argument(
                    "greedy_infer: a demonstration has zero likelihood under the base "
                    "constraint set");
        }
    }

    InferenceResult result;
    result.final_constraints = base;
    result.num_demonstrations = static_cast<int>(demos.trajectories.size());
    result.status = InferenceStatus::max_iterations;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const std::vector<CandidateConstraint> candidates =
            generate_candidates(mdp, demos, result.final_constraints, options.fixed_psi);
        if (candidates.empty()) {
            result.status = InferenceStatus::exhausted;
            break;
        }

        const CombinedBackupResult cb =
            combined_backup(mdp, result.final_constraints, candidates);

        IterationTrace trace;
        trace.iteration = iter;
        trace.candidates.reserve(candidates.size());
        int best = -1;
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            CandidateScore entry;
            entry.candidate = candidates[k];
            entry.excluded = candidate_zeroes_demo(mdp, demos, cb.tables[k]);
            double score = 0.0;
            for (const Trajectory& traj : demos.trajectories) {
                score += cb.tables[k].delta(0, traj.states.front());
            }
            entry.score = score;
            if (!std::isfinite(score)) entry.excluded = true;
            if (!entry.excluded && (best < 0 || score < trace.candidates[best].score)) {
                best = static_cast<int>(k);
            }
            trace.candidates.push_back(entry);
        }

        if (best < 0) {
            result.trace.push_back(std::move(trace));
            result.status = InferenceStatus::exhausted;
            break;
        }

        const double gain_per_demo =
            -trace.candidates[best].score / result.num_demonstrations;
        if (gain_per_demo < options.stop_gain) {
            result.trace.push_back(std::move(trace));
            result.status = InferenceStatus::converged;
            break;
        }

        trace.candidates[best].selected = true;
        result.selected.push_back({iter, candidates[best], trace.candidates[best].score});
        result.final_constraints = augment(result.final_constraints, candidates[best]);
        require_demos_feasible(mdp, demos, result.final_constraints, "after folding a candidate");
        result.trace.push_back(std::move(trace));
    }
    return result;
}

} // namespace cinfer
