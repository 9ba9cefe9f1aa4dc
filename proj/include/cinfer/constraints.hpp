#pragma once

#include "cinfer/mdp.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cinfer {

/// Absolute slack used when testing S(x,a,x') <= psi(x'). Kernel entries like
/// 0.1/7 are not exactly representable, so a threshold selected from the same
/// kernel must not spuriously exclude the transition it was selected from.
inline constexpr double psi_slack = 1e-12;

/**
 * A constraint hypothesis: per-state transition-probability thresholds psi
 * plus a set of forbidden actions. psi(x) = 1 means the state is
 * unconstrained; psi(x) = 0 deterministically excludes it.
 */
struct ConstraintSet {
    Eigen::VectorXd psi;                // |X|, each in [0,1]
    std::vector<int> forbidden_actions; // sorted, unique

    static ConstraintSet unconstrained(int num_states);

    bool action_forbidden(int a) const;
    void forbid_action(int a); // keeps the list sorted and unique
};

/// A single-step augmentation of some base constraint set: either lower psi
/// at one state or forbid one action.
struct CandidateConstraint {
    enum class Kind { state, action };
    Kind kind = Kind::state;
    int target = 0;   // state index (Kind::state) or action index (Kind::action)
    double psi = 0.0; // new threshold, only meaningful for Kind::state
};

/// True iff applying `cand` to `base` strictly tightens it: a state candidate
/// must lower psi at its target, an action candidate must forbid a currently
/// allowed action.
bool strictly_augments(const ConstraintSet& base, const CandidateConstraint& cand);

/// Returns base with the candidate folded in. Throws std::invalid_argument
/// if the candidate does not strictly augment base or is out of range.
ConstraintSet augment(const ConstraintSet& base, const CandidateConstraint& cand);

/// Feasibility indicator: action allowed and every single-step chance bound
/// satisfied, i.e. a not forbidden and S(x,a,x') <= psi(x') (within
/// psi_slack) for every constrained x'.
bool phi_indicator(const Mdp& mdp, const ConstraintSet& c, int x, int a);

/// The feasible action set W_C(x) = { a : phi_indicator(mdp, c, x, a) }.
/// May be empty; callers must handle dead-end states.
std::vector<int> feasible_actions(const Mdp& mdp, const ConstraintSet& c, int x);

/// phi_indicator evaluated for all (x, a) at once; entry (x, a) is true iff
/// the pair is feasible.
Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>
feasibility_mask(const Mdp& mdp, const ConstraintSet& c);

/// Lower bound on a viable threshold for `target`: the largest value that
/// some precursor state cannot stay under with any action. Tightening psi
/// below this floor would leave that precursor without feasible actions.
/// Returns 0 when no state can reach `target`.
double precursor_floor(const Mdp& mdp, int target);

/// Tightest threshold for `target` that neither excludes any demonstrated
/// transition nor drops below the precursor floor:
/// max( max over demo transitions of S(x_t, a_t, target), precursor_floor ).
double select_risk_level(const Mdp& mdp, const DemonstrationSet& demos, int target);

} // namespace cinfer
