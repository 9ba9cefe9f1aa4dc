#include "cinfer/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cinfer {

ConstraintSet ConstraintSet::unconstrained(int num_states) {
    ConstraintSet c;
    c.psi = Eigen::VectorXd::Ones(num_states);
    return c;
}

bool ConstraintSet::action_forbidden(int a) const {
    return std::binary_search(forbidden_actions.begin(), forbidden_actions.end(), a);
}

void ConstraintSet::forbid_action(int a) {
    auto it = std::lower_bound(forbidden_actions.begin(), forbidden_actions.end(), a);
    if (it == forbidden_actions.end() || *it != a) forbidden_actions.insert(it, a);
}

bool strictly_augments(const ConstraintSet& base, const CandidateConstraint& cand) {
    if (cand.kind == CandidateConstraint::Kind::state) {
        if (cand.target < 0 || cand.target >= base.psi.size()) return false;
        return cand.psi >= 0.0 && cand.psi < base.psi(cand.target);
    }
    return cand.target >= 0 && !base.action_forbidden(cand.target);
}

ConstraintSet augment(const ConstraintSet& base, const CandidateConstraint& cand) {
    if (!strictly_augments(base, cand))
        throw std::invalid_argument("candidate does not strictly augment the base constraint set");
    ConstraintSet out = base;
    if (cand.kind == CandidateConstraint::Kind::state) {
        out.psi(cand.target) = cand.psi;
    } else {
        out.forbid_action(cand.target);
    }
    return out;
}

bool phi_indicator(const Mdp& mdp, const ConstraintSet& c, int x, int a) {
    mdp.check_state(x);
    mdp.check_action(a);
    if (c.action_forbidden(a)) return false;
    for (const Successor& s : mdp.successors(x, a)) {
        const double psi = c.psi(s.state);
        if (psi < 1.0 && s.prob > psi + psi_slack) return false;
    }
    return true;
}

std::vector<int> feasible_actions(const Mdp& mdp, const ConstraintSet& c, int x) {
    std::vector<int> out;
    for (int a = 0; a < mdp.num_actions(); ++a) {
        if (phi_indicator(mdp, c, x, a)) out.push_back(a);
    }
    return out;
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>
feasibility_mask(const Mdp& mdp, const ConstraintSet& c) {
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask(mdp.num_states(), mdp.num_actions());
    for (int x = 0; x < mdp.num_states(); ++x) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
            mask(x, a) = phi_indicator(mdp, c, x, a);
        }
    }
    return mask;
}

double precursor_floor(const Mdp& mdp, int target) {
    mdp.check_state(target);
    double floor = 0.0; // max over an empty precursor set
    for (int x = 0; x < mdp.num_states(); ++x) {
        bool reaches = false;
        double min_mass = std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.num_actions(); ++a) {
            const double p = mdp.transition(a)(x, target);
            if (p > 0.0) reaches = true;
            min_mass = std::min(min_mass, p);
        }
        if (reaches) floor = std::max(floor, min_mass);
    }
    return floor;
}

double select_risk_level(const Mdp& mdp, const DemonstrationSet& demos, int target) {
    mdp.check_state(target);
    double level = precursor_floor(mdp, target);
    for (const Trajectory& traj : demos.trajectories) {
        const int steps = static_cast<int>(traj.actions.size());
        for (int t = 0; t < steps; ++t) {
            level = std::max(level, mdp.transition(traj.states[t], traj.actions[t], target));
        }
    }
    return level;
}

} // namespace cinfer
