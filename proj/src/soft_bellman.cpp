#include "cinfer/soft_bellman.hpp"

#include "cinfer/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace cinfer {

double expect_successors(const std::vector<Successor>& succ, const Eigen::VectorXd& values) {
    // prob > 0 for every entry, so prob * (-inf) = -inf and the sum never
    // produces NaN; an annihilated branch dominates the whole expectation.
    double acc = 0.0;
    for (const Successor& s : succ) {
        acc += s.prob * values(s.state);
    }
    return acc;
}

SoftBackupResult soft_backup(const Mdp& mdp, const ConstraintSet& c) {
    const int nx = mdp.num_states();
    const int na = mdp.num_actions();
    const int horizon = mdp.horizon();
    if (c.psi.size() != nx)
        throw std::invalid_argument("soft_backup: psi length does not match num_states");

    const auto mask = feasibility_mask(mdp, c);

    SoftBackupResult out;
    out.v.resize(horizon + 1, nx);
    out.q.assign(horizon, Eigen::MatrixXd::Constant(nx, na, neg_inf));
    out.v.row(horizon) = mdp.terminal_reward().transpose();

    Eigen::VectorXd v_next(nx);
    Eigen::ArrayXd terms(na);
    for (int t = horizon - 1; t >= 0; --t) {
        v_next = out.v.row(t + 1);
        for (int x = 0; x < nx; ++x) {
            terms.setConstant(neg_inf);
            for (int a = 0; a < na; ++a) {
                if (!mask(x, a)) continue;
                const double qv =
                    mdp.running_reward()(x, a) + expect_successors(mdp.successors(x, a), v_next);
                out.q[t](x, a) = qv;
                terms(a) = qv;
            }
            out.v(t, x) = log_sum_exp(terms);
        }
    }
    return out;
}

Policy policy_from_backup(const Mdp& mdp, const ConstraintSet& c,
                          const SoftBackupResult& backup) {
    const int nx = mdp.num_states();
    const int na = mdp.num_actions();
    const int horizon = mdp.horizon();
    if (backup.v.rows() != horizon + 1 || backup.v.cols() != nx ||
        static_cast<int>(backup.q.size()) != horizon)
        throw std::invalid_argument("policy_from_backup: backup shape does not match mdp");
    (void)c;

    Policy policy;
    policy.prob.assign(horizon, Eigen::MatrixXd::Zero(nx, na));
    for (int t = 0; t < horizon; ++t) {
        for (int x = 0; x < nx; ++x) {
            const double v = backup.v(t, x);
            if (std::isinf(v) && v < 0) {
                policy.dead_ends.emplace_back(t, x);
                continue; // all-zero row
            }
            for (int a = 0; a < na; ++a) {
                // q = -inf for infeasible actions, so exp gives an exact 0
                policy.prob[t](x, a) = std::exp(backup.q[t](x, a) - v);
            }
        }
    }
    return policy;
}

LogLikelihood trajectory_log_likelihood(const Policy& policy, const Mdp& mdp,
                                        const Trajectory& traj) {
    validate_trajectory(mdp, traj);
    if (static_cast<int>(policy.prob.size()) != mdp.horizon())
        throw std::invalid_argument("trajectory_log_likelihood: policy horizon mismatch");

    double action_ll = 0.0;
    double kernel_ll = 0.0;
    for (int t = 0; t < mdp.horizon(); ++t) {
        const int x = traj.states[t];
        const int a = traj.actions[t];
        const double p = policy.prob[t](x, a);
        action_ll += p > 0.0 ? std::log(p) : neg_inf;
        kernel_ll += std::log(mdp.transition(x, a, traj.states[t + 1]));
    }
    return {action_ll, action_ll + kernel_ll};
}

} // namespace cinfer
