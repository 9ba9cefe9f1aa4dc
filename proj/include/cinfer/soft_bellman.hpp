#pragma once

#include "cinfer/constraints.hpp"
#include "cinfer/mdp.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace cinfer {

/**
 * Soft (log-sum-exp) Bellman values under a constraint set.
 *
 * v(t, x) is the log of the partition mass of feasible behavior from state x
 * at time t; q[t](x, a) the corresponding state-action value. Both live in
 * log-space; -inf marks "no feasible continuation" (dead end) for v and
 * "infeasible or annihilated action" for q.
 */
struct SoftBackupResult {
    Eigen::MatrixXd v;              // (T+1) x |X|
    std::vector<Eigen::MatrixXd> q; // T entries, each |X| x |A|
};

/// Per-step Boltzmann policy rows. Rows over feasible actions sum to 1;
/// dead-end rows are all zero and listed in dead_ends as (t, x).
struct Policy {
    std::vector<Eigen::MatrixXd> prob; // T entries, each |X| x |A|
    std::vector<std::pair<int, int>> dead_ends;
};

struct LogLikelihood {
    double action; // sum_t log P(a_t | x_t); the constraint-dependent part
    double full;   // action plus sum_t log S(x_t, a_t, x_{t+1})
};

/// Backward recursion: v(T, .) = terminal reward; for t < T,
/// q[t](x,a) = r(x,a) + E_{x'}[v(t+1, x')] over the kernel and
/// v(t, x) = log-sum-exp over feasible actions of q[t](x, a).
/// States with no feasible action (or none with finite continuation) get
/// v = -inf; that is the defined behavior, not an error.
SoftBackupResult soft_backup(const Mdp& mdp, const ConstraintSet& c);

/// P(a|x) at time t as exp(q - v) for feasible actions, 0 otherwise.
/// `backup` must come from soft_backup on the same (mdp, c).
Policy policy_from_backup(const Mdp& mdp, const ConstraintSet& c,
                          const SoftBackupResult& backup);

/// Realized-path factorization of the demonstration likelihood. The `action`
/// part excludes the kernel terms, which are constraint-independent and
/// cancel in likelihood comparisons. Returns -inf values when a demonstrated
/// action has zero probability under the policy.
LogLikelihood trajectory_log_likelihood(const Policy& policy, const Mdp& mdp,
                                        const Trajectory& traj);

/// E_{x' ~ succ}[values(x')]; -inf as soon as any positive-probability
/// successor carries -inf. `values` must be free of NaN and +inf.
double expect_successors(const std::vector<Successor>& succ, const Eigen::VectorXd& values);

} // namespace cinfer
