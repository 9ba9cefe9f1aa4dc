#pragma once

#include "cinfer/constraints.hpp"
#include "cinfer/mdp.hpp"
#include "cinfer/soft_bellman.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cinfer {

/**
 * Log-ratio table for one candidate augmentation: delta(t, x) is the log of
 * the ratio between the augmented and baseline partition masses at (t, x).
 * Terminal rows are exactly 0; every entry is <= 0 (the augmented set can
 * only shrink the feasible mass), with -inf meaning the candidate leaves no
 * feasible behavior from (t, x).
 */
struct FTable {
    Eigen::MatrixXd delta; // (T+1) x |X|
    int candidate_id = 0;  // index into the candidate batch
};

struct CombinedBackupResult {
    SoftBackupResult base;      // identical to soft_backup(mdp, base)
    std::vector<FTable> tables; // one per candidate, in input order
};

/**
 * One backward pass that produces the baseline soft values together with the
 * log-ratio table of every candidate. Per time step, each candidate's row
 * satisfies
 *
 *   delta(t, x) = log sum over a feasible under the augmented set of
 *                 exp( q0(t,x,a) - v0(t,x) + E_{x'}[delta(t+1, x')] )
 *
 * where an expectation touching a -inf entry with positive probability is
 * itself -inf. At baseline dead ends (v0 = -inf) both partition masses are
 * zero and delta is reported as 0.
 *
 * Throws std::invalid_argument if any candidate does not strictly augment
 * `base`. Callers must ensure base leaves demonstrated states feasible.
 */
CombinedBackupResult combined_backup(const Mdp& mdp, const ConstraintSet& base,
                                     const std::vector<CandidateConstraint>& candidates);

/// delta(0, x0): the candidate's log partition-mass ratio at the start state.
/// -inf means the candidate annihilates all feasible behavior from x0.
double f_at_start(const FTable& table, int x0);

} // namespace cinfer
