#pragma once

#include "cinfer/constraints.hpp"
#include "cinfer/f_ratio.hpp"
#include "cinfer/mdp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cinfer {

struct CandidateScore {
    CandidateConstraint candidate;
    double score = 0.0; // sum over demonstrations of delta(0, x0); <= 0
    bool excluded = false; // would zero out some demonstrated action
    bool selected = false;
};

struct IterationTrace {
    int iteration = 0;
    std::vector<CandidateScore> candidates;
};

struct SelectedConstraint {
    int iteration = 0;
    CandidateConstraint candidate;
    double score = 0.0;
};

enum class InferenceStatus {
    max_iterations, // ran the full iteration budget
    converged,      // best per-demo gain fell below stop_gain
    exhausted,      // no scoreable candidates remained
};

std::string to_string(InferenceStatus status);

struct InferenceOptions {
    int max_iterations = 10;
    /// Stop once the best candidate gains fewer nats per demonstration than
    /// this. 0 disables the gain test.
    double stop_gain = 0.05;
    /// When set, every state candidate uses this threshold instead of the
    /// data-driven select_risk_level.
    std::optional<double> fixed_psi;
};

struct InferenceResult {
    std::vector<SelectedConstraint> selected;
    ConstraintSet final_constraints;
    std::vector<IterationTrace> trace;
    InferenceStatus status = InferenceStatus::max_iterations;
    int num_demonstrations = 0;
};

/**
 * One candidate per state whose threshold can still be tightened (psi from
 * select_risk_level, or the fixed override), plus one per action that is
 * neither forbidden nor taken anywhere in the demonstrations. Candidates
 * whose new threshold would exclude a demonstrated transition are dropped.
 * Order: states ascending, then actions ascending (the tie-break order).
 */
std::vector<CandidateConstraint> generate_candidates(const Mdp& mdp,
                                                     const DemonstrationSet& demos,
                                                     const ConstraintSet& current,
                                                     std::optional<double> fixed_psi = {});

/**
 * Greedy maximum-likelihood constraint selection: score all candidates with
 * one combined backup, fold in the minimizer, rebase, repeat. Scores are
 * sums of delta(0, x0) over demonstrations; candidates that would give any
 * demonstration zero likelihood are marked excluded and never selected.
 * Demonstrations must be feasible under `base` (throws otherwise), and every
 * fold preserves that feasibility.
 */
InferenceResult greedy_infer(const Mdp& mdp, const DemonstrationSet& demos,
                             const ConstraintSet& base, const InferenceOptions& options = {});

} // namespace cinfer
