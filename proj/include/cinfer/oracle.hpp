#pragma once

#include "cinfer/constraints.hpp"
#include "cinfer/mdp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace cinfer::oracle {

/**
 * Brute-force reference implementations used by tests and `validate`. These
 * deliberately share no code with the production backups: the soft values
 * are transcribed in probability space with long-double accumulation and
 * per-slice rescaling, and the deterministic partition is an exhaustive path
 * enumeration.
 */

/// log sum over feasible action sequences of exp(total path reward), by full
/// enumeration. Requires deterministic dynamics (every kernel row a point
/// mass); throws std::invalid_argument otherwise. -inf when no feasible path
/// exists.
double enumerate_paths_value(const Mdp& mdp, const ConstraintSet& c, int x0);

/// Soft values computed in probability space: Z_t(x) = sum over feasible a of
/// e^{r(x,a)} * prod_{x'} Z_{t+1}(x')^{S(x,a,x')}, returned as log Z.
/// Shape (T+1) x |X|; -inf marks zero partition mass.
Eigen::MatrixXd soft_values_reference(const Mdp& mdp, const ConstraintSet& c);

/// Reference log F: the difference of two independently computed value
/// tables, V_augmented - V_base, per (t, x). Entries where the base value is
/// -inf are NaN (the ratio is undefined there).
Eigen::MatrixXd two_backup_f(const Mdp& mdp, const ConstraintSet& base,
                             const CandidateConstraint& cand);

/// Seeded random instances for the property suites. Deterministic across
/// platforms (counter-based generator).
struct RandomMdpOptions {
    int max_states = 6;
    int max_actions = 3;
    int max_horizon = 4;
    bool deterministic = false;
    double reward_scale = 2.0;
};
Mdp random_mdp(std::uint64_t seed, const RandomMdpOptions& opt = {});

/// A random strict augmentation of `base`: either forbids a random allowed
/// action or lowers psi at a random state.
CandidateConstraint random_candidate(std::uint64_t seed, const Mdp& mdp,
                                     const ConstraintSet& base);

struct SuiteOptions {
    int trials = 100;
    std::uint64_t seed = 0;
    bool inject_fault = false; // test hook: perturbs one delta entry so the
                               // equivalence check must fail
};

struct SuiteCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs every cross-implementation property check on seeded random
/// instances: combined-backup vs two-backup equivalence, deterministic path
/// enumeration, policy normalization/feasibility, threshold monotonicity,
/// and the log-ratio range. One entry per property.
std::vector<SuiteCheck> run_suite(const SuiteOptions& opt);

} // namespace cinfer::oracle
