#pragma once

#include "cinfer/constraints.hpp"
#include "cinfer/mdp.hpp"

#include <cstdint>

namespace cinfer {

/**
 * Rolls out the soft-Bellman (Boltzmann) policy under constraint set `c`
 * through the stochastic kernel: n full-horizon trajectories from x0, each
 * drawn from its own counter-based substream (see rng.hpp) so results are a
 * pure function of (mdp, c, x0, n, seed).
 *
 * A rollout that reaches a dead end is discarded and redrawn from the next
 * substream; the number of discarded attempts is reported in the metadata.
 * Throws std::invalid_argument when x0 itself has no feasible action.
 */
DemonstrationSet sample_demonstrations(const Mdp& mdp, const ConstraintSet& c, int x0, int n,
                                       std::uint64_t seed);

} // namespace cinfer
