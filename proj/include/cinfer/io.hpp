#pragma once

#include "cinfer/gridworld.hpp"
#include "cinfer/inference.hpp"
#include "cinfer/mdp.hpp"
#include "cinfer/soft_bellman.hpp"

#include <stdexcept>
#include <string>

namespace cinfer::io {

/// Raised for unreadable files, malformed JSON (with line context), and
/// schema violations.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// MDP JSON: num_states, num_actions, horizon, transitions as [x, a, x', p]
// quadruples (omitted entries are 0), running_reward as [x, a, value]
// triples, terminal_reward as a list of |X| values.
Mdp load_mdp(const std::string& path);
void save_mdp(const Mdp& mdp, const std::string& path);

// Constraint JSON: psi (list of |X|), forbidden_actions (action indices).
ConstraintSet load_constraints(const std::string& path);
void save_constraints(const ConstraintSet& c, const std::string& path);

// Demonstration JSON: horizon, trajectories as {states, actions}, metadata
// {seed, generator, abort_count}.
DemonstrationSet load_demos(const std::string& path);
void save_demos(const DemonstrationSet& demos, const std::string& path);

// Grid spec JSON: width, height, slip, start [col,row], goal [col,row],
// horizon, true_constraints as {cell: [col,row], psi}.
GridSpec load_gridspec(const std::string& path);

// Mapping JSON: width, height, cells[i] = [col, row] of state i.
GridMapping load_mapping(const std::string& path);
void save_mapping(const GridMapping& mapping, const std::string& path);

void save_result(const InferenceResult& result, const InferenceOptions& options,
                 const std::string& path);
InferenceResult load_result(const std::string& path);

// CSV outputs. values.csv: t,x,v. Iteration CSV: one row per candidate with
// kind,target,psi,score,excluded,selected; the heatmap variant adds col,row
// resolved through a mapping (blank for action candidates or when no mapping
// is given).
void save_values_csv(const SoftBackupResult& backup, const std::string& path);
void save_iteration_csv(const IterationTrace& trace, const std::string& path);
void save_heatmap_csv(const IterationTrace& trace, const GridMapping* mapping,
                      const std::string& path);

} // namespace cinfer::io
