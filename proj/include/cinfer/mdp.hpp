#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace cinfer {

/// Tolerance on transition-kernel row sums.
inline constexpr double row_sum_tol = 1e-12;

struct Successor {
    int state;
    double prob; // strictly positive
};

/**
 * Finite-horizon MDP with a stationary transition kernel.
 *
 * States and actions are plain index sets 0..|X|-1 and 0..|A|-1; any semantic
 * naming (grid cells, compass directions) belongs to the layer that built the
 * model. Immutable after construction, so concurrent reads are safe.
 */
class Mdp {
public:
    /// `transition[a]` is the |X| x |X| matrix with row x holding the
    /// distribution over successor states under action a. The constructor
    /// checks shapes only; probabilistic invariants are reported by
    /// validate_mdp.
    Mdp(int num_states, int num_actions, int horizon,
        std::vector<Eigen::MatrixXd> transition,
        Eigen::MatrixXd running_reward,
        Eigen::VectorXd terminal_reward);

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    int horizon() const { return horizon_; }

    const Eigen::MatrixXd& transition(int a) const;
    double transition(int x, int a, int xp) const;

    const Eigen::MatrixXd& running_reward() const { return running_reward_; }
    double running_reward(int x, int a) const;

    const Eigen::VectorXd& terminal_reward() const { return terminal_reward_; }
    double terminal_reward(int x) const;

    /// Positive-probability successors of (x, a), ascending by state index.
    const std::vector<Successor>& successors(int x, int a) const;

    void check_state(int x) const;
    void check_action(int a) const;

private:
    int num_states_;
    int num_actions_;
    int horizon_;
    std::vector<Eigen::MatrixXd> transition_;
    Eigen::MatrixXd running_reward_;  // |X| x |A|
    Eigen::VectorXd terminal_reward_; // |X|
    std::vector<std::vector<Successor>> successors_; // [a * |X| + x]
};

/// Positive-probability successors of (x, a), ascending by state index.
const std::vector<Successor>& successors(const Mdp& mdp, int x, int a);

struct Violation {
    enum class Kind {
        row_sum,            // sum_{x'} S(x,a,x') != 1 within row_sum_tol
        prob_out_of_range,  // S(x,a,x') outside [0,1] or non-finite
        reward_nonfinite,   // r(x,a) NaN or infinite
        terminal_nonfinite, // w(x) NaN or infinite
    };
    Kind kind;
    int x = -1;
    int a = -1;
    double value = 0.0;

    std::string describe() const;
};

/// Checks every probabilistic invariant of the kernel and rewards.
/// Empty report means the MDP is valid. Never throws.
std::vector<Violation> validate_mdp(const Mdp& mdp);

/// One demonstrated rollout: states x_0..x_T, actions a_0..a_{T-1}.
struct Trajectory {
    std::vector<int> states;
    std::vector<int> actions;
};

struct DemoMetadata {
    std::uint64_t seed = 0;
    std::string generator;
    int abort_count = 0;
};

struct DemonstrationSet {
    int horizon = 0;
    std::vector<Trajectory> trajectories;
    DemoMetadata meta;
};

/// Throws std::invalid_argument if the trajectory has wrong lengths for the
/// MDP horizon, out-of-bounds indices, or a zero-probability transition.
void validate_trajectory(const Mdp& mdp, const Trajectory& traj);

} // namespace cinfer
