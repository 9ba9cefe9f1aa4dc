#include "cinfer/mdp.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cinfer {

namespace {

std::string fmt(const char* pattern, int x, int a, double v) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, x, a, v);
    return buf;
}

} // namespace

Mdp::Mdp(int num_states, int num_actions, int horizon,
         std::vector<Eigen::MatrixXd> transition,
         Eigen::MatrixXd running_reward,
         Eigen::VectorXd terminal_reward)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      transition_(std::move(transition)),
      running_reward_(std::move(running_reward)),
      terminal_reward_(std::move(terminal_reward)) {
    if (num_states_ < 1) throw std::invalid_argument("Mdp: num_states must be >= 1");
    if (num_actions_ < 1) throw std::invalid_argument("Mdp: num_actions must be >= 1");
    if (horizon_ < 1) throw std::invalid_argument("Mdp: horizon must be >= 1");
    if (static_cast<int>(transition_.size()) != num_actions_)
        throw std::invalid_argument("Mdp: transition must hold one matrix per action");
    for (const auto& m : transition_) {
        if (m.rows() != num_states_ || m.cols() != num_states_)
            throw std::invalid_argument("Mdp: each transition matrix must be |X| x |X|");
    }
    if (running_reward_.rows() != num_states_ || running_reward_.cols() != num_actions_)
        throw std::invalid_argument("Mdp: running_reward must be |X| x |A|");
    if (terminal_reward_.size() != num_states_)
        throw std::invalid_argument("Mdp: terminal_reward must have |X| entries");

    successors_.resize(static_cast<std::size_t>(num_actions_) * num_states_);
    for (int a = 0; a < num_actions_; ++a) {
        const Eigen::MatrixXd& s = transition_[a];
        for (int x = 0; x < num_states_; ++x) {
            auto& row = successors_[static_cast<std::size_t>(a) * num_states_ + x];
            for (int xp = 0; xp < num_states_; ++xp) {
                if (s(x, xp) > 0.0) row.push_back({xp, s(x, xp)});
            }
        }
    }
}

void Mdp::check_state(int x) const {
    if (x < 0 || x >= num_states_)
        throw std::out_of_range("state index " + std::to_string(x) + " out of bounds");
}

void Mdp::check_action(int a) const {
    if (a < 0 || a >= num_actions_)
        throw std::out_of_range("action index " + std::to_string(a) + " out of bounds");
}

const Eigen::MatrixXd& Mdp::transition(int a) const {
    check_action(a);
    return transition_[a];
}

double Mdp::transition(int x, int a, int xp) const {
    check_state(x);
    check_action(a);
    check_state(xp);
    return transition_[a](x, xp);
}

double Mdp::running_reward(int x, int a) const {
    check_state(x);
    check_action(a);
    return running_reward_(x, a);
}

double Mdp::terminal_reward(int x) const {
    check_state(x);
    return terminal_reward_(x);
}

const std::vector<Successor>& Mdp::successors(int x, int a) const {
    check_state(x);
    check_action(a);
    return successors_[static_cast<std::size_t>(a) * num_states_ + x];
}

const std::vector<Successor>& successors(const Mdp& mdp, int x, int a) {
    return mdp.successors(x, a);
}

std::string Violation::describe() const {
    switch (kind) {
    case Kind::row_sum:
        return fmt("transition row (x=%d, a=%d) sums to %.17g, expected 1", x, a, value);
    case Kind::prob_out_of_range:
        return fmt("transition entry at (x=%d, a=%d) has probability %.17g outside [0,1]", x, a, value);
    case Kind::reward_nonfinite:
        return fmt("running reward at (x=%d, a=%d) is non-finite (%.17g)", x, a, value);
    case Kind::terminal_nonfinite: {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "terminal reward at x=%d is non-finite (%.17g)", x, value);
        return buf;
    }
    }
    return "unknown violation";
}

std::vector<Violation> validate_mdp(const Mdp& mdp) {
    std::vector<Violation> report;
    for (int a = 0; a < mdp.num_actions(); ++a) {
        const Eigen::MatrixXd& s = mdp.transition(a);
        for (int x = 0; x < mdp.num_states(); ++x) {
            double row_sum = 0.0;
            bool row_ok = true;
            for (int xp = 0; xp < mdp.num_states(); ++xp) {
                const double p = s(x, xp);
                if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
                    report.push_back({Violation::Kind::prob_out_of_range, x, a, p});
                    row_ok = false;
                } else {
                    row_sum += p;
                }
            }
            if (row_ok && std::abs(row_sum - 1.0) > row_sum_tol) {
                report.push_back({Violation::Kind::row_sum, x, a, row_sum});
            }
        }
    }
    for (int x = 0; x < mdp.num_states(); ++x) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
            const double r = mdp.running_reward()(x, a);
            if (!std::isfinite(r)) {
                report.push_back({Violation::Kind::reward_nonfinite, x, a, r});
            }
        }
        const double w = mdp.terminal_reward()(x);
        if (!std::isfinite(w)) {
            report.push_back({Violation::Kind::terminal_nonfinite, x, -1, w});
        }
    }
    return report;
}

void validate_trajectory(const Mdp& mdp, const Trajectory& traj) {
    const int horizon = mdp.horizon();
    if (static_cast<int>(traj.states.size()) != horizon + 1)
        throw std::invalid_argument("trajectory must have horizon+1 states, got " +
                                    std::to_string(traj.states.size()));
    if (static_cast<int>(traj.actions.size()) != horizon)
        throw std::invalid_argument("trajectory must have horizon actions, got " +
                                    std::to_string(traj.actions.size()));
    for (int x : traj.states) mdp.check_state(x);
    for (int a : traj.actions) mdp.check_action(a);
    for (int t = 0; t < horizon; ++t) {
        const double p = mdp.transition(traj.states[t], traj.actions[t], traj.states[t + 1]);
        if (!(p > 0.0))
            throw std::invalid_argument(
                "trajectory takes a zero-probability transition at step " + std::to_string(t));
    }
}

} // namespace cinfer
