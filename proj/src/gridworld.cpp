#include "cinfer/gridworld.hpp"

#include <cmath>
#include <stdexcept>

namespace cinfer {

namespace {

constexpr int dir_dc[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int dir_dr[8] = {1, 1, 0, -1, -1, -1, 0, 1};

const char* const action_names[grid_num_actions] = {
    "N", "NE", "E", "SE", "S", "SW", "W", "NW", "loiter",
};

} // namespace

const char* grid_action_name(int a) {
    if (a < 0 || a >= grid_num_actions) throw std::out_of_range("grid action index out of range");
    return action_names[a];
}

GridworldModel build_gridworld(const GridSpec& spec) {
    if (spec.width < 1 || spec.height < 1)
        throw std::invalid_argument("gridworld: width and height must be >= 1");
    if (!(spec.slip >= 0.0) || spec.slip >= 1.0)
        throw std::invalid_argument("gridworld: slip must lie in [0, 1)");
    if (spec.horizon < 1) throw std::invalid_argument("gridworld: horizon must be >= 1");

    const GridMapping mapping(spec.width, spec.height);
    if (!mapping.contains(spec.start)) throw std::invalid_argument("gridworld: start cell off the grid");
    if (!mapping.contains(spec.goal)) throw std::invalid_argument("gridworld: goal cell off the grid");

    const int nx = mapping.num_states();
    ConstraintSet truth = ConstraintSet::unconstrained(nx);
    for (const CellConstraint& cc : spec.true_constraints) {
        if (!mapping.contains(cc.cell))
            throw std::invalid_argument("gridworld: constrained cell off the grid");
        if (cc.psi < 0.0 || cc.psi > 1.0)
            throw std::invalid_argument("gridworld: psi must lie in [0, 1]");
        if (cc.cell == spec.goal && cc.psi < 1.0)
            throw std::invalid_argument("gridworld: the goal cell must not be constrained");
        truth.psi(mapping.to_state(cc.cell)) = cc.psi;
    }
    if (truth.psi(mapping.to_state(spec.start)) == 0.0)
        throw std::invalid_argument("gridworld: the start cell must not have psi = 0");

    const int goal_state = mapping.to_state(spec.goal);
    const double slip_share = spec.slip / 7.0;

    std::vector<Eigen::MatrixXd> transition(grid_num_actions, Eigen::MatrixXd::Zero(nx, nx));
    Eigen::MatrixXd running = Eigen::MatrixXd::Zero(nx, grid_num_actions);

    for (int x = 0; x < nx; ++x) {
        const Cell here = mapping.to_cell(x);
        for (int dir = 0; dir < 8; ++dir) {
            auto resolve = [&](int d) {
                const Cell c{here.col + dir_dc[d], here.row + dir_dr[d]};
                return mapping.contains(c) ? mapping.to_state(c) : x;
            };
            transition[dir](x, resolve(dir)) += 1.0 - spec.slip;
            for (int other = 0; other < 8; ++other) {
                if (other == dir) continue;
                transition[dir](x, resolve(other)) += slip_share;
            }
            const bool diagonal = dir_dc[dir] != 0 && dir_dr[dir] != 0;
            running(x, dir) = diagonal ? -std::sqrt(2.0) : -1.0;
        }
        transition[grid_loiter](x, x) = 1.0;
        running(x, grid_loiter) = x == goal_state ? 0.0 : -1.0;
    }

    Mdp mdp(nx, grid_num_actions, spec.horizon, std::move(transition), std::move(running),
            Eigen::VectorXd::Zero(nx));
    return {std::move(mdp), std::move(truth), mapping, mapping.to_state(spec.start), goal_state};
}

} // namespace cinfer
