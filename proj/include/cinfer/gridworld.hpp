#pragma once

#include "cinfer/constraints.hpp"
#include "cinfer/mdp.hpp"

#include <string>
#include <vector>

namespace cinfer {

struct Cell {
    int col = 0;
    int row = 0;
    bool operator==(const Cell&) const = default;
};

struct CellConstraint {
    Cell cell;
    double psi = 0.25;
};

/**
 * The 2-D benchmark world: 8 compass moves plus a loiter action, a shared
 * slip probability, and chance-constrained cells as ground truth. The agent
 * pays unit cost for straight moves, sqrt(2) for diagonals, and loiters for
 * free only at the goal.
 */
struct GridSpec {
    int width = 0;
    int height = 0;
    double slip = 0.1;
    Cell start;
    Cell goal;
    int horizon = 1;
    std::vector<CellConstraint> true_constraints;
};

/// Compass order used for action indices 0..7; index 8 loiters.
enum GridAction : int {
    grid_north = 0,
    grid_northeast,
    grid_east,
    grid_southeast,
    grid_south,
    grid_southwest,
    grid_west,
    grid_northwest,
    grid_loiter,
};
inline constexpr int grid_num_actions = 9;

const char* grid_action_name(int a);

/// Cell <-> state index translation (row-major, row 0 at the south edge).
class GridMapping {
public:
    GridMapping() = default;
    GridMapping(int width, int height) : width_(width), height_(height) {}

    int width() const { return width_; }
    int height() const { return height_; }
    int num_states() const { return width_ * height_; }

    bool contains(Cell c) const {
        return c.col >= 0 && c.col < width_ && c.row >= 0 && c.row < height_;
    }
    int to_state(Cell c) const { return c.row * width_ + c.col; }
    Cell to_cell(int state) const { return {state % width_, state / width_}; }

private:
    int width_ = 0;
    int height_ = 0;
};

struct GridworldModel {
    Mdp mdp;
    ConstraintSet ground_truth;
    GridMapping mapping;
    int start_state = 0;
    int goal_state = 0;
};

/**
 * Builds the benchmark MDP. Each directional action reaches its intended
 * neighbor with probability 1-slip and each of the other seven directions'
 * targets with slip/7; a target that falls off the grid resolves to the
 * current cell, and coincident targets merge their mass. Loiter is a
 * deterministic self-loop. Throws std::invalid_argument on an invalid spec
 * (out-of-range cells, slip >= 1, constrained goal, start on a psi = 0
 * cell).
 */
GridworldModel build_gridworld(const GridSpec& spec);

} // namespace cinfer
