#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cinfer/constraints.hpp"
#include "cinfer/demo_sampler.hpp"
#include "cinfer/gridworld.hpp"
#include "cinfer/oracle.hpp"
#include "cinfer/rng.hpp"
#include "test_helpers.hpp"

#include <algorithm>
#include <cmath>

using namespace cinfer;

namespace {

GridworldModel grid3x3(std::vector<CellConstraint> constraints = {}) {
    GridSpec spec;
    spec.width = 3;
    spec.height = 3;
    spec.slip = 0.1;
    spec.start = {0, 0};
    spec.goal = {2, 2};
    spec.horizon = 6;
    spec.true_constraints = std::move(constraints);
    return build_gridworld(spec);
}

// direct transcription of the floor definition, over the dense kernel
double brute_force_floor(const Mdp& mdp, int target) {
    double best = 0.0;
    for (int x = 0; x < mdp.num_states(); ++x) {
        bool can_reach = false;
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (mdp.transition(x, a, target) > 0.0) can_reach = true;
        if (!can_reach) continue;
        double lowest = 1.0;
        for (int a = 0; a < mdp.num_actions(); ++a)
            lowest = std::min(lowest, mdp.transition(x, a, target));
        best = std::max(best, lowest);
    }
    return best;
}

} // namespace

TEST_CASE("inactive constraints allow every state-action pair") {
    const GridworldModel world = grid3x3();
    const ConstraintSet c = ConstraintSet::unconstrained(world.mdp.num_states());
    for (int x = 0; x < world.mdp.num_states(); ++x)
        for (int a = 0; a < world.mdp.num_actions(); ++a)
            CHECK(phi_indicator(world.mdp, c, x, a));
}

TEST_CASE("chance bound blocks the aimed action but tolerates slip mass") {
    // constrain (1,2) at the benchmark threshold
    const GridworldModel world = grid3x3({{{1, 2}, 0.25}});
    const int center = world.mapping.to_state({1, 1});
    // aiming at the constrained cell carries 0.9 > 0.25
    CHECK_FALSE(phi_indicator(world.mdp, world.ground_truth, center, grid_north));
    // aiming elsewhere leaks only 0.1/7 into it
    CHECK(phi_indicator(world.mdp, world.ground_truth, center, grid_east));
    CHECK(phi_indicator(world.mdp, world.ground_truth, center, grid_loiter));
}

TEST_CASE("forbidden actions fail the indicator regardless of thresholds") {
    const GridworldModel world = grid3x3();
    ConstraintSet c = ConstraintSet::unconstrained(world.mdp.num_states());
    c.forbid_action(grid_loiter);
    for (int x = 0; x < world.mdp.num_states(); ++x)
        CHECK_FALSE(phi_indicator(world.mdp, c, x, grid_loiter));
}

TEST_CASE("feasible_actions enumerates the indicator") {
    const GridworldModel world = grid3x3({{{1, 2}, 0.25}});
    const int center = world.mapping.to_state({1, 1});
    const auto feasible = feasible_actions(world.mdp, world.ground_truth, center);
    // everything except the move aimed at the constrained cell
    std::vector<int> expected;
    for (int a = 0; a < grid_num_actions; ++a)
        if (a != grid_north) expected.push_back(a);
    CHECK(feasible == expected);
}

TEST_CASE("a fully blocked state has an empty feasible set") {
    // both actions lead to state 1 with certainty; psi(1) = 0
    std::vector<Eigen::MatrixXd> transition(2, Eigen::MatrixXd::Zero(2, 2));
    transition[0](0, 1) = 1.0;
    transition[1](0, 1) = 1.0;
    transition[0](1, 1) = 1.0;
    transition[1](1, 1) = 1.0;
    const Mdp mdp(2, 2, 2, std::move(transition), Eigen::MatrixXd::Zero(2, 2),
                  Eigen::VectorXd::Zero(2));
    ConstraintSet c = ConstraintSet::unconstrained(2);
    c.psi(1) = 0.0;
    CHECK(feasible_actions(mdp, c, 0).empty());
}

TEST_CASE("precursor floor: empty-max convention for unreachable targets") {
    // single action: 0 -> 1, 1 -> 1, 2 -> 0; nothing ever enters state 2
    std::vector<Eigen::MatrixXd> transition(1, Eigen::MatrixXd::Zero(3, 3));
    transition[0](0, 1) = 1.0;
    transition[0](1, 1) = 1.0;
    transition[0](2, 0) = 1.0;
    const Mdp mdp(3, 1, 2, std::move(transition), Eigen::MatrixXd::Zero(3, 1),
                  Eigen::VectorXd::Zero(3));
    CHECK(precursor_floor(mdp, 2) == 0.0);
    CHECK(precursor_floor(mdp, 1) == 1.0); // both precursors are locked in
}

TEST_CASE("precursor floor: an escape action zeroes the precursor's minimum") {
    // the unique precursor of state 1 can hit it (action 0, S = 1) or avoid
    // it entirely (action 1), so the floor stays at 0
    std::vector<Eigen::MatrixXd> transition(2, Eigen::MatrixXd::Zero(2, 2));
    transition[0](0, 1) = 1.0;
    transition[1](0, 0) = 1.0;
    transition[0](1, 0) = 1.0;
    transition[1](1, 0) = 1.0;
    const Mdp mdp(2, 2, 2, std::move(transition), Eigen::MatrixXd::Zero(2, 2),
                  Eigen::VectorXd::Zero(2));
    CHECK(precursor_floor(mdp, 1) == 0.0);
}

TEST_CASE("precursor floor matches exhaustive min/max over gridworld kernels") {
    const GridworldModel world = grid3x3();
    for (int target = 0; target < world.mdp.num_states(); ++target) {
        CHECK(precursor_floor(world.mdp, target) == brute_force_floor(world.mdp, target));
    }
}

TEST_CASE("select_risk_level with no demonstrated mass and no floor is 0") {
    const GridworldModel world = grid3x3();
    const int center = world.mapping.to_state({1, 1});
    REQUIRE(precursor_floor(world.mdp, center) == 0.0);
    DemonstrationSet empty;
    empty.horizon = world.mdp.horizon();
    CHECK(select_risk_level(world.mdp, empty, center) == 0.0);
}

TEST_CASE("select_risk_level takes the max of demonstrated mass and the floor") {
    const GridworldModel world = grid3x3();
    const int target = world.mapping.to_state({1, 0});
    const int from = world.mapping.to_state({0, 1});

    DemonstrationSet demos;
    demos.horizon = world.mdp.horizon();
    // demo aims away from the target; the kernel still leaks 0.1/7 toward it
    Trajectory traj;
    traj.states = {from, world.mapping.to_state({0, 2}), 8, 8, 8, 8, 8};
    traj.actions = {grid_north, grid_northeast, grid_northeast, grid_loiter, grid_loiter,
                    grid_loiter};
    // repair the tail so every transition has positive probability
    traj.states[2] = world.mapping.to_state({1, 2}); // NE slip target wanted
    traj.states[3] = world.mapping.to_state({2, 2});
    traj.states[4] = traj.states[5] = traj.states[6] = world.mapping.to_state({2, 2});
    validate_trajectory(world.mdp, traj);
    demos.trajectories.push_back(traj);

    const double demo_mass = world.mdp.transition(from, grid_north, target);
    CHECK(demo_mass == doctest::Approx(0.1 / 7.0));
    const double floor = precursor_floor(world.mdp, target);
    CHECK(select_risk_level(world.mdp, demos, target) == std::max(demo_mass, floor));
}

TEST_CASE("a demo that deliberately enters the target forces a near-inactive threshold") {
    const GridworldModel world = grid3x3();
    const int center = world.mapping.to_state({1, 1});
    DemonstrationSet demos;
    demos.horizon = world.mdp.horizon();
    Trajectory traj;
    const int c12 = world.mapping.to_state({1, 2});
    const int c22 = world.mapping.to_state({2, 2});
    traj.states = {center, c12, c22, c22, c22, c22, c22};
    traj.actions = {grid_north, grid_northeast, grid_loiter, grid_loiter, grid_loiter, grid_loiter};
    validate_trajectory(world.mdp, traj);
    demos.trajectories.push_back(traj);
    CHECK(select_risk_level(world.mdp, demos, c12) >= 0.9);
}

TEST_CASE("lowering psi never turns an infeasible pair feasible") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Mdp mdp = oracle::random_mdp(seed);
        rng::CounterStream g = rng::substream(seed, 777);
        ConstraintSet c = ConstraintSet::unconstrained(mdp.num_states());
        for (int x = 0; x < mdp.num_states(); ++x) c.psi(x) = g.next_uniform();

        auto mask = feasibility_mask(mdp, c);
        for (int round = 0; round < 6; ++round) {
            const int x = g.next_below(mdp.num_states());
            c.psi(x) *= g.next_uniform();
            const auto tighter = feasibility_mask(mdp, c);
            for (int i = 0; i < mdp.num_states(); ++i)
                for (int a = 0; a < mdp.num_actions(); ++a)
                    if (!mask(i, a)) CHECK_FALSE(tighter(i, a));
            mask = tighter;
        }
    }
}

TEST_CASE("augmentation shrinks the feasible set pointwise") {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const Mdp mdp = oracle::random_mdp(seed);
        const ConstraintSet base = ConstraintSet::unconstrained(mdp.num_states());
        const CandidateConstraint cand = oracle::random_candidate(seed, mdp, base);
        const ConstraintSet aug = augment(base, cand);
        for (int x = 0; x < mdp.num_states(); ++x) {
            const auto w_base = feasible_actions(mdp, base, x);
            const auto w_aug = feasible_actions(mdp, aug, x);
            CHECK(std::includes(w_base.begin(), w_base.end(), w_aug.begin(), w_aug.end()));
        }
    }
}

TEST_CASE("selected thresholds never exclude sampled demonstrations") {
    GridSpec spec;
    spec.width = 4;
    spec.height = 4;
    spec.slip = 0.1;
    spec.start = {0, 0};
    spec.goal = {3, 3};
    spec.horizon = 8;
    const GridworldModel world = build_gridworld(spec);
    const DemonstrationSet demos =
        sample_demonstrations(world.mdp, world.ground_truth, world.start_state, 30, 9);

    for (int target = 0; target < world.mdp.num_states(); ++target) {
        const double psi = select_risk_level(world.mdp, demos, target);
        CHECK(psi >= precursor_floor(world.mdp, target));
        for (const Trajectory& traj : demos.trajectories) {
            for (std::size_t t = 0; t < traj.actions.size(); ++t) {
                CHECK(world.mdp.transition(traj.states[t], traj.actions[t], target) <= psi);
            }
        }
    }
}

TEST_CASE("augment validates strictness") {
    ConstraintSet base = ConstraintSet::unconstrained(3);
    base.psi(1) = 0.5;
    CHECK_THROWS_AS(augment(base, {CandidateConstraint::Kind::state, 1, 0.5}),
                    std::invalid_argument); // not strictly lower
    CHECK_THROWS_AS(augment(base, {CandidateConstraint::Kind::state, 1, 0.7}),
                    std::invalid_argument); // raises psi
    CHECK_THROWS_AS(augment(base, {CandidateConstraint::Kind::state, 5, 0.1}),
                    std::invalid_argument); // out of range
    const ConstraintSet with_action = augment(base, {CandidateConstraint::Kind::action, 2, 0.0});
    CHECK(with_action.action_forbidden(2));
    CHECK_THROWS_AS(augment(with_action, {CandidateConstraint::Kind::action, 2, 0.0}),
                    std::invalid_argument); // already forbidden
}
