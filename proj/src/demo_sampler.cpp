#include "cinfer/demo_sampler.hpp"

#include "cinfer/rng.hpp"
#include "cinfer/soft_bellman.hpp"

#include <stdexcept>

namespace cinfer {

DemonstrationSet sample_demonstrations(const Mdp& mdp, const ConstraintSet& c, int x0, int n,
                                       std::uint64_t seed) {
    mdp.check_state(x0);
    if (n < 0) throw std::invalid_argument("sample_demonstrations: n must be >= 0");
    if (feasible_actions(mdp, c, x0).empty())
        throw std::invalid_argument("sample_demonstrations: start state has no feasible action");

    const SoftBackupResult backup = soft_backup(mdp, c);
    const Policy policy = policy_from_backup(mdp, c, backup);
    const int horizon = mdp.horizon();

    DemonstrationSet demos;
    demos.horizon = horizon;
    demos.meta.seed = seed;
    demos.meta.generator = "splitmix64-counter";
    demos.trajectories.reserve(n);

    std::uint64_t attempt = 0;
    while (static_cast<int>(demos.trajectories.size()) < n) {
        rng::CounterStream stream = rng::substream(seed, attempt++);
        Trajectory traj;
        traj.states.reserve(horizon + 1);
        traj.actions.reserve(horizon);
        traj.states.push_back(x0);
        bool aborted = false;
        for (int t = 0; t < horizon; ++t) {
            const int x = traj.states.back();
            const int a = rng::sample_categorical(policy.prob[t].row(x).transpose(),
                                                  stream.next_uniform());
            if (a < 0) { // dead end: no feasible continuation under c
                aborted = true;
                break;
            }
            const int xp = rng::sample_categorical(mdp.transition(a).row(x).transpose(),
                                                   stream.next_uniform());
            traj.actions.push_back(a);
            traj.states.push_back(xp);
        }
        if (aborted) {
            ++demos.meta.abort_count;
            continue;
        }
        demos.trajectories.push_back(std::move(traj));
    }
    return demos;
}

} // namespace cinfer
