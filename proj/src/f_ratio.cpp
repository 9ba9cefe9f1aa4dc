#include "cinfer/f_ratio.hpp"

#include "cinfer/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace cinfer {

namespace {

// Actions newly excluded by the candidate relative to the base mask. For a
// state candidate that is any (x, a) whose mass into the target exceeds the
// lowered threshold; for an action candidate, the forbidden column.
bool candidate_excludes(const Mdp& mdp, const CandidateConstraint& cand, int x, int a) {
    if (cand.kind == CandidateConstraint::Kind::action) return a == cand.target;
    const double p = mdp.transition(a)(x, cand.target);
    return cand.psi < 1.0 && p > cand.psi + psi_slack;
}

} // namespace

CombinedBackupResult combined_backup(const Mdp& mdp, const ConstraintSet& base,
                                     const std::vector<CandidateConstraint>& candidates) {
    for (const CandidateConstraint& cand : candidates) {
        if (!strictly_augments(base, cand))
            throw std::invalid_argument("combined_backup: candidate does not strictly augment base");
    }

    const int nx = mdp.num_states();
    const int na = mdp.num_actions();
    const int horizon = mdp.horizon();

    CombinedBackupResult out;
    out.base = soft_backup(mdp, base);
    const auto base_mask = feasibility_mask(mdp, base);

    out.tables.reserve(candidates.size());
    Eigen::VectorXd delta_next(nx);
    Eigen::ArrayXd terms(na);
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const CandidateConstraint& cand = candidates[k];
        FTable table;
        table.candidate_id = static_cast<int>(k);
        table.delta = Eigen::MatrixXd::Zero(horizon + 1, nx); // F = 1 at the terminal step

        for (int t = horizon - 1; t >= 0; --t) {
            delta_next = table.delta.row(t + 1);
            for (int x = 0; x < nx; ++x) {
                const double v0 = out.base.v(t, x);
                if (std::isinf(v0) && v0 < 0) {
                    // both partition masses are zero; keep the ratio at 1
                    table.delta(t, x) = 0.0;
                    continue;
                }
                terms.setConstant(neg_inf);
                for (int a = 0; a < na; ++a) {
                    if (!base_mask(x, a) || candidate_excludes(mdp, cand, x, a)) continue;
                    terms(a) = out.base.q[t](x, a) - v0 +
                               expect_successors(mdp.successors(x, a), delta_next);
                }
                table.delta(t, x) = log_sum_exp(terms);
            }
        }
        out.tables.push_back(std::move(table));
    }
    return out;
}

double f_at_start(const FTable& table, int x0) {
    if (x0 < 0 || x0 >= table.delta.cols())
        throw std::out_of_range("f_at_start: state index out of bounds");
    return table.delta(0, x0);
}

} // namespace cinfer
