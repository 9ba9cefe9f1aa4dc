#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace cinfer {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// Max-shifted log(sum(exp(terms))). Entries may be -inf (absent terms);
/// returns -inf when every term is -inf or the expression is empty.
template <typename Derived>
double log_sum_exp(const Eigen::DenseBase<Derived>& terms) {
    const auto& t = terms.derived();
    double m = neg_inf;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        m = std::max(m, static_cast<double>(t(i)));
    }
    if (std::isinf(m) && m < 0) return neg_inf;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        sum += std::exp(static_cast<double>(t(i)) - m);
    }
    return m + std::log(sum);
}

} // namespace cinfer
