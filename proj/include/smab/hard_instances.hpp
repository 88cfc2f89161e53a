#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "smab/errors.hpp"
#include "smab/instance.hpp"

namespace smab {

// epsilon = (1/4) (k/T)^{1/(2+2a)}.
inline double hard_epsilon(long long k, long long horizon, double alpha) {
    if (k < 1 || k > horizon) throw ConfigError("epsilon requires 1 <= k <= T");
    if (alpha < 1.0) throw ConfigError("alpha must be at least 1");
    return 0.25 * std::pow(static_cast<double>(k) / static_cast<double>(horizon),
                           1.0 / (2.0 + 2.0 * alpha));
}

namespace detail {

inline void check_family_args(int n, int k, int best_pos, double eps) {
    if (!(best_pos >= 1 && best_pos <= k && k < n)) {
        throw ConfigError("hard family requires 1 <= i <= k < n");
    }
    if (!(eps > 0.0)) throw ConfigError("epsilon must be positive");
    if ((static_cast<double>(n) + 1.0) * eps > 0.5) {
        std::ostringstream msg;
        msg << "epsilon too large for n: (n+1)*eps = " << (n + 1) * eps << " exceeds 1/2";
        throw ValidationError(msg.str());
    }
}

// Head of nu_i: arm 1 at 1/2+n*eps, arm i (i >= 2) at 1/2+(n+1)*eps, the other
// head arms at 1/2+(n-1)*eps. Means reference n even when only k arms are emitted.
inline std::vector<double> family_head(int n, int k, int best_pos, double eps) {
    std::vector<double> head(static_cast<std::size_t>(k), 0.5 + (n - 1) * eps);
    head[0] = 0.5 + n * eps;
    if (best_pos >= 2) head[static_cast<std::size_t>(best_pos - 1)] = 0.5 + (n + 1) * eps;
    return head;
}

}  // namespace detail

// Family I: hard head, tail arms at 1/2.
inline BanditInstance family_I(int n, int k, int best_pos, double eps) {
    detail::check_family_args(n, k, best_pos, eps);
    std::vector<double> means = detail::family_head(n, k, best_pos, eps);
    means.resize(static_cast<std::size_t>(n), 0.5);
    return BanditInstance(std::move(means));
}

// Family I': same head, tail arms at 1 (the non-unique-best variant).
inline BanditInstance family_Iprime(int n, int k, int best_pos, double eps) {
    detail::check_family_args(n, k, best_pos, eps);
    std::vector<double> means = detail::family_head(n, k, best_pos, eps);
    means.resize(static_cast<std::size_t>(n), 1.0);
    return BanditInstance(std::move(means));
}

// Family I0: the k-arm head of nu_i, for the retention problem.
inline BanditInstance family_I0(int n, int k, int best_pos, double eps) {
    detail::check_family_args(n, k, best_pos, eps);
    return BanditInstance(detail::family_head(n, k, best_pos, eps));
}

// Soft report for the retention lower bound hypotheses:
// eps <= 1/(8(n-1)) and delta <= ((k-m)/k)(1-beta).
struct BarPreconditionReport {
    bool eps_ok = false;
    double eps_max = 0.0;
    bool delta_ok = false;
    double delta_max = 0.0;

    bool all_ok() const { return eps_ok && delta_ok; }
};

inline BarPreconditionReport validate_bar_preconditions(int n, int k, int m, double eps,
                                                        double delta, double beta) {
    BarPreconditionReport report;
    report.eps_max = 1.0 / (8.0 * (static_cast<double>(n) - 1.0));
    report.eps_ok = eps <= report.eps_max;
    report.delta_max = (static_cast<double>(k - m) / static_cast<double>(k)) * (1.0 - beta);
    report.delta_ok = delta <= report.delta_max;
    return report;
}

}  // namespace smab
