#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smab/errors.hpp"
#include "smab/policies.hpp"

namespace smab {

// KL divergence between Ber(x) and Ber(y), natural logarithm. Uses the
// 0 log 0 = 0 convention; y in {0,1} with x != y yields +infinity.
inline double kl_bernoulli(double x, double y) {
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("kl_bernoulli: x must lie in [0,1]");
    if (!(y >= 0.0 && y <= 1.0)) throw ConfigError("kl_bernoulli: y must lie in [0,1]");
    if (y <= 0.0 || y >= 1.0) {
        return x == y ? 0.0 : std::numeric_limits<double>::infinity();
    }
    double total = 0.0;
    if (x > 0.0) total += x * std::log(x / y);
    if (x < 1.0) total += (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
    return total;
}

// Pr[worse arm beats better arm in an L-vs-L duel] <= exp(-L Delta^2 / 2).
inline double hoeffding_beat_bound(double gap, long long duel_pulls) {
    if (!(gap > 0.0)) throw ConfigError("hoeffding_beat_bound requires gap > 0");
    if (duel_pulls < 0) throw ConfigError("hoeffding_beat_bound requires L >= 0");
    return std::exp(-static_cast<double>(duel_pulls) * gap * gap / 2.0);
}

// Sample-complexity lower bound for retaining m of k arms:
// (beta/32) ((k-m-delta)/eps^2) ln((k-m-delta)/((k-1) delta)).
struct BarBound {
    double value = 0.0;
    bool degenerate = false;  // log argument <= 1, bound vacuous
};

inline BarBound bar_sample_lower_bound(int k, int m, double eps, double delta, double beta) {
    if (!(m < k)) throw ConfigError("bar bound requires m < k");
    if (!(delta > 0.0 && delta < static_cast<double>(k - m))) {
        throw ConfigError("bar bound requires delta in (0, k-m)");
    }
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("bar bound requires beta in (0,1)");
    if (!(eps > 0.0)) throw ConfigError("bar bound requires eps > 0");
    const double numer = static_cast<double>(k - m) - delta;
    const double log_arg = numer / ((static_cast<double>(k) - 1.0) * delta);
    if (log_arg <= 1.0) return {0.0, true};
    return {(beta / 32.0) * (numer / (eps * eps)) * std::log(log_arg), false};
}

namespace detail {

inline double gap_power_sum(const std::vector<double>& gaps, double alpha) {
    double total = 0.0;
    for (double gap : gaps) {
        if (gap > 0.0) total += std::pow(gap, 1.0 - 2.0 * alpha);
    }
    return total;
}

}  // namespace detail

// Theorem-shaped reference magnitude for the upper bounds, with the explicit
// (2a/e)^{a/(a+1)} factor and the suppressed constant set to 1. A curve for
// slope comparison, not a certified bound.
inline double regret_upper_shape(double alpha, int n, int m, long long horizon,
                                 const std::vector<double>& gaps) {
    if (alpha < 1.0) throw ConfigError("alpha must be at least 1");
    const double base = std::pow(2.0 * alpha / std::exp(1.0), alpha / (alpha + 1.0));
    const double t_pow = std::pow(static_cast<double>(horizon), 1.0 / (alpha + 1.0));
    const double sum = detail::gap_power_sum(gaps, alpha);
    switch (select_policy(n, m)) {
        case PolicyTag::Large:
            return base * (static_cast<double>(n - m) * t_pow /
                           std::pow(static_cast<double>(n), 1.0 + 1.0 / (alpha + 1.0))) *
                   sum;
        case PolicyTag::Small:
            return base * (t_pow / std::pow(static_cast<double>(m), 1.0 / (alpha + 1.0))) * sum;
        case PolicyTag::PlainUcb:
            throw ConfigError("regret_upper_shape undefined for m >= n");
    }
    return 0.0;
}

// f(k,m) = (2/16^{a+1}) (k-m+1)/k^{1/(a+1)}.
inline double lower_bound_prefactor(double alpha, int k, int m) {
    return (2.0 / std::pow(16.0, alpha + 1.0)) * static_cast<double>(k - m + 1) /
           std::pow(static_cast<double>(k), 1.0 / (alpha + 1.0));
}

// Lower-bound magnitude: 16^{-a} (k-m+1) T^{1/(a+1)} / k^{1+1/(a+1)} * sum.
inline double regret_lower_shape(double alpha, int k, int m, long long horizon,
                                 const std::vector<double>& gaps) {
    if (alpha < 1.0) throw ConfigError("alpha must be at least 1");
    if (m > k + 1) throw ConfigError("regret_lower_shape requires m <= k+1");
    const double factor = static_cast<double>(k - m + 1);
    if (factor <= 0.0) return 0.0;
    return std::pow(16.0, -alpha) * factor *
           std::pow(static_cast<double>(horizon), 1.0 / (alpha + 1.0)) /
           std::pow(static_cast<double>(k), 1.0 + 1.0 / (alpha + 1.0)) *
           detail::gap_power_sum(gaps, alpha);
}

// Grid-search argmax of (k-m+1)/k^{1+1/(a+1)} over k in [m, n).
inline int best_hard_k(double alpha, int m, int n) {
    if (!(m >= 1 && m < n)) throw ConfigError("best_hard_k requires 1 <= m < n");
    int best_k = m;
    double best_val = -1.0;
    for (int k = m; k < n; ++k) {
        const double val = static_cast<double>(k - m + 1) /
                           std::pow(static_cast<double>(k), 1.0 + 1.0 / (alpha + 1.0));
        if (val > best_val) {
            best_val = val;
            best_k = k;
        }
    }
    return best_k;
}

// Least-squares power-law fit in log space.
struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_stderr = 0.0;
    int points = 0;
};

inline ScalingFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw ConfigError("log-log fit requires at least 2 points");
    std::vector<double> xs, ys;
    xs.reserve(points.size());
    ys.reserve(points.size());
    for (const auto& [x, y] : points) {
        if (!(x > 0.0 && y > 0.0)) throw ConfigError("log-log fit requires positive coordinates");
        xs.push_back(std::log(x));
        ys.push_back(std::log(y));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("log-log fit requires distinct abscissae");
    ScalingFit fit;
    fit.points = static_cast<int>(xs.size());
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ssr += r * r;
    }
    fit.residual_stderr = xs.size() > 2 ? std::sqrt(ssr / (n - 2.0)) : 0.0;
    return fit;
}

// Sample mean and 1.96 s/sqrt(N) half-width.
struct TrialAggregate {
    double mean = 0.0;
    double ci95_half_width = 0.0;
};

inline TrialAggregate aggregate_trials(const std::vector<double>& values) {
    if (values.size() < 2) throw ConfigError("aggregate_trials requires at least 2 trials");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, 1.96 * sd / std::sqrt(n)};
}

// One verified inequality: pass iff empirical <= bound + slack.
struct BoundReport {
    std::string label;
    double bound = 0.0;
    double empirical = 0.0;
    double slack = 0.0;

    bool pass() const { return empirical <= bound + slack; }
};

inline nlohmann::json to_json(const BoundReport& report) {
    return nlohmann::json{{"label", report.label},
                          {"bound", report.bound},
                          {"empirical", report.empirical},
                          {"slack", report.slack},
                          {"pass", report.pass()}};
}

}  // namespace smab
