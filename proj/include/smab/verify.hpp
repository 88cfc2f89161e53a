#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "smab/analysis.hpp"
#include "smab/experiment.hpp"
#include "smab/hard_instances.hpp"
#include "smab/policies.hpp"
#include "smab/stream_env.hpp"

namespace smab {

struct SuiteReport {
    std::string name;
    std::vector<BoundReport> checks;

    bool pass() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const BoundReport& c) { return c.pass(); });
    }
};

inline nlohmann::json to_json(const SuiteReport& report) {
    nlohmann::json checks = nlohmann::json::array();
    for (const BoundReport& c : report.checks) checks.push_back(to_json(c));
    return nlohmann::json{{"suite", report.name}, {"pass", report.pass()}, {"checks", checks}};
}

namespace detail {

constexpr double kKlTolerance = 1e-12;
constexpr double kInteriorClamp = 1e-6;

inline double clamp_interior(double x) {
    return std::min(1.0 - kInteriorClamp, std::max(kInteriorClamp, x));
}

}  // namespace detail

// KL divergence property grids: nonnegativity, the quadratic upper bound on
// d(mu, mu+zeta), convexity in each argument, monotone widening, the averaged
// sum bound, and the first-term lower bound. Each check reports the maximum
// violation over its grid; tolerance 1e-12.
inline SuiteReport verify_kl(std::uint64_t seed = 7) {
    SuiteReport report{"kl", {}};
    SeededRng rng(seed);

    {
        double worst = -1.0;
        for (double x = 0.0; x <= 1.0; x += 0.01) {
            for (double y = 0.01; y <= 0.99; y += 0.01) {
                worst = std::max(worst, -kl_bernoulli(x, y));
            }
        }
        report.checks.push_back({"nonnegativity", 0.0, worst, detail::kKlTolerance});
    }
    {
        // d(mu, mu+zeta) <= 4 zeta^2 on mu in [1/2, 5/8], zeta in (0, 1/8].
        double worst = -1.0;
        for (int i = 0; i <= 125; ++i) {
            const double mu = 0.5 + 1e-3 * i;
            for (int j = 1; j <= 125; ++j) {
                const double zeta = 1e-3 * j;
                worst = std::max(worst, kl_bernoulli(mu, mu + zeta) - 4.0 * zeta * zeta);
            }
        }
        report.checks.push_back({"quadratic-upper-bound", 0.0, worst, detail::kKlTolerance});
    }
    {
        SeededRng r = rng.stream(1);
        double worst_x = -1.0, worst_y = -1.0;
        for (int it = 0; it < 10000; ++it) {
            const double a = r.uniform(), b = r.uniform();
            const double y = detail::clamp_interior(r.uniform());
            worst_x = std::max(worst_x, kl_bernoulli(0.5 * (a + b), y) -
                                            0.5 * (kl_bernoulli(a, y) + kl_bernoulli(b, y)));
            const double x = r.uniform();
            const double c = detail::clamp_interior(r.uniform());
            const double d = detail::clamp_interior(r.uniform());
            worst_y = std::max(worst_y, kl_bernoulli(x, 0.5 * (c + d)) -
                                            0.5 * (kl_bernoulli(x, c) + kl_bernoulli(x, d)));
        }
        report.checks.push_back({"convexity-in-x", 0.0, worst_x, detail::kKlTolerance});
        report.checks.push_back({"convexity-in-y", 0.0, worst_y, detail::kKlTolerance});
    }
    {
        // d(p,q) >= d(x,y) whenever p <= x <= y <= q.
        SeededRng r = rng.stream(2);
        double worst = -1.0;
        for (int it = 0; it < 10000; ++it) {
            double v[4] = {r.uniform(), r.uniform(), r.uniform(), r.uniform()};
            std::sort(v, v + 4);
            const double p = detail::clamp_interior(v[0]);
            const double x = detail::clamp_interior(v[1]);
            const double y = detail::clamp_interior(v[2]);
            const double q = detail::clamp_interior(v[3]);
            worst = std::max(worst, kl_bernoulli(x, y) - kl_bernoulli(p, q));
        }
        report.checks.push_back({"monotone-widening", 0.0, worst, detail::kKlTolerance});
    }
    {
        // sum_{i: x_i < b} d(x_i, b) >= N d(a, b) for average a < b.
        SeededRng r = rng.stream(3);
        double worst = -1.0;
        for (int it = 0; it < 10000; ++it) {
            const int count = static_cast<int>(r.uniform_int(2, 50));
            std::vector<double> xs(static_cast<std::size_t>(count));
            double avg = 0.0;
            for (double& x : xs) {
                x = r.uniform();
                avg += x;
            }
            avg /= count;
            if (avg >= 1.0 - 2.0 * detail::kInteriorClamp) continue;
            const double b = detail::clamp_interior(avg + (1.0 - avg) * r.uniform());
            if (!(avg < b)) continue;
            double lhs = 0.0;
            for (double x : xs) {
                if (x < b) lhs += kl_bernoulli(x, b);
            }
            worst = std::max(worst, count * kl_bernoulli(avg, b) - lhs);
        }
        report.checks.push_back({"averaged-sum-bound", 0.0, worst, detail::kKlTolerance});
    }
    {
        // d(p,q) >= (r/(2+2r)) p ln(p/q) for 0 < q < p < 1, r = (p-q)/q.
        SeededRng r = rng.stream(4);
        double worst = -1.0;
        for (int it = 0; it < 10000; ++it) {
            double a = detail::clamp_interior(r.uniform());
            double b = detail::clamp_interior(r.uniform());
            if (a == b) continue;
            const double p = std::max(a, b);
            const double q = std::min(a, b);
            const double ratio = (p - q) / q;
            worst = std::max(worst, (ratio / (2.0 + 2.0 * ratio)) * p * std::log(p / q) -
                                        kl_bernoulli(p, q));
        }
        report.checks.push_back({"first-term-lower-bound", 0.0, worst, detail::kKlTolerance});
    }
    return report;
}

// Monte Carlo duel frequencies against exp(-L Delta^2 / 2) over a (Delta, L)
// grid, with 3 standard errors of slack.
inline SuiteReport verify_hoeffding(std::uint64_t seed = 11, int duels_per_cell = 10000) {
    SuiteReport report{"hoeffding", {}};
    const double gaps[] = {0.05, 0.1, 0.2};
    const long long lengths[] = {50, 100, 200};
    std::uint64_t stream = 0;
    for (double gap : gaps) {
        for (long long len : lengths) {
            SeededRng rng = SeededRng(seed).stream(stream++);
            const double mu_worse = 0.5 - gap / 2.0;
            const double mu_better = 0.5 + gap / 2.0;
            int beats = 0;
            for (int duel = 0; duel < duels_per_cell; ++duel) {
                long long sum_worse = 0, sum_better = 0;
                for (long long i = 0; i < len; ++i) {
                    sum_worse += rng.bernoulli(mu_worse);
                    sum_better += rng.bernoulli(mu_better);
                }
                if (sum_worse >= sum_better) ++beats;
            }
            const double freq = static_cast<double>(beats) / duels_per_cell;
            const double stderr_hat = std::sqrt(freq * (1.0 - freq) / duels_per_cell);
            char label[64];
            std::snprintf(label, sizeof(label), "delta=%.2f,L=%lld", gap, len);
            report.checks.push_back(
                {label, hoeffding_beat_bound(gap, len), freq, 3.0 * stderr_hat});
        }
    }
    return report;
}

// Mean pull count of the worse arm under UCB against the 8 log T / Delta^2
// bound, on the instance (0.6, 0.4).
inline SuiteReport verify_ucb_bound(std::uint64_t seed = 13, int trials = 200,
                                    long long horizon = 100000) {
    SuiteReport report{"ucb-bound", {}};
    const BanditInstance instance({0.6, 0.4});
    const double delta = 1.0 / (static_cast<double>(horizon) * static_cast<double>(horizon));
    double total_pulls = 0.0;
    for (int t = 0; t < trials; ++t) {
        StreamEnv env(instance, 2, horizon, SeededRng(seed).stream(static_cast<std::uint64_t>(t)));
        env.read_next();
        env.read_next();
        run_ucb(env, env.live_handles(), delta);
        total_pulls += static_cast<double>(env.trace().pulls(2));
    }
    const double gap = 0.2;
    const double bound = 8.0 * std::log(static_cast<double>(horizon)) / (gap * gap);
    report.checks.push_back({"mean-pulls-worse-arm", bound, total_pulls / trials, 0.0});
    return report;
}

// Structural audits over randomized configurations: single-pass reads, memory
// capacity, one pull per round, exact regret accounting, and the exact
// exploration round counts of both streaming policies.
inline SuiteReport verify_single_pass(std::uint64_t seed = 17, int configs = 1000) {
    SuiteReport report{"single-pass", {}};
    SeededRng master(seed);
    long long read_violations = 0, capacity_violations = 0, round_violations = 0;
    long long accounting_violations = 0, phase_violations = 0;

    for (int cfg_idx = 0; cfg_idx < configs; ++cfg_idx) {
        SeededRng cfg_rng = master.stream(static_cast<std::uint64_t>(cfg_idx));
        const int n = static_cast<int>(cfg_rng.uniform_int(3, 40));
        const int m = static_cast<int>(cfg_rng.uniform_int(2, n + 2));
        const long long horizon = cfg_rng.uniform_int(50, 4000);
        std::vector<double> means(static_cast<std::size_t>(n));
        for (double& mu : means) mu = cfg_rng.uniform();
        const BanditInstance instance(means);
        const GapVector gaps = gap_vector(instance);

        const TrialRow row = run_trial(instance, m, horizon, 1.0, "auto",
                                       seed ^ static_cast<std::uint64_t>(cfg_idx), 0,
                                       /*skip_exploitation=*/false, /*trace_events=*/true);

        std::vector<int> reads(static_cast<std::size_t>(n), 0);
        std::vector<long long> pulls(static_cast<std::size_t>(n), 0);
        std::vector<bool> stored(static_cast<std::size_t>(n), false);
        int occupancy = 0;
        long long pull_events = 0;
        for (const TraceEvent& ev : row.events) {
            const std::size_t a = static_cast<std::size_t>(ev.arm - 1);
            switch (ev.action) {
                case 'r':
                    if (++reads[a] > 1) ++read_violations;
                    stored[a] = true;
                    if (++occupancy > m) ++capacity_violations;
                    break;
                case 'd':
                    stored[a] = false;
                    --occupancy;
                    break;
                case 'p':
                    if (!stored[a]) ++round_violations;
                    ++pulls[a];
                    ++pull_events;
                    break;
            }
        }
        if (pull_events != row.L1 + row.L2) ++round_violations;
        if (row.truncated == 0 && pull_events != horizon) ++round_violations;
        // Recompute sum_i gap_i * T_i in the trace's own summation order.
        double recomputed = 0.0;
        for (std::size_t i = 0; i < pulls.size(); ++i) {
            if (pulls[i] != 0) recomputed += gaps.gaps()[i] * static_cast<double>(pulls[i]);
        }
        if (recomputed != row.regret) ++accounting_violations;

        if (row.truncated == 0) {
            long long expected_L1 = -1;
            if (row.policy == "large") {
                expected_L1 = 2 * static_cast<long long>(n - m) *
                              exploration_length_large(1.0, horizon, n);
            } else if (row.policy == "small") {
                expected_L1 =
                    static_cast<long long>(n) * exploration_length_small(1.0, horizon, m);
            } else {
                expected_L1 = 0;
            }
            if (row.L1 != expected_L1) ++phase_violations;
        }
    }
    report.checks.push_back({"single-pass-reads", 0.0, static_cast<double>(read_violations), 0.0});
    report.checks.push_back(
        {"memory-capacity", 0.0, static_cast<double>(capacity_violations), 0.0});
    report.checks.push_back({"one-pull-per-round", 0.0, static_cast<double>(round_violations), 0.0});
    report.checks.push_back(
        {"regret-accounting", 0.0, static_cast<double>(accounting_violations), 0.0});
    report.checks.push_back(
        {"exploration-round-counts", 0.0, static_cast<double>(phase_violations), 0.0});
    return report;
}

struct BarVerifyParams {
    int n = 20;        // mean template parameter of the k-arm instance
    int k = 16;        // arms in the retention input
    int retained = 8;  // arms kept (the streaming reduction keeps m-1)
    double eps = 0.005;
    long long duel_pulls = 16000;
    int trials = 500;
    double beta = 0.5;
};

// Duel-based retention on the k-arm hard input: random disjoint pairs, L
// pulls per arm, winners retained. Measures the best-arm loss rate and checks
// the sample count against the retention lower bound evaluated at that rate
// (minus 3 standard errors of Monte Carlo slack).
inline SuiteReport verify_bar_bound(std::uint64_t seed = 19, BarVerifyParams params = {}) {
    SuiteReport report{"bar-bound", {}};
    if (params.k != 2 * params.retained) {
        throw ConfigError("bar verification pairs all arms: k must equal 2*retained");
    }
    const BanditInstance instance = family_I0(params.n, params.k, 1, params.eps);

    int failures = 0;
    for (int t = 0; t < params.trials; ++t) {
        SeededRng rng = SeededRng(seed).stream(static_cast<std::uint64_t>(t));
        std::vector<int> order(static_cast<std::size_t>(params.k));
        std::iota(order.begin(), order.end(), 1);
        std::shuffle(order.begin(), order.end(), rng.engine());
        bool best_retained = false;
        for (int d = 0; d < params.retained; ++d) {
            const int first = order[static_cast<std::size_t>(2 * d)];
            const int second = order[static_cast<std::size_t>(2 * d + 1)];
            long long sum_first = 0, sum_second = 0;
            for (long long i = 0; i < params.duel_pulls; ++i) {
                sum_first += sample_reward(instance, first, rng);
                sum_second += sample_reward(instance, second, rng);
            }
            // Ties keep the first arm of the pair, as in the large-memory duel.
            const int winner = sum_second > sum_first ? second : first;
            if (winner == instance.best_index()) best_retained = true;
        }
        if (!best_retained) ++failures;
    }

    const double delta_hat = static_cast<double>(failures) / params.trials;
    const double stderr_hat = std::sqrt(delta_hat * (1.0 - delta_hat) / params.trials);
    const double mean_samples =
        static_cast<double>(params.k) * static_cast<double>(params.duel_pulls);

    const BarPreconditionReport pre = validate_bar_preconditions(
        params.n, params.k, params.retained, params.eps, delta_hat, params.beta);
    report.checks.push_back(
        {"eps-precondition", pre.eps_max, params.eps, 0.0});
    report.checks.push_back({"delta-precondition", pre.delta_max, delta_hat, 0.0});

    const double delta_conservative = std::max(delta_hat - 3.0 * stderr_hat, 1e-9);
    const BarBound bound = bar_sample_lower_bound(params.k, params.retained, params.eps,
                                                  delta_conservative, params.beta);
    report.checks.push_back({"sample-count-vs-lower-bound", mean_samples, bound.value, 0.0});
    return report;
}

inline SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "kl") return verify_kl(seed);
    if (name == "hoeffding") return verify_hoeffding(seed);
    if (name == "ucb-bound") return verify_ucb_bound(seed);
    if (name == "single-pass") return verify_single_pass(seed);
    if (name == "bar-bound") return verify_bar_bound(seed);
    throw ConfigError("unknown verification suite: " + name);
}

}  // namespace smab
