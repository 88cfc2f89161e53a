#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "smab/errors.hpp"
#include "smab/stream_env.hpp"

namespace smab {

struct PolicyConfig {
    double alpha = 1.0;
    // Confidence parameter for the exploitation UCB. Unset means 1/T^2.
    std::optional<double> delta;
    // Diagnostics-only: stop once the exploitation phase would begin. Phase
    // statistics (L1, R1) are unaffected.
    bool skip_exploitation = false;

    double effective_delta(long long horizon) const {
        if (delta) {
            if (!(*delta > 0.0 && *delta < 1.0)) throw ConfigError("delta must be in (0,1)");
            return *delta;
        }
        const double t = static_cast<double>(horizon);
        return 1.0 / (t * t);
    }
};

enum class PolicyTag { Large, Small, PlainUcb };

inline std::string to_string(PolicyTag tag) {
    switch (tag) {
        case PolicyTag::Large: return "large";
        case PolicyTag::Small: return "small";
        case PolicyTag::PlainUcb: return "plain-ucb";
    }
    return "?";
}

// Integer ceiling of 2n/3, the regime threshold.
inline int large_memory_threshold(int n) { return (2 * n + 2) / 3; }

inline PolicyTag select_policy(int n, int m) {
    if (n < 1) throw ConfigError("n must be at least 1");
    if (m < 2) throw UnsupportedMemoryError("memory m must be at least 2");
    if (m >= n) return PolicyTag::PlainUcb;
    if (m >= large_memory_threshold(n)) return PolicyTag::Large;
    return PolicyTag::Small;
}

namespace detail {

inline long long exploration_length(double alpha, long long horizon, long long divisor) {
    const double base = std::pow(2.0 * alpha / std::exp(1.0), alpha / (alpha + 1.0));
    const double raw =
        base * std::pow(static_cast<double>(horizon) / static_cast<double>(divisor),
                        1.0 / (alpha + 1.0));
    return std::max<long long>(1, static_cast<long long>(std::ceil(raw)));
}

// Pull a stored arm `times` times; false means the budget ran out first.
inline bool pull_times(StreamEnv& env, SlotHandle handle, long long times) {
    for (long long i = 0; i < times; ++i) {
        if (env.rounds_remaining() <= 0) return false;
        env.pull(handle);
    }
    return true;
}

}  // namespace detail

// L for the large-memory policy: ceil((2a/e)^{a/(a+1)} (T/n)^{1/(a+1)}).
inline long long exploration_length_large(double alpha, long long horizon, int n) {
    if (alpha < 1.0) throw ConfigError("alpha must be at least 1");
    if (horizon < 1 || n < 1) throw ConfigError("T and n must be at least 1");
    return detail::exploration_length(alpha, horizon, n);
}

// L for the small-memory policy: ceil((2a/e)^{a/(a+1)} (T/m)^{1/(a+1)}).
inline long long exploration_length_small(double alpha, long long horizon, int m) {
    if (alpha < 1.0) throw ConfigError("alpha must be at least 1");
    if (horizon < 1) throw ConfigError("T must be at least 1");
    if (m < 2) throw ConfigError("m must be at least 2");
    return detail::exploration_length(alpha, horizon, m);
}

// UCB index with the never-pulled arm treated as +infinity.
inline double ucb_index(const ArmStats& stats, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0,1)");
    if (stats.pulls == 0) return std::numeric_limits<double>::infinity();
    return stats.empirical_mean() +
           std::sqrt(2.0 * std::log(1.0 / delta) / static_cast<double>(stats.pulls));
}

// Pull the argmax-index arm each round until the budget is gone. Ties break
// toward the lowest slot id. Only the pulled arm's index changes per round,
// so indices are cached and updated incrementally.
inline void run_ucb(StreamEnv& env, const std::vector<SlotHandle>& slots, double delta) {
    if (slots.empty()) throw ConfigError("run_ucb requires at least one stored arm");
    const double bonus_num = 2.0 * std::log(1.0 / delta);
    std::vector<double> index(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        index[i] = ucb_index(env.stats(slots[i]), delta);
    }
    while (env.rounds_remaining() > 0) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < slots.size(); ++i) {
            if (index[i] > index[best]) best = i;
        }
        env.pull(slots[best]);
        const ArmStats& st = env.stats(slots[best]);
        index[best] = st.empirical_mean() + std::sqrt(bonus_num / static_cast<double>(st.pulls));
    }
}

// Large-memory policy: store the first m arms, duel n-m sampled pairs, swap
// the losers for the tail of the stream, then exploit with UCB.
inline void run_alg_large(StreamEnv& env, const PolicyConfig& cfg, SeededRng& policy_rng) {
    const int n = env.n();
    const int m = env.capacity();
    if (m < large_memory_threshold(n) || m > n - 1) {
        throw RegimeError("large-memory policy requires ceil(2n/3) <= m <= n-1");
    }
    const long long horizon = env.horizon();
    const long long L = exploration_length_large(cfg.alpha, horizon, n);
    const int c = n - m;

    std::vector<SlotHandle> handles;
    handles.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) handles.push_back(env.read_next());

    // 2c distinct slots u.a.r. (partial Fisher-Yates).
    std::vector<int> order(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < 2 * c; ++i) {
        const int j = static_cast<int>(policy_rng.uniform_int(i, m - 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }

    bool exhausted = false;
    for (int d = 0; d < c && !exhausted; ++d) {
        const SlotHandle first = handles[static_cast<std::size_t>(order[static_cast<std::size_t>(2 * d)])];
        const SlotHandle second = handles[static_cast<std::size_t>(order[static_cast<std::size_t>(2 * d + 1)])];
        if (!detail::pull_times(env, first, L) || !detail::pull_times(env, second, L)) {
            exhausted = true;
            break;
        }
        // Equal empirical means discard the second arm of the pair.
        if (env.stats(first).empirical_mean() < env.stats(second).empirical_mean()) {
            env.discard(first);
        } else {
            env.discard(second);
        }
        env.read_next();
    }

    if (exhausted) {
        env.mark_truncated();
        env.mark_exploitation_start();
        return;
    }
    env.mark_exploitation_start();
    if (!cfg.skip_exploitation) {
        run_ucb(env, env.live_handles(), cfg.effective_delta(horizon));
    }
}

// Small-memory policy: keep m-1 incumbents, give every arriving challenger L
// pulls against a uniformly chosen incumbent, then exploit with UCB.
inline void run_alg_small(StreamEnv& env, const PolicyConfig& cfg, SeededRng& policy_rng) {
    const int n = env.n();
    const int m = env.capacity();
    if (m < 2 || m >= large_memory_threshold(n) || m >= n) {
        throw RegimeError("small-memory policy requires 2 <= m < ceil(2n/3)");
    }
    const long long horizon = env.horizon();
    const long long L = exploration_length_small(cfg.alpha, horizon, m);

    std::vector<SlotHandle> incumbents;
    incumbents.reserve(static_cast<std::size_t>(m - 1));
    for (int i = 0; i < m - 1; ++i) incumbents.push_back(env.read_next());

    bool exhausted = false;
    for (const SlotHandle& h : incumbents) {
        if (!detail::pull_times(env, h, L)) {
            exhausted = true;
            break;
        }
    }

    while (!exhausted && env.cursor() <= n) {
        const std::size_t pick =
            static_cast<std::size_t>(policy_rng.uniform_int(0, static_cast<std::int64_t>(incumbents.size()) - 1));
        const SlotHandle incumbent = incumbents[pick];
        const SlotHandle challenger = env.read_next();
        if (!detail::pull_times(env, challenger, L)) {
            exhausted = true;
            break;
        }
        // Strict ">" required to evict the incumbent; ties keep it.
        if (env.stats(challenger).empirical_mean() > env.stats(incumbent).empirical_mean()) {
            env.discard(incumbent);
            incumbents[pick] = challenger;
        } else {
            env.discard(challenger);
        }
    }

    if (exhausted) {
        env.mark_truncated();
        env.mark_exploitation_start();
        return;
    }
    env.mark_exploitation_start();
    if (!cfg.skip_exploitation) {
        run_ucb(env, env.live_handles(), cfg.effective_delta(horizon));
    }
}

// m >= n: the streaming constraint is vacuous; store everything and run UCB.
inline void run_plain_ucb(StreamEnv& env, const PolicyConfig& cfg) {
    const int n = env.n();
    if (env.capacity() < n) throw RegimeError("plain UCB requires m >= n");
    for (int i = 0; i < n; ++i) env.read_next();
    env.mark_exploitation_start();
    if (!cfg.skip_exploitation) {
        run_ucb(env, env.live_handles(), cfg.effective_delta(env.horizon()));
    }
}

// Run the policy selected by the (n, m) regime.
inline PolicyTag run_policy(StreamEnv& env, const PolicyConfig& cfg, SeededRng& policy_rng,
                            std::optional<PolicyTag> forced = std::nullopt) {
    const PolicyTag tag = forced ? *forced : select_policy(env.n(), env.capacity());
    switch (tag) {
        case PolicyTag::Large: run_alg_large(env, cfg, policy_rng); break;
        case PolicyTag::Small: run_alg_small(env, cfg, policy_rng); break;
        case PolicyTag::PlainUcb: run_plain_ucb(env, cfg); break;
    }
    return tag;
}

}  // namespace smab
