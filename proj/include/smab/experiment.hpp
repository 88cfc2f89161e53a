#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "smab/analysis.hpp"
#include "smab/errors.hpp"
#include "smab/hard_instances.hpp"
#include "smab/instance.hpp"
#include "smab/policies.hpp"
#include "smab/stream_env.hpp"

namespace smab {

enum class InstanceKind { ExplicitMeans, HardFamily, UniformGaps };

struct InstanceSource {
    InstanceKind kind = InstanceKind::ExplicitMeans;

    std::vector<double> means;  // ExplicitMeans

    // HardFamily: one of "I", "Iprime", "I0". epsilon derives from (k, T, alpha)
    // unless overridden.
    std::string family = "I";
    int k = 0;
    int best_pos = 1;
    std::optional<double> eps_override;

    // UniformGaps: best arm mean `top`, the rest at top - U[gap_lo, gap_hi).
    double top = 0.9;
    double gap_lo = 0.1;
    double gap_hi = 0.4;

    // Optional stream-order shuffle (the hard families are emitted in the
    // written order otherwise).
    std::optional<std::uint64_t> permute_seed;
};

inline BanditInstance build_instance(const InstanceSource& source, int n, long long horizon,
                                     double alpha, std::uint64_t master_seed) {
    std::vector<double> means;
    switch (source.kind) {
        case InstanceKind::ExplicitMeans:
            means = source.means;
            break;
        case InstanceKind::HardFamily: {
            const double eps = source.eps_override
                                   ? *source.eps_override
                                   : hard_epsilon(source.k, horizon, alpha);
            if (source.family == "I") {
                means = family_I(n, source.k, source.best_pos, eps).means();
            } else if (source.family == "Iprime") {
                means = family_Iprime(n, source.k, source.best_pos, eps).means();
            } else if (source.family == "I0") {
                means = family_I0(n, source.k, source.best_pos, eps).means();
            } else {
                throw ConfigError("unknown hard family: " + source.family);
            }
            break;
        }
        case InstanceKind::UniformGaps: {
            if (n < 1) throw ConfigError("uniform-gap source requires n >= 1");
            SeededRng rng = SeededRng(master_seed).stream(0);
            means.assign(static_cast<std::size_t>(n), 0.0);
            means[0] = source.top;
            for (int i = 1; i < n; ++i) {
                const double gap =
                    source.gap_lo + (source.gap_hi - source.gap_lo) * rng.uniform();
                means[static_cast<std::size_t>(i)] = source.top - gap;
            }
            break;
        }
    }
    if (source.permute_seed) {
        SeededRng perm(*source.permute_seed);
        std::shuffle(means.begin(), means.end(), perm.engine());
    }
    return BanditInstance(std::move(means));
}

// One Monte Carlo study: policy, grids over (m, T), instance source, trials.
struct ExperimentSpec {
    std::string policy = "auto";  // auto | large | small | plain-ucb
    int n = 0;
    std::vector<int> m_grid;
    std::vector<long long> T_grid;
    double alpha = 1.0;
    InstanceSource source;
    int trials = 1;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool trace = false;
    bool skip_exploitation = false;  // diagnostics: exploration phase only
};

inline void validate_spec(const ExperimentSpec& spec) {
    if (spec.trials < 1) throw ConfigError("trials must be at least 1");
    if (spec.m_grid.empty()) throw ConfigError("m grid must be non-empty");
    if (spec.T_grid.empty()) throw ConfigError("T grid must be non-empty");
    for (std::size_t i = 1; i < spec.T_grid.size(); ++i) {
        if (spec.T_grid[i] <= spec.T_grid[i - 1]) {
            throw ConfigError("T grid entries must be strictly increasing");
        }
    }
    if (spec.jobs < 1) throw ConfigError("jobs must be at least 1");
    if (spec.policy != "auto" && spec.policy != "large" && spec.policy != "small" &&
        spec.policy != "plain-ucb") {
        throw ConfigError("policy must be auto, large, small, or plain-ucb");
    }
}

struct TrialRow {
    int trial = 0;
    std::string policy;
    int n = 0;
    int m = 0;
    long long T = 0;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    double regret = 0.0;
    double realized_regret = 0.0;
    long long L1 = 0;
    double R1 = 0.0;
    long long L2 = 0;
    double R2 = 0.0;
    int best_retained = 0;
    int truncated = 0;
    std::vector<TraceEvent> events;  // populated only when tracing
};

namespace detail {

inline std::optional<PolicyTag> parse_forced_policy(const std::string& policy) {
    if (policy == "auto") return std::nullopt;
    if (policy == "large") return PolicyTag::Large;
    if (policy == "small") return PolicyTag::Small;
    if (policy == "plain-ucb") return PolicyTag::PlainUcb;
    throw ConfigError("unknown policy tag: " + policy);
}

}  // namespace detail

// Each trial's randomness is a pure function of (master seed, trial index):
// stream 0 is reserved for instance generation, streams 2t+1 / 2t+2 drive the
// environment and the policy of trial t.
inline TrialRow run_trial(const BanditInstance& instance, int m, long long horizon, double alpha,
                          const std::string& policy, std::uint64_t master_seed, int trial,
                          bool skip_exploitation = false, bool trace_events = false) {
    SeededRng base(master_seed);
    StreamEnv env(instance, m, horizon,
                  base.stream(2 * static_cast<std::uint64_t>(trial) + 1));
    SeededRng policy_rng = base.stream(2 * static_cast<std::uint64_t>(trial) + 2);
    if (trace_events) env.trace().enable_events();

    PolicyConfig cfg;
    cfg.alpha = alpha;
    cfg.skip_exploitation = skip_exploitation;
    const PolicyTag tag = run_policy(env, cfg, policy_rng, detail::parse_forced_policy(policy));

    const RegretTrace& trace = env.trace();
    TrialRow row;
    row.trial = trial;
    row.policy = to_string(tag);
    row.n = instance.n();
    row.m = m;
    row.T = horizon;
    row.alpha = alpha;
    row.seed = master_seed;
    row.regret = trace.pseudo_regret();
    row.realized_regret = static_cast<double>(trace.rounds_used()) * instance.best_mean() -
                          static_cast<double>(trace.realized_reward());
    row.L1 = trace.l1();
    row.R1 = trace.r1();
    row.L2 = trace.l2();
    row.R2 = trace.r2();
    const auto& stored =
        trace.marked() ? trace.stored_at_mark() : [&] {
            std::vector<int> live;
            for (const SlotHandle& h : env.live_handles()) live.push_back(env.stats(h).arm);
            return live;
        }();
    row.best_retained = 0;
    for (int arm : stored) {
        if (instance.mean(arm) == instance.best_mean()) {
            row.best_retained = 1;
            break;
        }
    }
    row.truncated = trace.truncated() ? 1 : 0;
    if (trace_events) row.events = trace.events();
    return row;
}

struct PointResult {
    int n = 0;
    int m = 0;
    long long T = 0;
    std::vector<TrialRow> rows;
    TrialAggregate regret;
    TrialAggregate realized;
    double mean_L1 = 0.0;
    double mean_R1 = 0.0;
    double mean_L2 = 0.0;
    double mean_R2 = 0.0;
    double best_retained_rate = 0.0;
    int truncated_count = 0;
};

struct RunResult {
    ExperimentSpec spec;
    std::vector<PointResult> points;
};

// Runs every (m, T) grid point. Worker count affects wall time only; rows are
// gathered by trial index before aggregation.
inline RunResult run_experiment(const ExperimentSpec& spec) {
    validate_spec(spec);
    RunResult result;
    result.spec = spec;
    for (int m : spec.m_grid) {
        for (long long horizon : spec.T_grid) {
            const BanditInstance instance =
                build_instance(spec.source, spec.n, horizon, spec.alpha, spec.seed);
            PointResult point;
            point.n = instance.n();
            point.m = m;
            point.T = horizon;
            point.rows.resize(static_cast<std::size_t>(spec.trials));

            std::atomic<int> next{0};
            auto worker = [&] {
                for (int t = next.fetch_add(1); t < spec.trials; t = next.fetch_add(1)) {
                    point.rows[static_cast<std::size_t>(t)] =
                        run_trial(instance, m, horizon, spec.alpha, spec.policy, spec.seed, t,
                                  spec.skip_exploitation, spec.trace);
                }
            };
            if (spec.jobs == 1 || spec.trials == 1) {
                worker();
            } else {
                std::vector<std::thread> pool;
                const int workers = std::min(spec.jobs, spec.trials);
                pool.reserve(static_cast<std::size_t>(workers));
                for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
                for (auto& th : pool) th.join();
            }

            std::vector<double> regrets, realized;
            for (const TrialRow& row : point.rows) {
                regrets.push_back(row.regret);
                realized.push_back(row.realized_regret);
                point.mean_L1 += static_cast<double>(row.L1);
                point.mean_R1 += row.R1;
                point.mean_L2 += static_cast<double>(row.L2);
                point.mean_R2 += row.R2;
                point.best_retained_rate += row.best_retained;
                point.truncated_count += row.truncated;
            }
            const double nt = static_cast<double>(spec.trials);
            point.mean_L1 /= nt;
            point.mean_R1 /= nt;
            point.mean_L2 /= nt;
            point.mean_R2 /= nt;
            point.best_retained_rate /= nt;
            if (spec.trials >= 2) {
                point.regret = aggregate_trials(regrets);
                point.realized = aggregate_trials(realized);
            } else {
                point.regret = {regrets[0], 0.0};
                point.realized = {realized[0], 0.0};
            }
            result.points.push_back(std::move(point));
        }
    }
    return result;
}

// Log-log slope of mean regret against the swept variable (T or m). Exactly
// one of the grids may hold more than one value.
inline ScalingFit sweep_fit(const RunResult& result) {
    const bool sweep_T = result.spec.T_grid.size() > 1;
    const bool sweep_m = result.spec.m_grid.size() > 1;
    if (sweep_T && sweep_m) throw ConfigError("sweep over T and m at once is ambiguous");
    if (!sweep_T && !sweep_m) throw ConfigError("sweep requires at least 2 grid points");
    std::vector<std::pair<double, double>> points;
    for (const PointResult& point : result.points) {
        points.emplace_back(sweep_T ? static_cast<double>(point.T) : static_cast<double>(point.m),
                            point.regret.mean);
    }
    return fit_loglog_slope(points);
}

namespace detail {

inline std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

inline std::string csv_row(const std::string& trial, const std::string& policy, int n, int m,
                           long long T, double alpha, std::uint64_t seed, double regret,
                           double realized, double L1, double R1, double L2, double R2,
                           double best_retained, double truncated) {
    char head[160];
    std::snprintf(head, sizeof(head), "%s,%s,%d,%d,%lld,%.6g,%llu,", trial.c_str(),
                  policy.c_str(), n, m, T, alpha, static_cast<unsigned long long>(seed));
    std::string row = head;
    row += format_double(regret) + ',' + format_double(realized) + ',' + format_double(L1) + ',' +
           format_double(R1) + ',' + format_double(L2) + ',' + format_double(R2) + ',' +
           format_double(best_retained) + ',' + format_double(truncated);
    return row;
}

}  // namespace detail

inline const char* kCsvHeader =
    "trial,policy,n,m,T,alpha,seed,regret,realized_regret,L1,R1,L2,R2,best_retained,truncated";

// Fixed-order CSV: one row per trial plus "mean"/"ci95" aggregate rows per
// grid point. The ci95 row carries half-widths in the regret columns.
inline std::string to_csv(const RunResult& result) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const PointResult& point : result.points) {
        std::string policy = point.rows.empty() ? result.spec.policy : point.rows.front().policy;
        for (const TrialRow& row : point.rows) {
            out += detail::csv_row(std::to_string(row.trial), row.policy, row.n, row.m, row.T,
                                   row.alpha, row.seed, row.regret, row.realized_regret,
                                   static_cast<double>(row.L1), row.R1,
                                   static_cast<double>(row.L2), row.R2,
                                   static_cast<double>(row.best_retained),
                                   static_cast<double>(row.truncated));
            out += '\n';
        }
        out += detail::csv_row("mean", policy, point.n, point.m, point.T, result.spec.alpha,
                               result.spec.seed, point.regret.mean, point.realized.mean,
                               point.mean_L1, point.mean_R1, point.mean_L2, point.mean_R2,
                               point.best_retained_rate,
                               static_cast<double>(point.truncated_count));
        out += '\n';
        out += detail::csv_row("ci95", policy, point.n, point.m, point.T, result.spec.alpha,
                               result.spec.seed, point.regret.ci95_half_width,
                               point.realized.ci95_half_width, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        out += '\n';
    }
    return out;
}

// Per-round event log, one file-wide table: trial,round,action,arm,reward,regret.
inline std::string to_trace_csv(const RunResult& result) {
    std::string out = "trial,round,action,arm,reward,cum_pseudo_regret\n";
    for (const PointResult& point : result.points) {
        for (const TrialRow& row : point.rows) {
            for (const TraceEvent& ev : row.events) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), "%d,%lld,%c,%d,%d,%s\n", row.trial, ev.round,
                              ev.action, ev.arm, ev.reward,
                              detail::format_double(ev.cum_pseudo_regret).c_str());
                out += buf;
            }
        }
    }
    return out;
}

}  // namespace smab
