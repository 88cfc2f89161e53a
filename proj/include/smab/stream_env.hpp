#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smab/errors.hpp"
#include "smab/instance.hpp"
#include "smab/rng.hpp"

namespace smab {

// The only state a policy may keep about a stored arm.
struct ArmStats {
    int arm = 0;
    long long pulls = 0;
    long long reward_sum = 0;

    // Defined only when pulls >= 1.
    double empirical_mean() const {
        return static_cast<double>(reward_sum) / static_cast<double>(pulls);
    }
};

// Opaque reference to a memory slot. Stale after the slot is discarded.
struct SlotHandle {
    int slot = -1;
    std::uint64_t generation = 0;
};

struct TraceEvent {
    long long round;  // rounds used after the event
    char action;      // 'r' read, 'd' discard, 'p' pull
    int arm;
    int reward;  // -1 for non-pull events
    double cum_pseudo_regret;
};

// Pull counts, pseudo-regret, and the exploration/exploitation phase split.
// Cumulative pseudo-regret is always computed as sum_i gap_i * T_i, so the
// accounting identity holds by construction.
class RegretTrace {
public:
    RegretTrace() = default;
    explicit RegretTrace(const GapVector& gaps)
        : gaps_(gaps.gaps()), pull_counts_(gaps.gaps().size(), 0) {}

    long long rounds_used() const { return rounds_; }
    long long pulls(int arm) const { return pull_counts_.at(static_cast<std::size_t>(arm - 1)); }
    const std::vector<long long>& pull_counts() const { return pull_counts_; }
    long long realized_reward() const { return realized_sum_; }

    double pseudo_regret() const { return weighted(pull_counts_); }

    bool marked() const { return mark_.has_value(); }
    bool truncated() const { return truncated_; }

    // L1/L2: rounds before/after the exploitation mark. If the policy never
    // marked, the whole run counts as exploration (L2 = 0).
    long long l1() const { return marked() ? *mark_ : rounds_; }
    long long l2() const { return rounds_ - l1(); }
    double r1() const { return marked() ? weighted(pulls_at_mark_) : pseudo_regret(); }
    double r2() const { return pseudo_regret() - r1(); }

    // Arm ids stored in memory when the exploitation phase began.
    const std::vector<int>& stored_at_mark() const { return stored_at_mark_; }

    const std::vector<TraceEvent>& events() const { return events_; }
    void enable_events() { record_events_ = true; }

private:
    friend class StreamEnv;

    double weighted(const std::vector<long long>& counts) const {
        double total = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] != 0) total += gaps_[i] * static_cast<double>(counts[i]);
        }
        return total;
    }

    void record(char action, int arm, int reward) {
        if (record_events_) {
            events_.push_back({rounds_, action, arm, reward, pseudo_regret()});
        }
    }

    std::vector<double> gaps_;
    std::vector<long long> pull_counts_;
    long long rounds_ = 0;
    long long realized_sum_ = 0;
    std::optional<long long> mark_;
    std::vector<long long> pulls_at_mark_;
    std::vector<int> stored_at_mark_;
    bool truncated_ = false;
    bool record_events_ = false;
    std::vector<TraceEvent> events_;
};

// Round-based game state enforcing the single-pass, m-slot, T-round streaming
// model. Policies interact with arms only through slot handles and ArmStats;
// the true means never cross this interface.
class StreamEnv {
public:
    StreamEnv(BanditInstance instance, int m, long long horizon, SeededRng rng)
        : instance_(std::move(instance)),
          gaps_(gap_vector(instance_)),
          capacity_(m),
          horizon_(horizon),
          rng_(std::move(rng)),
          trace_(gaps_) {
        if (m < 1) throw ConfigError("memory capacity m must be at least 1");
        if (horizon < 1) throw ConfigError("horizon T must be at least 1");
        slots_.resize(static_cast<std::size_t>(m));
    }

    int n() const { return instance_.n(); }
    int capacity() const { return capacity_; }
    long long horizon() const { return horizon_; }
    long long rounds_used() const { return trace_.rounds_; }
    long long rounds_remaining() const { return horizon_ - trace_.rounds_; }
    int cursor() const { return cursor_; }
    int stored_count() const { return stored_; }

    // Next unread arm enters memory with zeroed statistics. Free of charge.
    SlotHandle read_next() {
        if (stored_ >= capacity_) throw CapacityError("memory full");
        if (cursor_ > instance_.n()) throw EndOfStreamError("stream exhausted");
        for (std::size_t s = 0; s < slots_.size(); ++s) {
            if (!slots_[s].occupied) {
                slots_[s].occupied = true;
                slots_[s].stats = ArmStats{cursor_, 0, 0};
                ++stored_;
                ++cursor_;
                trace_.record('r', slots_[s].stats.arm, -1);
                return SlotHandle{static_cast<int>(s), slots_[s].generation};
            }
        }
        throw CapacityError("memory full");  // unreachable
    }

    // Frees the slot. The arm's statistics are gone and it can never re-enter.
    void discard(SlotHandle handle) {
        Slot& s = resolve(handle);
        trace_.record('d', s.stats.arm, -1);
        s.occupied = false;
        ++s.generation;
        --stored_;
    }

    // Pull a stored arm: consumes exactly one round.
    int pull(SlotHandle handle) {
        Slot& s = resolve(handle);
        if (trace_.rounds_ >= horizon_) throw BudgetExhaustedError("round budget exhausted");
        const int reward = rng_.bernoulli(instance_.mean(s.stats.arm));
        ++s.stats.pulls;
        s.stats.reward_sum += reward;
        ++trace_.rounds_;
        trace_.realized_sum_ += reward;
        ++trace_.pull_counts_[static_cast<std::size_t>(s.stats.arm - 1)];
        trace_.record('p', s.stats.arm, reward);
        return reward;
    }

    // Splits the trace into (L1, R1) before this round and (L2, R2) after.
    void mark_exploitation_start() {
        if (trace_.marked()) throw StateError("exploitation start already marked");
        trace_.mark_ = trace_.rounds_;
        trace_.pulls_at_mark_ = trace_.pull_counts_;
        trace_.stored_at_mark_.clear();
        for (const Slot& s : slots_) {
            if (s.occupied) trace_.stored_at_mark_.push_back(s.stats.arm);
        }
    }

    void mark_truncated() { trace_.truncated_ = true; }

    const ArmStats& stats(SlotHandle handle) const { return resolve(handle).stats; }

    bool valid(SlotHandle handle) const {
        return handle.slot >= 0 && handle.slot < capacity_ &&
               slots_[static_cast<std::size_t>(handle.slot)].occupied &&
               slots_[static_cast<std::size_t>(handle.slot)].generation == handle.generation;
    }

    // Live handles in slot order (the tie-break order for UCB).
    std::vector<SlotHandle> live_handles() const {
        std::vector<SlotHandle> out;
        out.reserve(static_cast<std::size_t>(stored_));
        for (std::size_t s = 0; s < slots_.size(); ++s) {
            if (slots_[s].occupied) out.push_back({static_cast<int>(s), slots_[s].generation});
        }
        return out;
    }

    const BanditInstance& instance() const { return instance_; }
    const GapVector& gaps() const { return gaps_; }
    RegretTrace& trace() { return trace_; }
    const RegretTrace& trace() const { return trace_; }

private:
    struct Slot {
        ArmStats stats;
        std::uint64_t generation = 1;
        bool occupied = false;
    };

    Slot& resolve(SlotHandle handle) {
        if (!valid(handle)) throw InvalidSlotError("stale or invalid slot handle");
        return slots_[static_cast<std::size_t>(handle.slot)];
    }
    const Slot& resolve(SlotHandle handle) const {
        if (!valid(handle)) throw InvalidSlotError("stale or invalid slot handle");
        return slots_[static_cast<std::size_t>(handle.slot)];
    }

    BanditInstance instance_;
    GapVector gaps_;
    int capacity_;
    long long horizon_;
    SeededRng rng_;
    std::vector<Slot> slots_;
    int stored_ = 0;
    int cursor_ = 1;
    RegretTrace trace_;
};

}  // namespace smab
