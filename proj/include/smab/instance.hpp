#pragma once

#include <algorithm>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "smab/errors.hpp"
#include "smab/rng.hpp"

namespace smab {

// A bandit instance: an ordered vector of Bernoulli success probabilities.
// Arm indices are 1-based everywhere in this library.
class BanditInstance {
public:
    explicit BanditInstance(std::vector<double> means) : means_(std::move(means)) {
        if (means_.empty()) {
            throw ValidationError("instance requires at least one arm");
        }
        for (std::size_t i = 0; i < means_.size(); ++i) {
            if (!(means_[i] >= 0.0 && means_[i] <= 1.0)) {
                std::ostringstream msg;
                msg << "mean out of range at index " << (i + 1);
                throw ValidationError(msg.str());
            }
        }
        auto it = std::max_element(means_.begin(), means_.end());
        best_index_ = static_cast<int>(it - means_.begin()) + 1;
        unique_best_ = std::count(means_.begin(), means_.end(), *it) == 1;
    }

    int n() const { return static_cast<int>(means_.size()); }
    double mean(int arm) const { return means_.at(static_cast<std::size_t>(arm - 1)); }
    const std::vector<double>& means() const { return means_; }

    // Smallest index attaining the maximum mean.
    int best_index() const { return best_index_; }
    double best_mean() const { return means_[static_cast<std::size_t>(best_index_ - 1)]; }
    bool unique_best() const { return unique_best_; }

private:
    std::vector<double> means_;
    int best_index_;
    bool unique_best_;
};

inline BanditInstance make_instance(std::vector<double> means) {
    return BanditInstance(std::move(means));
}

// Per-arm mean gaps to the best arm. Entry at the best index is exactly 0.
class GapVector {
public:
    explicit GapVector(std::vector<double> gaps) : gaps_(std::move(gaps)) {}

    int n() const { return static_cast<int>(gaps_.size()); }
    double gap(int arm) const { return gaps_.at(static_cast<std::size_t>(arm - 1)); }
    const std::vector<double>& gaps() const { return gaps_; }

private:
    std::vector<double> gaps_;
};

inline GapVector gap_vector(const BanditInstance& instance) {
    std::vector<double> gaps(instance.means().size());
    const double best = instance.best_mean();
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        gaps[i] = best - instance.means()[i];
    }
    gaps[static_cast<std::size_t>(instance.best_index() - 1)] = 0.0;
    return GapVector(std::move(gaps));
}

// One Bernoulli draw from the given arm. Advances the generator.
inline int sample_reward(const BanditInstance& instance, int arm, SeededRng& rng) {
    if (arm < 1 || arm > instance.n()) {
        throw ValidationError("arm index out of range");
    }
    return rng.bernoulli(instance.mean(arm));
}

// One-line CSV of means, for audit and replay.
inline std::string means_csv(const BanditInstance& instance) {
    std::ostringstream out;
    out.precision(17);
    for (int i = 1; i <= instance.n(); ++i) {
        if (i > 1) out << ',';
        out << instance.mean(i);
    }
    return out.str();
}

}  // namespace smab
