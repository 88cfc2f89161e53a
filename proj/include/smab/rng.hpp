#pragma once

#include <cstdint>
#include <random>

namespace smab {

// Reproducible randomness. A SeededRng is identified by (master seed, stream
// index); child streams derived from the same master are deterministic and
// statistically independent, so trials can run on any worker in any order
// without changing results.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t master_seed, std::uint64_t stream = 0)
        : master_(master_seed), stream_(stream) {
        std::seed_seq seq{mix(master_seed), mix(master_seed ^ 0x9e3779b97f4a7c15ULL) + stream,
                          mix(stream + 0x6a09e667f3bcc909ULL)};
        engine_.seed(seq);
    }

    // Derive the stream with the given index from the same master seed.
    SeededRng stream(std::uint64_t index) const { return SeededRng(master_, index); }

    // Derive the next child stream; advances the internal stream counter.
    SeededRng child() { return SeededRng(master_, ++counter_); }

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_index() const { return stream_; }

    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
    }

    int bernoulli(double p) { return uniform() < p ? 1 : 0; }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t master_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::mt19937_64 engine_;
};

}  // namespace smab
