#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "smab/policies.hpp"

using namespace smab;

namespace {

// Independent closed-form oracle for the exploration length.
long long oracle_length(double alpha, long long horizon, long long divisor) {
    const double raw = std::pow(2.0 * alpha / std::exp(1.0), alpha / (alpha + 1.0)) *
                       std::pow(static_cast<double>(horizon) / static_cast<double>(divisor),
                                1.0 / (alpha + 1.0));
    return static_cast<long long>(std::ceil(raw));
}

StreamEnv make_env(const BanditInstance& inst, int m, long long horizon, std::uint64_t seed) {
    return StreamEnv(inst, m, horizon, SeededRng(seed).stream(1));
}

BanditInstance flat_instance(int n, double mu) {
    return BanditInstance(std::vector<double>(static_cast<std::size_t>(n), mu));
}

BanditInstance spread_instance(int n) {
    std::vector<double> means(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        means[static_cast<std::size_t>(i)] = 0.9 - 0.5 * static_cast<double>(i) / n;
    }
    return BanditInstance(std::move(means));
}

}  // namespace

TEST_CASE("exploration lengths match the closed form") {
    CHECK(exploration_length_large(1.0, 6400, 64) == 9);    // raw 8.5776
    CHECK(exploration_length_large(1.0, 64, 64) == 1);      // raw 0.857763
    CHECK(exploration_length_large(2.0, 1000, 10) == 7);    // raw 6.00495
    CHECK(exploration_length_small(1.0, 8100, 9) == 26);    // raw 25.7329
    CHECK(exploration_length_small(1.0, 9, 9) == 1);        // raw 0.857763
    CHECK(exploration_length_small(3.0, 1000000, 8) == 35); // raw 34.050

    SeededRng rng(31);
    for (int it = 0; it < 200; ++it) {
        const double alpha = 1.0 + 3.0 * rng.uniform();
        const long long horizon = rng.uniform_int(10, 1000000);
        const int div = static_cast<int>(rng.uniform_int(2, 100));
        CHECK(exploration_length_large(alpha, horizon, div) ==
              std::max<long long>(1, oracle_length(alpha, horizon, div)));
        CHECK(exploration_length_small(alpha, horizon, div) ==
              std::max<long long>(1, oracle_length(alpha, horizon, div)));
    }
    CHECK_THROWS_AS(exploration_length_large(0.5, 100, 10), ConfigError);
    CHECK_THROWS_AS(exploration_length_small(1.0, 100, 1), ConfigError);
}

TEST_CASE("ucb index formula") {
    CHECK(ucb_index({1, 0, 0}, 0.5) == std::numeric_limits<double>::infinity());
    // mu_hat = 0.5, pulls = 2, delta = e^{-1}: 0.5 + sqrt(2/2) = 1.5.
    CHECK_THAT(ucb_index({1, 2, 1}, std::exp(-1.0)), Catch::Matchers::WithinAbs(1.5, 1e-12));
    // mu_hat = 1, pulls = 8, delta = 0.01: 1 + sqrt(2 ln 100 / 8) = 2.072983.
    CHECK_THAT(ucb_index({1, 8, 8}, 0.01), Catch::Matchers::WithinAbs(2.072983, 5e-7));
    CHECK_THROWS_AS(ucb_index({1, 1, 1}, 0.0), ConfigError);
    CHECK_THROWS_AS(ucb_index({1, 1, 1}, 1.0), ConfigError);
}

TEST_CASE("run_ucb pulls the argmax and breaks ties toward the lowest slot") {
    const BanditInstance inst = flat_instance(2, 0.5);
    StreamEnv env = make_env(inst, 2, 1, 1);
    const SlotHandle a = env.read_next();
    const SlotHandle b = env.read_next();
    run_ucb(env, {a, b}, 0.5);
    // Both indices are +infinity; the single pull must land on the first slot.
    CHECK(env.trace().pulls(1) == 1);
    CHECK(env.trace().pulls(2) == 0);

    StreamEnv single = make_env(inst, 2, 7, 2);
    const SlotHandle only = single.read_next();
    run_ucb(single, {only}, 0.5);
    CHECK(single.trace().pulls(1) == 7);
    CHECK_THROWS_AS(run_ucb(single, {}, 0.5), ConfigError);
}

TEST_CASE("run_ucb concentrates on the better arm") {
    const BanditInstance inst = make_instance({0.8, 0.2});
    StreamEnv env = make_env(inst, 2, 20000, 3);
    std::vector<SlotHandle> slots{env.read_next(), env.read_next()};
    run_ucb(env, slots, 1e-8);
    CHECK(env.trace().pulls(1) > 15 * env.trace().pulls(2));
}

TEST_CASE("policy selection by regime") {
    CHECK(select_policy(9, 6) == PolicyTag::Large);
    CHECK(select_policy(9, 5) == PolicyTag::Small);
    CHECK(select_policy(5, 5) == PolicyTag::PlainUcb);
    CHECK(select_policy(5, 9) == PolicyTag::PlainUcb);
    CHECK(select_policy(3, 2) == PolicyTag::Large);
    CHECK_THROWS_AS(select_policy(5, 1), UnsupportedMemoryError);
    CHECK(large_memory_threshold(9) == 6);
}

TEST_CASE("regime threshold equals ceil(2n/3)") {
    for (int n = 1; n <= 200; ++n) {
        const int expect = static_cast<int>(std::ceil(2.0 * n / 3.0));
        CHECK(large_memory_threshold(n) == expect);
    }
}

TEST_CASE("large-memory structure: phase lengths and survivors") {
    const BanditInstance inst = spread_instance(9);
    const long long T = 10000;
    StreamEnv env = make_env(inst, 6, T, 5);
    PolicyConfig cfg;
    cfg.skip_exploitation = true;
    SeededRng prng = SeededRng(5).stream(2);
    run_alg_large(env, cfg, prng);
    const long long L = exploration_length_large(1.0, T, 9);
    // c = 3 duels of 2L pulls each.
    CHECK(env.trace().l1() == 6 * L);
    CHECK(env.trace().stored_at_mark().size() == 6);
    CHECK(env.cursor() == 10);  // whole stream consumed
    CHECK_FALSE(env.trace().truncated());
}

TEST_CASE("large-memory with m = n-1 runs a single duel") {
    const BanditInstance inst = spread_instance(10);
    StreamEnv env = make_env(inst, 9, 10000, 6);
    PolicyConfig cfg;
    cfg.skip_exploitation = true;
    SeededRng prng = SeededRng(6).stream(2);
    run_alg_large(env, cfg, prng);
    CHECK(env.trace().l1() == 2 * exploration_length_large(1.0, 10000, 10));
    CHECK(env.trace().stored_at_mark().size() == 9);
}

TEST_CASE("large-memory regime guard") {
    const BanditInstance inst = spread_instance(9);
    StreamEnv env = make_env(inst, 5, 10000, 7);
    PolicyConfig cfg;
    SeededRng prng(7);
    CHECK_THROWS_AS(run_alg_large(env, cfg, prng), RegimeError);
    StreamEnv full = make_env(inst, 9, 10000, 7);
    CHECK_THROWS_AS(run_alg_large(full, cfg, prng), RegimeError);
}

TEST_CASE("large-memory tie discards the second arm of the pair") {
    // All means equal and degenerate, so every duel ties deterministically.
    const BanditInstance inst = flat_instance(9, 1.0);
    StreamEnv env = make_env(inst, 6, 100000, 8);
    env.trace().enable_events();
    PolicyConfig cfg;
    cfg.skip_exploitation = true;
    SeededRng prng = SeededRng(8).stream(2);
    run_alg_large(env, cfg, prng);
    // Each duel (first, second): with equal means the second is discarded, so
    // the discard event always names the arm pulled later within the duel.
    const auto& events = env.trace().events();
    int last_pulled = 0;
    for (const TraceEvent& ev : events) {
        if (ev.action == 'p') last_pulled = ev.arm;
        if (ev.action == 'd') CHECK(ev.arm == last_pulled);
    }
    CHECK(env.trace().stored_at_mark().size() == 6);
}

TEST_CASE("small-memory structure: phase lengths and survivors") {
    const BanditInstance inst = spread_instance(50);
    const long long T = 100000;
    StreamEnv env = make_env(inst, 10, T, 9);
    PolicyConfig cfg;
    cfg.skip_exploitation = true;
    SeededRng prng = SeededRng(9).stream(2);
    run_alg_small(env, cfg, prng);
    const long long L = exploration_length_small(1.0, T, 10);
    // Every arm (9 incumbents + 41 challengers) receives exactly L pulls.
    CHECK(env.trace().l1() == 50 * L);
    CHECK(env.trace().stored_at_mark().size() == 9);
    CHECK(env.cursor() == 51);
    CHECK_FALSE(env.trace().truncated());
}

TEST_CASE("small-memory m = 2 keeps a single incumbent chain") {
    const BanditInstance inst = spread_instance(12);
    const long long T = 20000;
    StreamEnv env = make_env(inst, 2, T, 10);
    PolicyConfig cfg;
    cfg.skip_exploitation = true;
    SeededRng prng = SeededRng(10).stream(2);
    run_alg_small(env, cfg, prng);
    CHECK(env.trace().l1() == 12 * exploration_length_small(1.0, T, 2));
    CHECK(env.trace().stored_at_mark().size() == 1);
}

TEST_CASE("small-memory tie keeps the incumbent") {
    const BanditInstance inst = flat_instance(20, 1.0);
    StreamEnv env = make_env(inst, 5, 100000, 11);
    PolicyConfig cfg;
    cfg.skip_exploitation = true;
    SeededRng prng = SeededRng(11).stream(2);
    run_alg_small(env, cfg, prng);
    // Degenerate ties everywhere: the first m-1 arms survive untouched.
    CHECK(env.trace().stored_at_mark() == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("small-memory regime guard") {
    const BanditInstance inst = spread_instance(9);
    StreamEnv env = make_env(inst, 6, 10000, 12);
    PolicyConfig cfg;
    SeededRng prng(12);
    CHECK_THROWS_AS(run_alg_small(env, cfg, prng), RegimeError);
}

TEST_CASE("truncation is graceful when T is tiny") {
    const BanditInstance inst = spread_instance(50);
    StreamEnv env = make_env(inst, 10, 20, 13);
    PolicyConfig cfg;
    SeededRng prng = SeededRng(13).stream(2);
    run_alg_small(env, cfg, prng);
    CHECK(env.trace().truncated());
    CHECK(env.trace().l1() == 20);
    CHECK(env.trace().l2() == 0);
    CHECK(env.rounds_used() == 20);

    StreamEnv big = make_env(spread_instance(9), 6, 5, 14);
    SeededRng prng2 = SeededRng(14).stream(2);
    run_alg_large(big, cfg, prng2);
    CHECK(big.trace().truncated());
    CHECK(big.trace().l1() == 5);
}

TEST_CASE("plain ucb stores the whole stream") {
    const BanditInstance inst = spread_instance(5);
    StreamEnv env = make_env(inst, 7, 500, 15);
    PolicyConfig cfg;
    run_plain_ucb(env, cfg);
    CHECK(env.rounds_used() == 500);
    long long total = 0;
    for (int arm = 1; arm <= 5; ++arm) total += env.trace().pulls(arm);
    CHECK(total == 500);

    StreamEnv tight = make_env(inst, 4, 500, 15);
    CHECK_THROWS_AS(run_plain_ucb(tight, cfg), RegimeError);
}

TEST_CASE("run_policy dispatches on the regime and reports the tag") {
    PolicyConfig cfg;
    cfg.skip_exploitation = true;
    {
        StreamEnv env = make_env(spread_instance(9), 6, 10000, 16);
        SeededRng prng = SeededRng(16).stream(2);
        CHECK(run_policy(env, cfg, prng) == PolicyTag::Large);
    }
    {
        StreamEnv env = make_env(spread_instance(9), 4, 10000, 17);
        SeededRng prng = SeededRng(17).stream(2);
        CHECK(run_policy(env, cfg, prng) == PolicyTag::Small);
    }
    {
        StreamEnv env = make_env(spread_instance(4), 6, 1000, 18);
        SeededRng prng = SeededRng(18).stream(2);
        CHECK(run_policy(env, cfg, prng) == PolicyTag::PlainUcb);
    }
    {
        // Forcing a tag overrides regime selection (and may throw its guard).
        StreamEnv env = make_env(spread_instance(9), 4, 10000, 19);
        SeededRng prng = SeededRng(19).stream(2);
        CHECK_THROWS_AS(run_policy(env, cfg, prng, PolicyTag::Large), RegimeError);
    }
}

TEST_CASE("duels favor the better arm at the Hoeffding rate") {
    // One duel of L pulls per arm between means 0.7 and 0.3; the better arm
    // should lose far less often than exp(-L Delta^2 / 2) would even allow.
    const BanditInstance inst = make_instance({0.7, 0.3});
    const long long L = 50;
    int better_losses = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        StreamEnv env(inst, 2, 2 * L, SeededRng(777).stream(static_cast<std::uint64_t>(t)));
        const SlotHandle a = env.read_next();
        const SlotHandle b = env.read_next();
        for (long long i = 0; i < L; ++i) env.pull(a);
        for (long long i = 0; i < L; ++i) env.pull(b);
        if (env.stats(b).empirical_mean() > env.stats(a).empirical_mean()) ++better_losses;
    }
    const double rate = static_cast<double>(better_losses) / trials;
    const double bound = std::exp(-static_cast<double>(L) * 0.4 * 0.4 / 2.0);  // ~0.018
    CHECK(rate <= bound + 3.0 * std::sqrt(bound * (1.0 - bound) / trials) + 1e-3);
}

TEST_CASE("effective delta defaults to 1/T^2") {
    PolicyConfig cfg;
    CHECK_THAT(cfg.effective_delta(1000), Catch::Matchers::WithinRel(1e-6, 1e-12));
    cfg.delta = 0.05;
    CHECK(cfg.effective_delta(1000) == 0.05);
    cfg.delta = 1.5;
    CHECK_THROWS_AS(cfg.effective_delta(1000), ConfigError);
}
