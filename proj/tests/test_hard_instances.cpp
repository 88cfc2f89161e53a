#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "smab/hard_instances.hpp"
#include "smab/rng.hpp"

using namespace smab;

namespace {

void check_means(const BanditInstance& inst, const std::vector<double>& expect) {
    REQUIRE(inst.n() == static_cast<int>(expect.size()));
    for (int i = 1; i <= inst.n(); ++i) {
        CHECK_THAT(inst.mean(i), Catch::Matchers::WithinAbs(expect[static_cast<std::size_t>(i - 1)], 1e-12));
    }
}

}  // namespace

TEST_CASE("hard epsilon closed form") {
    CHECK_THAT(hard_epsilon(16, 160000, 1.0), Catch::Matchers::WithinAbs(0.025, 1e-12));
    CHECK_THAT(hard_epsilon(16, 100000000, 1.0), Catch::Matchers::WithinAbs(0.005, 1e-9));
    // k = T collapses to the bare 1/4.
    CHECK_THAT(hard_epsilon(100, 100, 2.0), Catch::Matchers::WithinAbs(0.25, 1e-12));
    CHECK_THROWS_AS(hard_epsilon(0, 100, 1.0), ConfigError);
    CHECK_THROWS_AS(hard_epsilon(200, 100, 1.0), ConfigError);
    CHECK_THROWS_AS(hard_epsilon(10, 100, 0.5), ConfigError);
}

TEST_CASE("family I examples") {
    check_means(family_I(4, 3, 1, 0.05), {0.7, 0.65, 0.65, 0.5});
    check_means(family_I(4, 3, 2, 0.05), {0.7, 0.75, 0.65, 0.5});
    CHECK(family_I(4, 3, 2, 0.05).best_index() == 2);
    CHECK(family_I(4, 3, 1, 0.05).unique_best());
}

TEST_CASE("family Iprime examples") {
    check_means(family_Iprime(4, 3, 1, 0.05), {0.7, 0.65, 0.65, 1.0});
    // Head offsets scale with the total arm count n, so growing n from 4 to 5
    // lifts the whole head by eps.
    const BanditInstance inst = family_Iprime(5, 3, 2, 0.05);
    check_means(inst, {0.75, 0.8, 0.7, 1.0, 1.0});
    CHECK_FALSE(inst.unique_best());
    CHECK(inst.best_index() == 4);
}

TEST_CASE("family I0 examples") {
    check_means(family_I0(4, 3, 1, 0.05), {0.7, 0.65, 0.65});
    check_means(family_I0(4, 3, 3, 0.05), {0.7, 0.65, 0.75});
}

TEST_CASE("family validity guard rejects oversized epsilon") {
    CHECK_THROWS_AS(family_I(4, 3, 1, 0.2), ValidationError);
    CHECK_THROWS_AS(family_Iprime(4, 3, 1, 0.2), ValidationError);
    CHECK_THROWS_AS(family_I0(4, 3, 1, 0.2), ValidationError);
    // (n+1) eps = 0.5 exactly is still valid.
    CHECK_NOTHROW(family_I(4, 3, 1, 0.1));
    CHECK_THROWS_AS(family_I(4, 3, 4, 0.05), ConfigError);  // i > k
    CHECK_THROWS_AS(family_I(4, 4, 1, 0.05), ConfigError);  // k = n
    CHECK_THROWS_AS(family_I(4, 3, 0, 0.05), ConfigError);
    CHECK_THROWS_AS(family_I(4, 3, 1, 0.0), ConfigError);
}

TEST_CASE("the three families share the same head") {
    SeededRng rng(23);
    for (int it = 0; it < 100; ++it) {
        const int n = static_cast<int>(rng.uniform_int(3, 40));
        const int k = static_cast<int>(rng.uniform_int(2, n - 1));
        const int i = static_cast<int>(rng.uniform_int(1, k));
        const double eps = 0.4 / (n + 1) * rng.uniform() + 1e-4;
        const BanditInstance a = family_I(n, k, i, eps);
        const BanditInstance b = family_Iprime(n, k, i, eps);
        const BanditInstance c = family_I0(n, k, i, eps);
        for (int j = 1; j <= k; ++j) {
            CHECK(a.mean(j) == b.mean(j));
            CHECK(a.mean(j) == c.mean(j));
        }
        for (int j = k + 1; j <= n; ++j) {
            CHECK(a.mean(j) == 0.5);
            CHECK(b.mean(j) == 1.0);
        }
    }
}

TEST_CASE("gap structure of the hard head") {
    SeededRng rng(29);
    for (int it = 0; it < 100; ++it) {
        const int n = static_cast<int>(rng.uniform_int(3, 40));
        const int k = static_cast<int>(rng.uniform_int(2, n - 1));
        const int i = static_cast<int>(rng.uniform_int(2, k));
        const double eps = 0.4 / (n + 1) * rng.uniform() + 1e-4;
        const GapVector g = gap_vector(family_I(n, k, i, eps));
        // Best arm i: gap 0; arm 1 trails by eps; the other head arms by
        // 2 eps; the tail by (n+1) eps.
        CHECK(g.gap(i) == 0.0);
        CHECK_THAT(g.gap(1), Catch::Matchers::WithinAbs(eps, 1e-12));
        for (int j = 2; j <= k; ++j) {
            if (j != i) CHECK_THAT(g.gap(j), Catch::Matchers::WithinAbs(2.0 * eps, 1e-12));
        }
        for (int j = k + 1; j <= n; ++j) {
            CHECK_THAT(g.gap(j), Catch::Matchers::WithinAbs((n + 1.0) * eps, 1e-10));
        }
        // nu_1 variant: arm 1 best, head trails by eps, tail by n eps.
        const GapVector g1 = gap_vector(family_I(n, k, 1, eps));
        CHECK(g1.gap(1) == 0.0);
        for (int j = 2; j <= k; ++j) {
            CHECK_THAT(g1.gap(j), Catch::Matchers::WithinAbs(eps, 1e-12));
        }
        for (int j = k + 1; j <= n; ++j) {
            CHECK_THAT(g1.gap(j), Catch::Matchers::WithinAbs(n * eps, 1e-10));
        }
    }
}

TEST_CASE("bar precondition report") {
    const BarPreconditionReport ok = validate_bar_preconditions(20, 16, 8, 0.005, 0.25, 0.5);
    CHECK(ok.eps_ok);
    CHECK_THAT(ok.eps_max, Catch::Matchers::WithinAbs(1.0 / 152.0, 1e-12));
    CHECK(ok.delta_ok);
    CHECK_THAT(ok.delta_max, Catch::Matchers::WithinAbs(0.25, 1e-12));  // equality holds
    CHECK(ok.all_ok());

    const BarPreconditionReport bad = validate_bar_preconditions(20, 16, 8, 0.025, 0.25, 0.5);
    CHECK_FALSE(bad.eps_ok);
    CHECK_FALSE(bad.all_ok());

    const BarPreconditionReport bad_delta = validate_bar_preconditions(20, 16, 8, 0.005, 0.3, 0.5);
    CHECK_FALSE(bad_delta.delta_ok);
}
