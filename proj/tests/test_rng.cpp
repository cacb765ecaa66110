#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "simalloc/rng.hpp"

using namespace simalloc;

TEST_CASE("splitmix64 stream is deterministic and seed-sensitive") {
    rng::SplitMix64 a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next();
        CHECK(va == b.next());
        CHECK(va != c.next());
    }
}

TEST_CASE("derived streams are distinct per (stream, replication) pair") {
    const std::uint64_t master = 20160101;
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t cond = 0; cond < 16; ++cond) {
        const auto cond_seed = rng::derive_stream(master, cond);
        for (std::uint64_t rep = 0; rep < 64; ++rep) {
            seeds.push_back(rng::derive_stream(cond_seed, rep));
        }
    }
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}

TEST_CASE("uniform01 stays in [0,1) and uniform_open01 in (0,1)") {
    rng::SplitMix64 g(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = g.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = g.uniform_open01();
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("normal() matches N(0,1) moments") {
    rng::SplitMix64 g(123);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = g.normal();
        sum += z;
        sumsq += z * z;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("binomial edge cases") {
    rng::SplitMix64 g(5);
    CHECK(rng::binomial(g, 0, 0.5) == 0);
    CHECK(rng::binomial(g, 100, 0.0) == 0);
    CHECK(rng::binomial(g, 100, 1.0) == 100);
    CHECK(rng::binomial(g, -3, 0.5) == 0);
    for (int i = 0; i < 1000; ++i) {
        const auto k = rng::binomial(g, 1, 0.5);
        CHECK(k >= 0);
        CHECK(k <= 1);
    }
}

TEST_CASE("binomial matches binomial moments across regimes") {
    // Includes the reflection path (p > 0.5) and the recursive split path
    // used when (1-p)^n underflows (n*|log1p(-p)| large).
    struct Case {
        std::int64_t n;
        double p;
    };
    const Case cases[] = {{10, 0.3},      {1000, 0.002}, {10000, 0.0004}, {5000, 0.7},
                          {200000, 0.25}, {50, 0.5},     {3, 0.999}};
    rng::SplitMix64 g(99);
    for (const auto& c : cases) {
        CAPTURE(c.n);
        CAPTURE(c.p);
        const int reps = 20000;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < reps; ++i) {
            const auto k = static_cast<double>(rng::binomial(g, c.n, c.p));
            REQUIRE(k >= 0);
            REQUIRE(k <= static_cast<double>(c.n));
            sum += k;
            sumsq += k * k;
        }
        const double mean = sum / reps;
        const double var = sumsq / reps - mean * mean;
        const double true_mean = static_cast<double>(c.n) * c.p;
        const double true_var = true_mean * (1.0 - c.p);
        // 5 standard errors on the mean; variance within 10%.
        CHECK(std::abs(mean - true_mean) < 5.0 * std::sqrt(true_var / reps) + 1e-9);
        if (true_var > 1.0) {
            CHECK(var == doctest::Approx(true_var).epsilon(0.10));
        }
    }
}

TEST_CASE("binomial distribution is exact on a small case") {
    // Chi-square goodness of fit for Binomial(4, 0.35) against the exact pmf.
    const std::int64_t n = 4;
    const double p = 0.35;
    double pmf[5];
    pmf[0] = std::pow(1 - p, 4);
    pmf[1] = 4 * p * std::pow(1 - p, 3);
    pmf[2] = 6 * p * p * (1 - p) * (1 - p);
    pmf[3] = 4 * p * p * p * (1 - p);
    pmf[4] = std::pow(p, 4);

    rng::SplitMix64 g(2024);
    const int reps = 200000;
    int counts[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < reps; ++i) ++counts[rng::binomial(g, n, p)];

    double chi2 = 0.0;
    for (int k = 0; k <= 4; ++k) {
        const double expected = reps * pmf[k];
        chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
    }
    // 4 dof; 0.999 quantile is 18.47.
    CHECK(chi2 < 18.47);
}
