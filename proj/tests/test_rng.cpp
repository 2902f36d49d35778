// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "holosched/rng.hpp"

using namespace holosched;

TEST_CASE("splitmix64 matches the reference sequence") {
    std::uint64_t state = 0;
    CHECK(splitmix64_next(state) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64_next(state) == 0x6e789e6aa1b965f4ULL);
    CHECK(splitmix64_next(state) == 0x06c45d188009454fULL);
}

TEST_CASE("derive_seed separates streams and substreams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t stream = 0; stream < 40; ++stream)
        for (std::uint64_t sub = 0; sub < 40; ++sub)
            seen.insert(derive_seed(12345, stream, sub));
    CHECK(seen.size() == 1600);
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("rng streams are deterministic") {
    Rng a(99), b(99);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform draws stay in range") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double v = rng.uniform(-3.0, 5.0);
        REQUIRE(v >= -3.0);
        REQUIRE(v < 5.0);
    }
}

TEST_CASE("normal moments") {
    Rng rng(11);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::abs(sum2 / n - 1.0) < 0.05);
}

TEST_CASE("complex normal has unit power") {
    Rng rng(13);
    const int n = 100000;
    double power = 0.0;
    for (int i = 0; i < n; ++i) power += std::norm(rng.cnormal());
    CHECK(std::abs(power / n - 1.0) < 0.02);
}
