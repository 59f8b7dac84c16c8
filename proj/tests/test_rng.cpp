#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "topicaudit/rng.hpp"

using namespace topicaudit;

namespace {

// Reference splitmix64 (Steele/Lea/Flood, public domain), written out
// independently of src/rng.cpp so the test does not share its code.
struct RefSplitmix {
    std::uint64_t x;
    std::uint64_t next() {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

}  // namespace

TEST_CASE("next_u64 matches the reference splitmix64 sequence") {
    for (std::uint64_t seed : {0ull, 1ull, 42ull, 0xDEADBEEFull, ~0ull}) {
        Rng rng(seed);
        RefSplitmix ref{seed};
        for (int i = 0; i < 100; ++i) CHECK(rng.next_u64() == ref.next());
    }
}

TEST_CASE("generator is counter based: a fresh instance replays the sequence") {
    Rng a(7), b(7);
    std::vector<std::uint64_t> first;
    for (int i = 0; i < 10; ++i) first.push_back(a.next_u64());
    for (int i = 0; i < 10; ++i) CHECK(b.next_u64() == first[i]);
}

TEST_CASE("next_double lies in [0,1) and uses 53 bits") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        // value must be representable as k / 2^53
        double scaled = u * 9007199254740992.0;  // 2^53
        CHECK(scaled == std::floor(scaled));
    }
}

TEST_CASE("below is within range and covers small supports") {
    Rng rng(11);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 200; ++i) {
        std::uint64_t v = rng.below(5);
        CHECK(v < 5);
        seen.insert(v);
    }
    CHECK(seen.size() == 5);
    CHECK(rng.below(1) == 0);
}

TEST_CASE("fork is const and deterministic, distinct per stream") {
    const Rng rng(99);
    CHECK(rng.fork(0) == rng.fork(0));
    CHECK(rng.fork(0) != rng.fork(1));
    CHECK(rng.fork(1) != rng.fork(2));
    // forking must not advance the parent
    Rng walker(99);
    std::uint64_t first = walker.next_u64();
    Rng fresh(99);
    (void)fresh.fork(123);
    CHECK(fresh.next_u64() == first);
}

TEST_CASE("gamma(100, 0.01) draws have the right moments") {
    // shape*scale = 1, variance shape*scale^2 = 0.01
    Rng rng(5);
    const int n = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double g = rng.next_gamma(100.0, 0.01);
        CHECK(g > 0.0);
        sum += g;
        sumsq += g * g;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
    CHECK(var == doctest::Approx(0.01).epsilon(0.10));
}

TEST_CASE("normal draws have zero mean, unit variance") {
    Rng rng(17);
    const int n = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = rng.next_normal();
        sum += z;
        sumsq += z * z;
    }
    CHECK(sum / n == doctest::Approx(0.0).epsilon(0.05));
    CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sample_without_replacement draws k distinct in-range indices") {
    Rng rng(23);
    auto picks = sample_without_replacement(100, 30, rng);
    CHECK(picks.size() == 30);
    std::set<std::size_t> dedup(picks.begin(), picks.end());
    CHECK(dedup.size() == 30);
    for (std::size_t p : picks) CHECK(p < 100);

    Rng again(23);
    CHECK(sample_without_replacement(100, 30, again) == picks);
}

TEST_CASE("sample_without_replacement k=n is a permutation, k=0 empty") {
    Rng rng(31);
    auto all = sample_without_replacement(10, 10, rng);
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 10; ++i) CHECK(all[i] == i);
    CHECK(sample_without_replacement(10, 0, rng).empty());
}

TEST_CASE("sampling is roughly uniform over positions") {
    // each index should appear in about k/n of the draws
    const std::size_t n = 20, k = 5;
    const int rounds = 4000;
    std::vector<int> hits(n, 0);
    Rng rng(41);
    for (int r = 0; r < rounds; ++r)
        for (std::size_t idx : sample_without_replacement(n, k, rng)) ++hits[idx];
    for (std::size_t i = 0; i < n; ++i)
        CHECK(hits[i] == doctest::Approx(rounds * 0.25).epsilon(0.15));
}
