#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "freshfinger/hierarchy.hpp"
#include "freshfinger/oracle.hpp"

namespace freshfinger {

struct DictTestPeer {
    static void flip_directory_bit(FreshFingerDict& d, Key x, int level) {
        d.membership_[static_cast<std::size_t>(x)] ^= 1U << (level - 1);
    }
    static void drop_from_queue(FreshFingerDict& d, int level) {
        d.queues_[static_cast<std::size_t>(level - 1)].pop_front();
    }
};

}  // namespace freshfinger

using namespace freshfinger;

namespace {

bool clean(const std::vector<Violation>& v) { return v.empty(); }

bool only_subset(const std::vector<Violation>& v) {
    return std::all_of(v.begin(), v.end(), [](const Violation& x) { return x.kind == Violation::Kind::subset; });
}

struct FloorTally {
    std::uint64_t checked = 0;
    std::uint64_t held = 0;
};

FloorTally floor_tally(EvictionPolicy policy, Key n, std::size_t m, std::uint64_t seed) {
    FreshFingerDict d(n, policy);
    RecencyOracle oracle(n);
    std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
    std::mt19937_64 rng(seed);
    // Mix of a hot set and the whole universe, so every level sees traffic.
    std::uniform_int_distribution<Key> hot(1, 40), any(1, n);
    std::bernoulli_distribution coin(0.7);
    FloorTally t;
    for (std::size_t i = 0; i < m; ++i) {
        const Key x = coin(rng) ? hot(rng) : any(rng);
        const std::int64_t w = oracle.working_set_number(x, x);
        const AccessRecord r = d.access(x);
        oracle.record(x);
        if (r.found_level >= 2 && seen[static_cast<std::size_t>(x)]) {
            ++t.checked;
            if (w >= d.found_level_floor(r.found_level)) ++t.held;
        }
        seen[static_cast<std::size_t>(x)] = true;
    }
    return t;
}

}  // namespace

TEST_CASE("hierarchy: level configuration") {
    const LevelConfig big(65536);
    CHECK(big.k() == 4);
    CHECK(big.capacity(1) == 4);
    CHECK(big.capacity(2) == 16);
    CHECK(big.capacity(3) == 256);
    CHECK(big.capacity(4) == 65536);

    const LevelConfig five(5);
    CHECK(five.k() == 2);
    CHECK(five.capacity(1) == 4);
    CHECK(five.capacity(2) == 5);

    const LevelConfig four(4);
    CHECK(four.k() == 1);
    CHECK(four.capacity(1) == 4);

    CHECK_THROWS_AS(LevelConfig(1), std::invalid_argument);
    CHECK_THROWS_AS(FreshFingerDict(1), std::invalid_argument);
    CHECK_THROWS_AS(big.capacity(5), std::out_of_range);
}

TEST_CASE("hierarchy: found level floor") {
    const FreshFingerDict d(65536);
    CHECK(d.found_level_floor(2) == 4);
    CHECK(d.found_level_floor(3) == 16);
    CHECK(d.found_level_floor(4) == 256);
    CHECK_THROWS_AS(d.found_level_floor(1), std::out_of_range);
    CHECK_THROWS_AS(d.found_level_floor(5), std::out_of_range);
}

TEST_CASE("hierarchy: fresh dictionary") {
    FreshFingerDict d(256);
    CHECK(clean(d.check_invariants()));
    CHECK(d.level_size(1) == 0);
    CHECK(d.level_size(3) == 256);
    CHECK_THROWS_AS(d.access(0), std::out_of_range);
    CHECK_THROWS_AS(d.access(257), std::out_of_range);
}

TEST_CASE("hierarchy: access examples") {
    FreshFingerDict d(256);
    const AccessRecord first = d.access(100);
    CHECK(first.found_level == 3);
    CHECK(first.cmp_total == first.cmp_descent + first.cmp_final + first.cmp_restructure);
    CHECK(d.resident(100, 1));
    CHECK(d.resident(100, 2));

    const AccessRecord again = d.access(100);
    CHECK(again.found_level == 1);
    CHECK(again.cmp_descent == 0);
    CHECK(again.cmp_final == 1);

    for (Key x : {1, 2, 3, 4, 5}) d.access(x);
    CHECK(d.level_size(1) == 4);
    CHECK_FALSE(d.resident(100, 1));
    CHECK(d.resident(100, 2));
    CHECK(d.access(100).found_level == 2);
    CHECK(clean(d.check_invariants()));
}

TEST_CASE("hierarchy: degenerate single level") {
    FreshFingerDict d(4);
    CHECK(d.config().k() == 1);
    for (Key x : {4, 1, 3, 2, 2}) {
        const AccessRecord r = d.access(x);
        CHECK(r.found_level == 1);
        CHECK(r.cmp_total <= 4);
        CHECK(r.restructure_steps == 0);
    }
    CHECK(clean(d.check_invariants()));
}

TEST_CASE("hierarchy: random accesses keep every invariant") {
    for (EvictionPolicy p : {EvictionPolicy::skip_requeue, EvictionPolicy::full_refresh}) {
        FreshFingerDict d(1024, p);
        std::mt19937_64 rng(3);
        std::uniform_int_distribution<Key> key(1, 1024);
        for (int i = 0; i < 10000; ++i) {
            const Key x = key(rng);
            const AccessRecord r = d.access(x);
            REQUIRE(r.key == x);
            REQUIRE(d.resident(x, 1));
            if (i % 50 == 0) REQUIRE(clean(d.check_invariants()));
        }
        CHECK(clean(d.check_invariants()));
    }
}

TEST_CASE("hierarchy: strict FIFO may break the subset chain and nothing else") {
    FreshFingerDict d(1024, EvictionPolicy::strict_fifo);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<Key> hot(1, 6), any(1, 1024);
    std::bernoulli_distribution coin(0.8);
    std::size_t subset_seen = 0;
    for (int i = 0; i < 20000; ++i) {
        d.access(coin(rng) ? hot(rng) : any(rng));
        const std::vector<Violation> v = d.check_invariants();
        REQUIRE(only_subset(v));
        subset_seen += v.size();
    }
    MESSAGE("subset violations observed under strict FIFO: " << subset_seen);
    CHECK(subset_seen > 0);
}

TEST_CASE("hierarchy: fault injection is reported") {
    FreshFingerDict d(256);
    for (Key x : {10, 20, 30}) d.access(x);
    REQUIRE(clean(d.check_invariants()));
    DictTestPeer::flip_directory_bit(d, 77, 1);
    const std::vector<Violation> v = d.check_invariants();
    REQUIRE_FALSE(v.empty());
    CHECK(std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.kind == Violation::Kind::directory; }));

    FreshFingerDict q(256);
    for (Key x : {10, 20, 30}) q.access(x);
    DictTestPeer::drop_from_queue(q, 1);
    const std::vector<Violation> w = q.check_invariants();
    CHECK(std::any_of(w.begin(), w.end(),
                      [](const Violation& x) { return x.kind == Violation::Kind::queue_mismatch; }));
}

TEST_CASE("hierarchy: restructuring stays proportional to the found level") {
    FreshFingerDict d(1 << 12);
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<Key> key(1, 1 << 12);
    double worst = 0;
    for (int i = 0; i < 20000; ++i) {
        const AccessRecord r = d.access(key(rng));
        CHECK(r.cmp_restructure == 0);
        worst = std::max(worst, static_cast<double>(r.restructure_steps) / r.found_level);
    }
    MESSAGE("largest restructure work per level: " << worst);
    CHECK(worst <= 16);
}

TEST_CASE("hierarchy: found-level floor under full refresh and skip-requeue") {
    const FloorTally p3 = floor_tally(EvictionPolicy::full_refresh, 1024, 20000, 21);
    REQUIRE(p3.checked > 1000);
    CHECK(p3.held == p3.checked);

    const FloorTally p2 = floor_tally(EvictionPolicy::skip_requeue, 1024, 20000, 21);
    REQUIRE(p2.checked > 1000);
    MESSAGE("skip-requeue floor held on " << p2.held << " of " << p2.checked);
    CHECK(static_cast<double>(p2.held) >= 0.99 * static_cast<double>(p2.checked));
}

TEST_CASE("hierarchy: dictionary can be moved") {
    FreshFingerDict a(300);
    a.access(5);
    FreshFingerDict b = std::move(a);
    CHECK(b.access(5).found_level == 1);
    CHECK(clean(b.check_invariants()));
}
