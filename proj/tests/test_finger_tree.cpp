#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "freshfinger/finger_tree.hpp"

using namespace freshfinger;

namespace {

std::vector<Key> iota_keys(Key lo, Key hi) {
    std::vector<Key> v;
    for (Key k = lo; k <= hi; ++k) v.push_back(k);
    return v;
}

NodeHandle handle_for(const FingerTree& t, Key k) {
    for (NodeHandle h : t.handles()) {
        if (t.key(h) == k) return h;
    }
    FAIL("key not resident");
    return {};
}

// Elements of sorted keys in the half-open interval between a and b.
std::int64_t distance(const std::vector<Key>& keys, Key a, Key b) {
    const Key lo = std::min(a, b), hi = std::max(a, b);
    return std::upper_bound(keys.begin(), keys.end(), hi) - std::upper_bound(keys.begin(), keys.end(), lo);
}

double worst_cost_ratio(std::size_t size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Key> universe = iota_keys(1, static_cast<Key>(4 * size));
    std::shuffle(universe.begin(), universe.end(), rng);
    std::vector<Key> keys(universe.begin(), universe.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(keys.begin(), keys.end());
    const FingerTree t = FingerTree::build(keys);
    const std::vector<NodeHandle> hs = t.handles();
    std::uniform_int_distribution<std::size_t> pick(0, size - 1);
    std::uniform_int_distribution<Key> target(1, static_cast<Key>(4 * size));
    double worst = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const NodeHandle f = hs[pick(rng)];
        const Key x = target(rng);
        const SearchResult r = t.finger_search(f, x);
        const double d = static_cast<double>(distance(keys, t.key(f), x));
        worst = std::max(worst, static_cast<double>(r.comparisons) / std::log2(d + 2));
    }
    return worst;
}

}  // namespace

TEST_CASE("finger_tree: build") {
    const FingerTree empty = FingerTree::build({});
    CHECK(empty.size() == 0);
    CHECK(empty.empty());
    CHECK_THROWS_AS(empty.any_handle(), std::logic_error);

    const std::vector<Key> keys = iota_keys(1, 16);
    const FingerTree t = FingerTree::build(keys);
    CHECK(t.size() == 16);
    CHECK(t.keys() == keys);
    CHECK(t.validate().empty());
    CHECK(t.key(t.any_handle()) == 1);

    const std::vector<Key> unsorted{3, 1, 2};
    const std::vector<Key> dup{1, 2, 2};
    CHECK_THROWS_AS(FingerTree::build(unsorted), std::invalid_argument);
    CHECK_THROWS_AS(FingerTree::build(dup), std::invalid_argument);
}

TEST_CASE("finger_tree: search examples") {
    const std::vector<Key> even{2, 4, 6, 8};
    const FingerTree small = FingerTree::build(even);
    const SearchResult r = small.finger_search(handle_for(small, 4), 5);
    CHECK_FALSE(r.found);
    REQUIRE(r.pred);
    REQUIRE(r.succ);
    CHECK(small.key(*r.pred) == 4);
    CHECK(small.key(*r.succ) == 6);

    const FingerTree t = FingerTree::build(iota_keys(1, 16));
    const SearchResult a = t.finger_search(handle_for(t, 5), 9);
    REQUIRE(a.found);
    CHECK(t.key(*a.found) == 9);
    CHECK(a.comparisons <= 4 * std::log2(4 + 2));

    const SearchResult b = t.finger_search(handle_for(t, 9), 9);
    REQUIRE(b.found);
    CHECK(b.comparisons == 1);

    const SearchResult lo = t.finger_search(handle_for(t, 3), 0);
    CHECK_FALSE(lo.pred);
    REQUIRE(lo.succ);
    CHECK(t.key(*lo.succ) == 1);
    const SearchResult hi = t.finger_search(handle_for(t, 3), 40);
    CHECK_FALSE(hi.succ);
    REQUIRE(hi.pred);
    CHECK(t.key(*hi.pred) == 16);
}

TEST_CASE("finger_tree: every finger finds every target") {
    std::vector<Key> keys;
    for (Key k = 3; k <= 300; k += 3) keys.push_back(k);
    const FingerTree t = FingerTree::build(keys);
    for (NodeHandle f : t.handles()) {
        for (Key x = 0; x <= 302; ++x) {
            const SearchResult r = t.finger_search(f, x);
            const auto it = std::lower_bound(keys.begin(), keys.end(), x);
            if (it != keys.end() && *it == x) {
                REQUIRE(r.found);
                REQUIRE(t.key(*r.found) == x);
                continue;
            }
            REQUIRE_FALSE(r.found);
            if (it == keys.begin()) REQUIRE_FALSE(r.pred);
            else REQUIRE(t.key(*r.pred) == *(it - 1));
            if (it == keys.end()) REQUIRE_FALSE(r.succ);
            else REQUIRE(t.key(*r.succ) == *it);
        }
    }
}

TEST_CASE("finger_tree: dovetail") {
    const FingerTree t = FingerTree::build(iota_keys(1, 16));
    const NodeHandle h4 = handle_for(t, 4), h6 = handle_for(t, 6);
    const SearchResult a = t.dovetail_search(h4, h6, 5);
    REQUIRE(a.found);
    CHECK(t.key(*a.found) == 5);
    const std::uint64_t cheap = std::min(t.finger_search(h4, 5).comparisons, t.finger_search(h6, 5).comparisons);
    CHECK(a.comparisons <= 2 * cheap + 2);

    const NodeHandle h1 = handle_for(t, 1), h16 = handle_for(t, 16);
    const std::uint64_t from1 = t.finger_search(h1, 2).comparisons;
    const std::uint64_t from16 = t.finger_search(h16, 2).comparisons;
    const SearchResult b = t.dovetail_search(h1, h16, 2);
    REQUIRE(b.found);
    CHECK(t.key(*b.found) == 2);
    CHECK(from1 < from16);
    CHECK(b.comparisons <= 2 * from1 + 1);

    const SearchResult c = t.dovetail_search(h4, h4, 4);
    REQUIRE(c.found);
    CHECK(c.comparisons <= 2);
}

TEST_CASE("finger_tree: dovetail stays within twice the cheaper single search") {
    std::mt19937_64 rng(7);
    const std::vector<Key> keys = iota_keys(1, 4096);
    const FingerTree t = FingerTree::build(keys);
    const std::vector<NodeHandle> hs = t.handles();
    std::uniform_int_distribution<std::size_t> pick(0, hs.size() - 1);
    std::uniform_int_distribution<Key> target(0, 4097);
    for (int trial = 0; trial < 10000; ++trial) {
        const NodeHandle a = hs[pick(rng)], b = hs[pick(rng)];
        const Key x = target(rng);
        const SearchResult d = t.dovetail_search(a, b, x);
        const SearchResult s = t.finger_search(a, x);
        const std::uint64_t single = std::min(s.comparisons, t.finger_search(b, x).comparisons);
        REQUIRE(d.comparisons <= 2 * single + 1);
        REQUIRE(d.found.has_value() == s.found.has_value());
    }
}

TEST_CASE("finger_tree: insert and erase examples") {
    const std::vector<Key> two{2, 4};
    FingerTree t = FingerTree::build(two);
    t.insert_near(handle_for(t, 2), 3);
    CHECK(t.keys() == std::vector<Key>{2, 3, 4});
    CHECK_THROWS_AS(t.insert_near(handle_for(t, 2), 3), std::invalid_argument);
    CHECK_THROWS_AS(t.insert_near(handle_for(t, 2), 10), std::invalid_argument);

    FingerTree e;
    const NodeHandle h7 = e.insert_first(7);
    CHECK(e.keys() == std::vector<Key>{7});
    CHECK(e.key(h7) == 7);
    CHECK_THROWS_AS(e.insert_first(8), std::logic_error);

    std::vector<Key> gap = iota_keys(1, 16);
    gap.erase(gap.begin() + 8);
    FingerTree g = FingerTree::build(gap);
    g.insert_near(handle_for(g, 8), 9);
    CHECK(g.finger_search(handle_for(g, 5), 9).found.has_value());

    const std::vector<Key> one{3};
    FingerTree s = FingerTree::build(one);
    const NodeHandle h3 = handle_for(s, 3);
    CHECK(s.erase(h3) == 3);
    CHECK(s.empty());
    CHECK_THROWS_AS(s.erase(h3), std::invalid_argument);
    CHECK_FALSE(s.is_valid(h3));

    FingerTree f = FingerTree::build(iota_keys(1, 16));
    f.erase(handle_for(f, 9));
    const SearchResult r = f.finger_search(handle_for(f, 8), 9);
    CHECK_FALSE(r.found);
    REQUIRE(r.succ);
    CHECK(f.key(*r.succ) == 10);

    FingerTree z;
    z.insert_first(5);
    z.insert_near(z.any_handle(), 6);
    z.insert_near(z.any_handle(), 4);
    z.erase(handle_for(z, 5));
    CHECK(z.size() == 2);
}

TEST_CASE("finger_tree: foreign and stale handles are rejected") {
    const FingerTree a = FingerTree::build(iota_keys(1, 8));
    FingerTree b = FingerTree::build(iota_keys(1, 8));
    CHECK_THROWS_AS(b.finger_search(a.any_handle(), 3), std::invalid_argument);
    CHECK_THROWS_AS(b.erase(a.any_handle()), std::invalid_argument);

    const SearchResult r = b.finger_search(b.any_handle(), 100);
    b.erase(handle_for(b, 4));
    CHECK_THROWS_AS(b.insert_at(r), std::invalid_argument);
    CHECK_THROWS_AS(b.finger_search(NodeHandle{}, 1), std::invalid_argument);
}

TEST_CASE("finger_tree: random updates against a reference set") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<Key> key(1, 2000);
    FingerTree t;
    std::set<Key> ref;
    std::uint64_t updates = 0;
    for (int step = 0; step < 10000; ++step) {
        const Key x = key(rng);
        if (t.empty()) {
            t.insert_first(x);
            ref.insert(x);
            ++updates;
            continue;
        }
        const SearchResult r = t.finger_search(t.any_handle(), x);
        if (r.found) {
            t.erase(*r.found);
            ref.erase(x);
        } else if (step % 2 == 0) {
            t.insert_at(r);
            ref.insert(x);
        } else {
            t.insert_near(r.pred ? *r.pred : *r.succ, x);
            ref.insert(x);
        }
        ++updates;
        if (step % 500 == 0) REQUIRE(t.validate().empty());
    }
    CHECK(t.keys() == std::vector<Key>(ref.begin(), ref.end()));
    CHECK(t.validate().empty());
    CHECK(t.size() == ref.size());
    CHECK(t.structural_steps() <= 8 * updates);
}

TEST_CASE("finger_tree: cost law holds with a constant that does not drift") {
    const double small = worst_cost_ratio(256, 1);
    const double large = worst_cost_ratio(4096, 2);
    MESSAGE("fitted c at 2^8 = " << small << ", at 2^12 = " << large);
    CHECK(large <= 1.25 * small);
}

TEST_CASE("finger_tree: moved-from tree is empty and usable") {
    FingerTree a = FingerTree::build(iota_keys(1, 100));
    const NodeHandle h = a.any_handle();
    FingerTree b = std::move(a);
    CHECK(b.size() == 100);
    CHECK(b.key(h) == 1);
    CHECK(a.size() == 0);
    CHECK_THROWS_AS(a.key(h), std::invalid_argument);
    a.insert_first(3);
    CHECK(a.keys() == std::vector<Key>{3});
}
