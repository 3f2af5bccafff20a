#include "freshfinger/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace freshfinger {

namespace {

std::int64_t clipped_square(std::int64_t w, Key n) {
    if (w > 0 && w > n / w) return n;
    return std::min<std::int64_t>(w * w, n);
}

// Number of elements of sorted T that are <= v.
std::int64_t rank_upto(std::span<const Key> T, Key v) {
    return std::upper_bound(T.begin(), T.end(), v) - T.begin();
}

bool better(const FingerChoice& a, const FingerChoice& b) {
    return std::tie(a.value, a.w, a.y) < std::tie(b.value, b.w, b.y);
}

}  // namespace

History::History(Key n, std::vector<Key> accesses) : n_(n), accesses_(std::move(accesses)) {
    if (n < 1) throw std::invalid_argument("history: n must be positive");
    if (accesses_.empty()) throw std::invalid_argument("history: needs at least the current access");
    for (Key a : accesses_) {
        if (a < 1 || a > n) throw std::out_of_range("history: key outside [1, n]");
    }
}

double ff_log(double v) {
    if (!(v >= 0)) throw std::invalid_argument("ff_log: negative argument");
    return v <= 1 ? 1.0 : std::log2(v);
}

std::optional<std::int64_t> last_occurrence(const History& h, Key y) {
    const std::size_t i = h.time();
    for (std::size_t j = 1; j < i; ++j) {
        if (h.at(i - j) == y) return static_cast<std::int64_t>(j);
    }
    return std::nullopt;
}

std::int64_t working_set_number(const History& h, Key y) {
    const std::optional<std::int64_t> l = last_occurrence(h, y);
    if (!l) return h.n();
    const std::size_t i = h.time();
    std::vector<bool> seen(static_cast<std::size_t>(h.n()) + 1, false);
    std::int64_t distinct = 0;
    for (std::size_t t = i - static_cast<std::size_t>(*l) + 1; t <= i; ++t) {
        const auto k = static_cast<std::size_t>(h.at(t));
        if (!seen[k]) {
            seen[k] = true;
            ++distinct;
        }
    }
    return distinct;
}

std::vector<Key> working_set(const History& h, std::int64_t j) {
    std::vector<Key> out;
    for (Key y = 1; y <= h.n(); ++y) {
        if (working_set_number(h, y) <= j) out.push_back(y);
    }
    return out;
}

std::int64_t rank_distance(std::span<const Key> T, Key x, Key y) {
    const Key lo = std::min(x, y);
    const Key hi = std::max(x, y);
    return std::count_if(T.begin(), T.end(), [&](Key z) { return lo < z && z <= hi; });
}

FingerChoice finger_choice(const History& h, Key x, std::span<const Key> T) {
    if (T.empty()) throw std::invalid_argument("finger_choice: empty candidate set");
    FingerChoice best;
    bool have = false;
    for (Key y : T) {
        FingerChoice c;
        c.y = y;
        c.w = working_set_number(h, y);
        c.d = rank_distance(T, x, y);
        c.value = c.w + c.d;
        if (!have || better(c, best)) {
            best = c;
            have = true;
        }
    }
    return best;
}

BoundBreakdown theorem2_bound(const History& h) {
    const Key x = h.current();
    BoundBreakdown b;
    b.w = working_set_number(h, x);
    b.small_set = working_set(h, b.w);
    b.big_set = working_set(h, clipped_square(b.w, h.n()));
    b.finger = finger_choice(h, x, b.big_set);
    b.small_distance = rank_distance(b.small_set, x, b.finger.y);
    b.su = ff_log(static_cast<double>(b.finger.value));
    b.additive = ff_log(static_cast<double>(b.small_distance)) * ff_log(ff_log(static_cast<double>(b.w)));
    b.theorem2 = b.su + b.additive;
    return b;
}

double su_term(const History& h) { return theorem2_bound(h).su; }

double rejected_bound(const History& h) {
    const Key x = h.current();
    const std::vector<Key> small = working_set(h, working_set_number(h, x));
    return ff_log(static_cast<double>(finger_choice(h, x, small).value));
}

double su_sum(Key n, std::span<const Key> sequence) {
    RecencyOracle oracle(n);
    double total = 0;
    for (Key a : sequence) {
        total += oracle.evaluate(a).su;
        oracle.record(a);
    }
    return total;
}

RecencyOracle::RecencyOracle(Key n)
    : n_(n),
      last_(static_cast<std::size_t>(n) + 1, 0),
      fenwick_(1025, 0),
      newer_(static_cast<std::size_t>(n) + 1, 0),
      older_(static_cast<std::size_t>(n) + 1, 0) {
    if (n < 1) throw std::invalid_argument("recency oracle: n must be positive");
}

std::int64_t RecencyOracle::newer_than(std::size_t t) const {
    // Marks at positions 1..time_; count those in (t, time_].
    auto prefix = [this](std::size_t p) {
        std::int64_t s = 0;
        for (; p > 0; p -= p & (~p + 1)) s += fenwick_[p];
        return s;
    };
    return prefix(time_) - prefix(t);
}

std::int64_t RecencyOracle::working_set_number(Key y, Key x) const {
    const std::size_t ly = last_.at(static_cast<std::size_t>(y));
    if (ly == 0) return n_;
    const std::size_t lx = last_.at(static_cast<std::size_t>(x));
    return newer_than(ly) + (lx <= ly ? 1 : 0);
}

void RecencyOracle::record(Key x) {
    if (x < 1 || x > n_) throw std::out_of_range("recency oracle: key outside [1, n]");
    ++time_;
    if (time_ >= fenwick_.size()) {
        // Rebuild at double size from the current marks.
        std::vector<std::int64_t> grown(fenwick_.size() * 2, 0);
        fenwick_.swap(grown);
        for (Key k = 1; k <= n_; ++k) {
            std::size_t p = last_[static_cast<std::size_t>(k)];
            if (p == 0) continue;
            for (; p < fenwick_.size(); p += p & (~p + 1)) fenwick_[p] += 1;
        }
    }
    auto add = [this](std::size_t p, std::int64_t v) {
        for (; p < fenwick_.size(); p += p & (~p + 1)) fenwick_[p] += v;
    };
    std::size_t& last = last_[static_cast<std::size_t>(x)];
    const auto sx = static_cast<std::size_t>(x);
    if (last != 0) {
        add(last, -1);
        if (most_recent_ != x) {
            // Unlink from the recency list; x is not the head so it has a newer neighbour.
            newer_[static_cast<std::size_t>(older_[sx])] = newer_[sx];
            older_[static_cast<std::size_t>(newer_[sx])] = older_[sx];
        }
    }
    if (most_recent_ != x) {
        older_[sx] = most_recent_;
        newer_[sx] = 0;
        newer_[static_cast<std::size_t>(most_recent_)] = x;
        most_recent_ = x;
    }
    last = time_;
    add(last, 1);
}

std::vector<Key> RecencyOracle::working_set(std::int64_t j, Key x) const {
    std::vector<Key> out;
    if (j >= n_) {
        out.reserve(static_cast<std::size_t>(n_));
        for (Key y = 1; y <= n_; ++y) out.push_back(y);
        return out;
    }
    // Walk keys from most to least recent; working-set numbers are
    // non-decreasing along this order.
    const std::size_t lx = last_[static_cast<std::size_t>(x)];
    std::int64_t position = 0;
    for (Key y = most_recent_; y != 0; y = older_[static_cast<std::size_t>(y)]) {
        const std::size_t t = last_[static_cast<std::size_t>(y)];
        const std::int64_t w = position + (lx <= t ? 1 : 0);
        if (w > j) break;
        out.push_back(y);
        ++position;
    }
    std::sort(out.begin(), out.end());
    return out;
}

BoundBreakdown RecencyOracle::evaluate(Key x) const {
    if (x < 1 || x > n_) throw std::out_of_range("recency oracle: key outside [1, n]");
    BoundBreakdown b;
    b.w = working_set_number(x, x);
    b.small_set = working_set(b.w, x);
    b.big_set = working_set(clipped_square(b.w, n_), x);

    // x is in big_set; scan outwards from it. A candidate at distance d has
    // value > d, so the scan stops once d reaches the best value so far.
    const auto big = static_cast<std::int64_t>(b.big_set.size());
    const std::int64_t px = rank_upto(b.big_set, x) - 1;
    bool have = false;
    auto consider = [&](std::int64_t idx) {
        FingerChoice c;
        c.y = b.big_set[static_cast<std::size_t>(idx)];
        c.w = working_set_number(c.y, x);
        c.d = std::abs(idx - px);
        c.value = c.w + c.d;
        if (!have || better(c, b.finger)) {
            b.finger = c;
            have = true;
        }
    };
    for (std::int64_t d = 0; !have || d < b.finger.value; ++d) {
        const bool left = px - d >= 0;
        const bool right = d > 0 && px + d < big;
        if (!left && !right) break;
        if (left) consider(px - d);
        if (right) consider(px + d);
    }
    b.small_distance = std::abs(rank_upto(b.small_set, x) - rank_upto(b.small_set, b.finger.y));
    b.su = ff_log(static_cast<double>(b.finger.value));
    b.additive = ff_log(static_cast<double>(b.small_distance)) * ff_log(ff_log(static_cast<double>(b.w)));
    b.theorem2 = b.su + b.additive;
    return b;
}

}  // namespace freshfinger
