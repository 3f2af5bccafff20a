#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "freshfinger/finger_tree.hpp"

namespace freshfinger {

/// Access history a_1 .. a_i over keys {1..n}. The last entry is the access
/// currently being served; all working-set quantities are taken at time i.
class History {
public:
    History(Key n, std::vector<Key> accesses);

    Key n() const { return n_; }
    std::size_t time() const { return accesses_.size(); }
    Key current() const { return accesses_.back(); }
    /// a_t, 1-based.
    Key at(std::size_t t) const { return accesses_.at(t - 1); }
    std::span<const Key> accesses() const { return accesses_; }

private:
    Key n_;
    std::vector<Key> accesses_;
};

/// log2 with the convention log 0 = log 1 = 1.
double ff_log(double v);

/// Smallest j > 0 with a_{i-j} = y, or nullopt for "never".
std::optional<std::int64_t> last_occurrence(const History& h, Key y);

/// Distinct keys in a_{i-l+1} .. a_i where l = last_occurrence(y); n if y was never accessed.
std::int64_t working_set_number(const History& h, Key y);

/// Keys whose working-set number is at most j, sorted.
std::vector<Key> working_set(const History& h, std::int64_t j);

/// |{z in T : x < z <= y}| for x < y, |{z in T : y < z <= x}| otherwise.
std::int64_t rank_distance(std::span<const Key> T, Key x, Key y);

struct FingerChoice {
    Key y = 0;
    std::int64_t w = 0;       // working-set number of y
    std::int64_t d = 0;       // rank distance from x to y inside T
    std::int64_t value = 0;   // w + d
};

/// argmin over y in T of w(y) + d_T(x, y); ties go to the smaller w, then the smaller key.
FingerChoice finger_choice(const History& h, Key x, std::span<const Key> T);

struct BoundBreakdown {
    std::int64_t w = 0;                 // working-set number of the current key
    std::vector<Key> small_set;         // W_i(w)
    std::vector<Key> big_set;           // W_i(min(w^2, n))
    FingerChoice finger;                // chosen inside big_set
    std::int64_t small_distance = 0;    // d over small_set from x to the finger
    double su = 0;
    double additive = 0;
    double theorem2 = 0;
};

/// Bound for the current access: su + ff_log(small_distance) * ff_log(ff_log(w)).
BoundBreakdown theorem2_bound(const History& h);

double su_term(const History& h);

/// The rejected form: ff_log of min over y in W_i(w) of w(y) + d_{W_i(w)}(x, y).
double rejected_bound(const History& h);

/// Sum of su_term over every prefix of the sequence.
double su_sum(Key n, std::span<const Key> sequence);

/// Incremental evaluation of the same quantities along a sequence. Keeps a
/// recency list plus last-occurrence timestamps so that the working-set
/// number of any key is a rank query; much faster than rescanning history.
class RecencyOracle {
public:
    explicit RecencyOracle(Key n);

    /// Bound for serving x now, before x is recorded.
    BoundBreakdown evaluate(Key x) const;
    /// Working-set number of y if x were the current access.
    std::int64_t working_set_number(Key y, Key x) const;
    void record(Key x);

    Key n() const { return n_; }
    std::size_t time() const { return time_; }

private:
    std::int64_t newer_than(std::size_t t) const;  // keys last seen after time t
    std::vector<Key> working_set(std::int64_t j, Key x) const;

    Key n_;
    std::size_t time_ = 0;
    std::vector<std::size_t> last_;       // 0 = never
    std::vector<std::int64_t> fenwick_;   // marks each key's latest timestamp
    std::vector<Key> newer_;              // recency list links, 0 = none
    std::vector<Key> older_;
    Key most_recent_ = 0;
};

}  // namespace freshfinger
