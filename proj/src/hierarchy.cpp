#include "freshfinger/hierarchy.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>

namespace freshfinger {

namespace {

constexpr int kMaxLevels = 6;

// 2^(2^j), saturated at the int64 range.
Key doubly_exponential(int j) {
    const int exponent = 1 << j;
    if (exponent >= 63) return INT64_MAX;
    return Key{1} << exponent;
}

}  // namespace

std::string_view to_string(EvictionPolicy policy) {
    switch (policy) {
        case EvictionPolicy::strict_fifo: return "strict_fifo";
        case EvictionPolicy::skip_requeue: return "skip_requeue";
        case EvictionPolicy::full_refresh: return "full_refresh";
    }
    return "unknown";
}

std::string_view to_string(Violation::Kind kind) {
    switch (kind) {
        case Violation::Kind::subset: return "subset";
        case Violation::Kind::capacity: return "capacity";
        case Violation::Kind::queue_mismatch: return "queue_mismatch";
        case Violation::Kind::directory: return "directory";
        case Violation::Kind::top_level: return "top_level";
        case Violation::Kind::tree_shape: return "tree_shape";
    }
    return "unknown";
}

LevelConfig::LevelConfig(Key n) : n_(n), k_(0) {
    if (n < 2) throw std::invalid_argument("level config: n must be at least 2");
    k_ = 1;
    while (doubly_exponential(k_) < n) ++k_;
    for (int j = 1; j <= k_; ++j) capacities_.push_back(j < k_ ? doubly_exponential(j) : n);
}

Key LevelConfig::capacity(int j) const {
    if (j < 1 || j > k_) throw std::out_of_range("level config: level out of range");
    return capacities_[static_cast<std::size_t>(j - 1)];
}

FreshFingerDict::FreshFingerDict(Key n, EvictionPolicy policy)
    : config_(n),
      policy_(policy),
      membership_(static_cast<std::size_t>(n) + 1, 0),
      handles_((static_cast<std::size_t>(n) + 1) * static_cast<std::size_t>(config_.k())) {
    const int k = config_.k();
    if (k > kMaxLevels) throw std::invalid_argument("fresh finger dict: too many levels");
    for (int l = 0; l + 1 < k; ++l) {
        trees_.emplace_back();
        queues_.emplace_back(n);
    }
    std::vector<Key> all(static_cast<std::size_t>(n));
    for (Key x = 1; x <= n; ++x) all[static_cast<std::size_t>(x - 1)] = x;
    trees_.push_back(FingerTree::build(all));
    const std::vector<NodeHandle> top = trees_.back().handles();
    for (Key x = 1; x <= n; ++x) set_member(x, k - 1, top[static_cast<std::size_t>(x - 1)]);
}

void FreshFingerDict::set_member(Key x, int level, NodeHandle h) {
    membership_[static_cast<std::size_t>(x)] |= 1U << level;
    handles_[slot(x, level)] = h;
}

void FreshFingerDict::clear_member(Key x, int level) {
    membership_[static_cast<std::size_t>(x)] &= ~(1U << level);
    handles_[slot(x, level)] = NodeHandle{};
}

std::uint64_t FreshFingerDict::restructure_counter() const {
    std::uint64_t total = 0;
    for (const FingerTree& t : trees_) total += t.structural_steps();
    for (const EvictionQueue& q : queues_) total += q.operations();
    return total;
}

Key FreshFingerDict::found_level_floor(int j) const {
    if (j < 2 || j > config_.k()) throw std::out_of_range("found_level_floor: level out of range");
    return config_.capacity(j - 1);
}

AccessRecord FreshFingerDict::access(Key x) {
    if (x < 1 || x > config_.n()) throw std::out_of_range("fresh finger dict: key out of range");
    const int k = config_.k();

    AccessRecord record;
    record.index = ++accesses_;
    record.key = x;

    std::array<SearchResult, kMaxLevels> results{};
    std::array<bool, kMaxLevels> searched{};
    std::optional<Key> below;
    std::optional<Key> above;
    int found = -1;

    for (int l = 0; l < k; ++l) {
        const FingerTree& tree = trees_[static_cast<std::size_t>(l)];
        if (tree.empty()) continue;

        SearchResult r;
        std::optional<NodeHandle> from_below;
        std::optional<NodeHandle> from_above;
        if (l > 0) {
            if (below && member(*below, l)) from_below = handles_[slot(*below, l)];
            if (above && member(*above, l)) from_above = handles_[slot(*above, l)];
        }
        if (from_below && from_above) {
            r = tree.dovetail_search(*from_below, FingerSide::below, *from_above, FingerSide::above, x);
        } else if (from_below) {
            r = tree.finger_search(*from_below, x, FingerSide::below);
        } else if (from_above) {
            r = tree.finger_search(*from_above, x, FingerSide::above);
        } else {
            r = tree.finger_search(tree.any_handle(), x);
        }

        if (r.found) {
            found = l;
            record.cmp_final = r.comparisons;
            break;
        }
        record.cmp_descent += r.comparisons;
        below = r.pred ? std::optional<Key>(tree.key(*r.pred)) : std::nullopt;
        above = r.succ ? std::optional<Key>(tree.key(*r.succ)) : std::nullopt;
        results[static_cast<std::size_t>(l)] = r;
        searched[static_cast<std::size_t>(l)] = true;
    }
    if (found < 0) throw std::logic_error("fresh finger dict: key missing from the top level");
    record.found_level = found + 1;

    std::uint64_t cmp_before = 0;
    for (const FingerTree& t : trees_) cmp_before += t.comparisons();
    const std::uint64_t steps_before = restructure_counter();

    for (int l = 0; l < found; ++l) {
        FingerTree& tree = trees_[static_cast<std::size_t>(l)];
        const NodeHandle h = searched[static_cast<std::size_t>(l)]
                                 ? tree.insert_at(results[static_cast<std::size_t>(l)])
                                 : tree.insert_first(x);
        set_member(x, l, h);
        queues_[static_cast<std::size_t>(l)].push_back(x);
    }
    switch (policy_) {
        case EvictionPolicy::strict_fifo:
            break;
        case EvictionPolicy::skip_requeue:
            if (found < k - 1) queues_[static_cast<std::size_t>(found)].move_to_back(x);
            break;
        case EvictionPolicy::full_refresh:
            for (int l = found; l < k - 1; ++l) {
                if (member(x, l)) queues_[static_cast<std::size_t>(l)].move_to_back(x);
            }
            break;
    }
    for (int l = 0; l < found; ++l) evict(l);

    std::uint64_t cmp_after = 0;
    for (const FingerTree& t : trees_) cmp_after += t.comparisons();
    record.cmp_restructure = cmp_after - cmp_before;
    record.restructure_steps = restructure_counter() - steps_before;
    record.cmp_total = record.cmp_descent + record.cmp_final + record.cmp_restructure;
    return record;
}

void FreshFingerDict::evict(int level) {
    EvictionQueue& queue = queues_[static_cast<std::size_t>(level)];
    FingerTree& tree = trees_[static_cast<std::size_t>(level)];
    const Key capacity = config_.capacity(level + 1);
    std::size_t skips = 0;
    while (static_cast<Key>(queue.size()) > capacity) {
        const Key victim = queue.pop_front();
        if (policy_ == EvictionPolicy::skip_requeue && level > 0 && member(victim, level - 1)) {
            queue.push_back(victim);
            if (++skips > queue.size()) throw std::logic_error("eviction: every candidate is pinned");
            continue;
        }
        tree.erase(handles_[slot(victim, level)]);
        clear_member(victim, level);
    }
}

std::vector<Violation> FreshFingerDict::check_invariants() const {
    std::vector<Violation> out;
    const int k = config_.k();
    const Key n = config_.n();
    auto report = [&out](Violation::Kind kind, int level, std::string message) {
        out.push_back(Violation{kind, level, std::move(message)});
    };

    std::vector<std::vector<Key>> level_keys;
    level_keys.reserve(static_cast<std::size_t>(k));
    for (int l = 0; l < k; ++l) {
        const FingerTree& tree = trees_[static_cast<std::size_t>(l)];
        for (std::string& problem : tree.validate()) {
            report(Violation::Kind::tree_shape, l + 1, std::move(problem));
        }
        level_keys.push_back(tree.keys());
        const std::vector<Key>& keys = level_keys.back();

        if (l + 1 < k) {
            if (static_cast<Key>(keys.size()) > config_.capacity(l + 1)) {
                report(Violation::Kind::capacity, l + 1,
                       "holds " + std::to_string(keys.size()) + " keys, capacity " +
                           std::to_string(config_.capacity(l + 1)));
            }
            std::vector<Key> queued = queues_[static_cast<std::size_t>(l)].keys();
            std::sort(queued.begin(), queued.end());
            if (queued != keys) report(Violation::Kind::queue_mismatch, l + 1, "queue and tree hold different keys");
        } else {
            bool whole = static_cast<Key>(keys.size()) == n;
            for (std::size_t i = 0; whole && i < keys.size(); ++i) whole = keys[i] == static_cast<Key>(i) + 1;
            if (!whole) report(Violation::Kind::top_level, l + 1, "top level does not hold exactly {1..n}");
        }

        std::size_t bits = 0;
        for (Key x = 1; x <= n; ++x) bits += member(x, l) ? 1 : 0;
        if (bits != keys.size()) {
            report(Violation::Kind::directory, l + 1,
                   "directory marks " + std::to_string(bits) + " keys, tree holds " + std::to_string(keys.size()));
        }
        for (Key x : keys) {
            if (x < 1 || x > n) {
                report(Violation::Kind::directory, l + 1, "key " + std::to_string(x) + " outside [1, n]");
                continue;
            }
            const NodeHandle h = handles_[slot(x, l)];
            if (!member(x, l) || !tree.is_valid(h) || tree.key(h) != x) {
                report(Violation::Kind::directory, l + 1, "key " + std::to_string(x) + " has no valid directory entry");
            }
        }
    }

    for (int l = 0; l + 1 < k; ++l) {
        const std::vector<Key>& lower = level_keys[static_cast<std::size_t>(l)];
        const std::vector<Key>& upper = level_keys[static_cast<std::size_t>(l + 1)];
        if (!std::includes(upper.begin(), upper.end(), lower.begin(), lower.end())) {
            report(Violation::Kind::subset, l + 1,
                   "level " + std::to_string(l + 1) + " is not contained in level " + std::to_string(l + 2));
        }
    }
    return out;
}

}  // namespace freshfinger
