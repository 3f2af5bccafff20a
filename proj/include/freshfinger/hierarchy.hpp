#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "freshfinger/eviction_queue.hpp"
#include "freshfinger/finger_tree.hpp"

namespace freshfinger {

/// How an over-capacity level picks the key to drop.
enum class EvictionPolicy {
    strict_fifo,     // dequeue the oldest insertion, nothing else
    skip_requeue,    // skip keys still held one level down; refresh the found level
    full_refresh,    // every access moves the key to the back of each queue holding it
};

std::string_view to_string(EvictionPolicy policy);

/// Level count and capacities: level j < k holds at most 2^(2^j) keys and the
/// top level k holds all n keys, with k the smallest j such that 2^(2^j) >= n.
class LevelConfig {
public:
    explicit LevelConfig(Key n);

    Key n() const { return n_; }
    int k() const { return k_; }
    /// Capacity of level j, 1 <= j <= k.
    Key capacity(int j) const;

private:
    Key n_;
    int k_;
    std::vector<Key> capacities_;
};

struct AccessRecord {
    std::uint64_t index = 0;
    Key key = 0;
    int found_level = 0;
    std::uint64_t cmp_descent = 0;      // levels 1 .. found_level-1
    std::uint64_t cmp_final = 0;        // the level where the key was found
    std::uint64_t cmp_restructure = 0;
    std::uint64_t cmp_total = 0;
    std::uint64_t restructure_steps = 0;  // tree rebalancing, links and queue operations
};

struct Violation {
    enum class Kind { subset, capacity, queue_mismatch, directory, top_level, tree_shape };
    Kind kind;
    int level;  // 1-based
    std::string message;
};

std::string_view to_string(Violation::Kind kind);

/// Dictionary over {1..n} built from a hierarchy of finger search trees
/// T_1 .. T_k with FIFO queues Q_1 .. Q_{k-1}. T_k is static and holds every
/// key; lower levels fill lazily and evict through their queues.
class FreshFingerDict {
public:
    explicit FreshFingerDict(Key n, EvictionPolicy policy = EvictionPolicy::skip_requeue);

    AccessRecord access(Key x);

    std::vector<Violation> check_invariants() const;

    /// Smallest working-set number an access found at level j (2 <= j <= k)
    /// is expected to have: the capacity of level j-1.
    Key found_level_floor(int j) const;

    const LevelConfig& config() const { return config_; }
    EvictionPolicy policy() const { return policy_; }
    std::size_t level_size(int j) const { return trees_.at(static_cast<std::size_t>(j - 1)).size(); }
    bool resident(Key x, int j) const { return member(x, j - 1); }
    std::vector<Key> level_keys(int j) const { return trees_.at(static_cast<std::size_t>(j - 1)).keys(); }
    std::uint64_t accesses() const { return accesses_; }

private:
    friend struct DictTestPeer;

    std::size_t slot(Key x, int level) const {
        return static_cast<std::size_t>(x) * static_cast<std::size_t>(config_.k()) +
               static_cast<std::size_t>(level);
    }
    bool member(Key x, int level) const { return (membership_[static_cast<std::size_t>(x)] >> level) & 1U; }
    void set_member(Key x, int level, NodeHandle h);
    void clear_member(Key x, int level);
    std::uint64_t restructure_counter() const;
    void evict(int level);

    LevelConfig config_;
    EvictionPolicy policy_;
    std::vector<FingerTree> trees_;        // index l holds level l+1
    std::vector<EvictionQueue> queues_;    // one per level below the top
    std::vector<std::uint32_t> membership_;  // bit l: key resident at level l+1
    std::vector<NodeHandle> handles_;
    std::uint64_t accesses_ = 0;
};

}  // namespace freshfinger
