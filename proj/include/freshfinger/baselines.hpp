#pragma once

#include <cstdint>
#include <vector>

#include "freshfinger/finger_tree.hpp"

namespace freshfinger {

/// Binary search over the sorted array 1..n. Each probe is one three-way
/// comparison; the search stops as soon as the probe hits x.
class StaticBST {
public:
    explicit StaticBST(Key n);

    /// Comparisons spent locating x. Throws std::out_of_range outside [1, n].
    std::uint64_t access(Key x);

    Key n() const { return static_cast<Key>(keys_.size()); }
    std::uint64_t comparisons() const { return comparisons_; }

private:
    std::vector<Key> keys_;
    std::uint64_t comparisons_ = 0;
};

/// Bottom-up splay tree over 1..n, starting from a perfectly balanced shape.
class SplayTree {
public:
    explicit SplayTree(Key n);

    /// Comparisons on the way down to x; x is then splayed to the root.
    std::uint64_t access(Key x);

    Key n() const { return n_; }
    Key root() const { return root_; }
    std::uint64_t comparisons() const { return comparisons_; }
    std::uint64_t rotations() const { return rotations_; }
    std::vector<Key> in_order() const;

private:
    Key build(Key lo, Key hi, Key parent);
    void rotate(Key x);
    void splay(Key x);

    Key n_;
    // Node ids are the keys themselves; 0 means none.
    std::vector<Key> left_, right_, parent_;
    Key root_ = 0;
    std::uint64_t comparisons_ = 0;
    std::uint64_t rotations_ = 0;
};

}  // namespace freshfinger
