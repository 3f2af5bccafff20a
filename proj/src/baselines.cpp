#include "freshfinger/baselines.hpp"

#include <stdexcept>

namespace freshfinger {

StaticBST::StaticBST(Key n) {
    if (n < 1) throw std::invalid_argument("static bst: n must be positive");
    keys_.resize(static_cast<std::size_t>(n));
    for (Key i = 0; i < n; ++i) keys_[static_cast<std::size_t>(i)] = i + 1;
}

std::uint64_t StaticBST::access(Key x) {
    if (x < 1 || x > n()) throw std::out_of_range("static bst: key out of range");
    std::size_t lo = 0;
    std::size_t hi = keys_.size();
    std::uint64_t count = 0;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        ++count;
        if (keys_[mid] == x) break;
        if (x < keys_[mid]) hi = mid;
        else lo = mid + 1;
    }
    comparisons_ += count;
    return count;
}

SplayTree::SplayTree(Key n)
    : n_(n),
      left_(static_cast<std::size_t>(n) + 1, 0),
      right_(static_cast<std::size_t>(n) + 1, 0),
      parent_(static_cast<std::size_t>(n) + 1, 0) {
    if (n < 1) throw std::invalid_argument("splay tree: n must be positive");
    root_ = build(1, n, 0);
}

Key SplayTree::build(Key lo, Key hi, Key parent) {
    if (lo > hi) return 0;
    const Key mid = lo + (hi - lo) / 2;
    const auto s = static_cast<std::size_t>(mid);
    parent_[s] = parent;
    left_[s] = build(lo, mid - 1, mid);
    right_[s] = build(mid + 1, hi, mid);
    return mid;
}

std::uint64_t SplayTree::access(Key x) {
    if (x < 1 || x > n_) throw std::out_of_range("splay tree: key out of range");
    std::uint64_t count = 0;
    Key v = root_;
    while (v != 0) {
        ++count;
        if (x == v) break;
        v = x < v ? left_[static_cast<std::size_t>(v)] : right_[static_cast<std::size_t>(v)];
    }
    if (v == 0) throw std::logic_error("splay tree: key missing");
    splay(v);
    comparisons_ += count;
    return count;
}

void SplayTree::rotate(Key x) {
    const auto sx = static_cast<std::size_t>(x);
    const Key p = parent_[sx];
    const auto sp = static_cast<std::size_t>(p);
    const Key g = parent_[sp];
    if (left_[sp] == x) {
        left_[sp] = right_[sx];
        if (right_[sx] != 0) parent_[static_cast<std::size_t>(right_[sx])] = p;
        right_[sx] = p;
    } else {
        right_[sp] = left_[sx];
        if (left_[sx] != 0) parent_[static_cast<std::size_t>(left_[sx])] = p;
        left_[sx] = p;
    }
    parent_[sp] = x;
    parent_[sx] = g;
    if (g == 0) {
        root_ = x;
    } else {
        const auto sg = static_cast<std::size_t>(g);
        if (left_[sg] == p) left_[sg] = x;
        else right_[sg] = x;
    }
    ++rotations_;
}

void SplayTree::splay(Key x) {
    while (parent_[static_cast<std::size_t>(x)] != 0) {
        const Key p = parent_[static_cast<std::size_t>(x)];
        const Key g = parent_[static_cast<std::size_t>(p)];
        if (g == 0) {
            rotate(x);  // zig
        } else if ((left_[static_cast<std::size_t>(g)] == p) == (left_[static_cast<std::size_t>(p)] == x)) {
            rotate(p);  // zig-zig
            rotate(x);
        } else {
            rotate(x);  // zig-zag
            rotate(x);
        }
    }
}

std::vector<Key> SplayTree::in_order() const {
    std::vector<Key> out;
    out.reserve(static_cast<std::size_t>(n_));
    std::vector<Key> stack;
    Key v = root_;
    while (v != 0 || !stack.empty()) {
        while (v != 0) {
            stack.push_back(v);
            v = left_[static_cast<std::size_t>(v)];
        }
        v = stack.back();
        stack.pop_back();
        out.push_back(v);
        v = right_[static_cast<std::size_t>(v)];
    }
    return out;
}

}  // namespace freshfinger
