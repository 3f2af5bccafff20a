#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "freshfinger/finger_tree.hpp"

namespace freshfinger {

/// FIFO of distinct keys in [1, n], intrusively linked through per-key slots
/// so that any resident key can be moved to the back in O(1). Every mutating
/// call counts one operation.
class EvictionQueue {
public:
    explicit EvictionQueue(Key n)
        : prev_(static_cast<std::size_t>(n) + 1, kNone),
          next_(static_cast<std::size_t>(n) + 1, kNone),
          in_(static_cast<std::size_t>(n) + 1, false) {}

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    bool contains(Key k) const { return in_.at(slot(k)); }
    Key front() const {
        if (empty()) throw std::logic_error("eviction queue: front of empty queue");
        return head_;
    }

    void push_back(Key k) {
        if (contains(k)) throw std::logic_error("eviction queue: key already queued");
        link_back(k);
        ++size_;
        ++operations_;
    }

    Key pop_front() {
        const Key k = front();
        unlink(k);
        --size_;
        ++operations_;
        return k;
    }

    void move_to_back(Key k) {
        if (!contains(k)) throw std::logic_error("eviction queue: key not queued");
        ++operations_;
        if (tail_ == k) return;
        unlink(k);
        link_back(k);
    }

    std::vector<Key> keys() const {
        std::vector<Key> out;
        out.reserve(size_);
        for (Key k = head_; k != kNone; k = next_[slot(k)]) out.push_back(k);
        return out;
    }

    std::uint64_t operations() const { return operations_; }

private:
    static constexpr Key kNone = 0;

    std::size_t slot(Key k) const {
        if (k < 1 || static_cast<std::size_t>(k) >= in_.size()) {
            throw std::out_of_range("eviction queue: key out of range");
        }
        return static_cast<std::size_t>(k);
    }

    void link_back(Key k) {
        const std::size_t s = slot(k);
        prev_[s] = tail_;
        next_[s] = kNone;
        if (tail_ != kNone) next_[slot(tail_)] = k;
        else head_ = k;
        tail_ = k;
        in_[s] = true;
    }

    void unlink(Key k) {
        const std::size_t s = slot(k);
        if (prev_[s] != kNone) next_[slot(prev_[s])] = next_[s];
        else head_ = next_[s];
        if (next_[s] != kNone) prev_[slot(next_[s])] = prev_[s];
        else tail_ = prev_[s];
        prev_[s] = next_[s] = kNone;
        in_[s] = false;
    }

    std::vector<Key> prev_;
    std::vector<Key> next_;
    std::vector<bool> in_;
    Key head_ = kNone;
    Key tail_ = kNone;
    std::size_t size_ = 0;
    std::uint64_t operations_ = 0;
};

}  // namespace freshfinger
