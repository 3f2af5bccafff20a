#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace freshfinger {

using Key = std::int64_t;

class FingerTree;

namespace detail {

// One node of a leaf-oriented, level-linked (2,4)-tree. Leaves hold keys and
// have height 0; every internal node keeps a pointer to the leftmost leaf of
// its subtree so that the minimum of any node is one hop away.
struct Node {
    Key key = 0;
    Node* parent = nullptr;
    Node* prev = nullptr;
    Node* next = nullptr;
    Node* first = nullptr;
    std::array<Node*, 5> child{};
    std::uint8_t degree = 0;
    std::uint8_t height = 0;
    bool live = false;
    std::uint32_t generation = 0;
};

struct SearchOutcome {
    const Node* found = nullptr;
    const Node* pred = nullptr;
    const Node* succ = nullptr;
};

}  // namespace detail

/// Reference to a key resident in one particular FingerTree. Stays valid
/// until that key is erased from that tree.
class NodeHandle {
public:
    NodeHandle() = default;

    friend bool operator==(const NodeHandle&, const NodeHandle&) = default;

private:
    friend class FingerTree;

    NodeHandle(detail::Node* node, std::uint64_t tree_id)
        : node_(node), generation_(node->generation), tree_id_(tree_id) {}

    detail::Node* node_ = nullptr;
    std::uint32_t generation_ = 0;
    std::uint64_t tree_id_ = 0;
};

/// Where the finger sits relative to the target, when an earlier comparison
/// already settled it. `unknown` makes the search compare against the finger.
enum class FingerSide { unknown, below, above };

struct SearchResult {
    std::optional<NodeHandle> found;
    std::optional<NodeHandle> pred;
    std::optional<NodeHandle> succ;
    std::uint64_t comparisons = 0;

    // Identifies the tree state the result describes; insert_at() accepts the
    // result only while the tree is unmodified.
    Key target = 0;
    std::uint64_t epoch = 0;
    std::uint64_t tree_id = 0;
};

/// Ordered set of integer keys with finger search in O(log d) comparisons,
/// d being the rank distance between finger and target.
///
/// Only key-to-key comparisons are counted. A three-way comparison of two
/// keys counts once. Structural steps count leaf links and unlinks plus every
/// split, fuse, share and root change.
class FingerTree {
public:
    FingerTree();
    FingerTree(FingerTree&& other) noexcept;
    FingerTree& operator=(FingerTree&& other) noexcept;
    FingerTree(const FingerTree&) = delete;
    FingerTree& operator=(const FingerTree&) = delete;

    /// Builds a tree from strictly increasing keys; throws std::invalid_argument otherwise.
    static FingerTree build(std::span<const Key> sorted_keys);

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    /// Handle to the minimum key. Throws std::logic_error on an empty tree.
    NodeHandle any_handle() const;

    Key key(NodeHandle h) const;
    bool is_valid(NodeHandle h) const;

    SearchResult finger_search(NodeHandle finger, Key target,
                               FingerSide side = FingerSide::unknown) const;

    /// Two finger searches advanced one comparison at a time in alternation;
    /// the first to finish decides the result. When no sides are given the
    /// finger with the smaller key steps first.
    SearchResult dovetail_search(NodeHandle a, NodeHandle b, Key target) const;
    SearchResult dovetail_search(NodeHandle below, FingerSide below_side,
                                 NodeHandle above, FingerSide above_side,
                                 Key target) const;

    /// Inserts `key` next to `finger`, which must be its in-tree predecessor
    /// or successor. Checks adjacency with (counted) comparisons.
    NodeHandle insert_near(NodeHandle finger, Key key);

    /// Inserts the target of an unsuccessful search made on the current tree
    /// state. No comparisons are needed since the search fixed the position.
    NodeHandle insert_at(const SearchResult& where);

    /// Only entry point for an empty tree.
    NodeHandle insert_first(Key key);

    Key erase(NodeHandle h);

    std::vector<Key> keys() const;
    /// Handles to all keys in increasing key order.
    std::vector<NodeHandle> handles() const;

    std::uint64_t comparisons() const { return comparisons_; }
    std::uint64_t structural_steps() const { return structural_steps_; }
    int height() const;

    /// Structural self-check used by tests: degrees, heights, level links,
    /// parent and leftmost-leaf pointers, key order. Empty means consistent.
    std::vector<std::string> validate() const;

private:
    using Node = detail::Node;

    Node* allocate(std::uint8_t height);
    void release(Node* node);
    Node* checked(NodeHandle h) const;
    NodeHandle handle_of(Node* leaf) const { return NodeHandle(leaf, id_); }

    NodeHandle link_after(Node* pred, Key key);
    NodeHandle link_as_minimum(Key key);
    void insert_child(Node* parent, int index, Node* child);
    void remove_child(Node* parent, int index);
    void fix_overflow(Node* node);
    void fix_underflow(Node* node);
    void refresh_first_upwards(Node* node, Node* leaf);
    SearchResult make_result(const detail::SearchOutcome& outcome, Key target,
                             std::uint64_t comparisons) const;

    std::deque<Node> pool_;
    std::vector<Node*> free_;
    Node* root_ = nullptr;
    std::size_t size_ = 0;
    std::uint64_t id_ = 0;
    std::uint64_t epoch_ = 0;
    mutable std::uint64_t comparisons_ = 0;
    std::uint64_t structural_steps_ = 0;
};

}  // namespace freshfinger
