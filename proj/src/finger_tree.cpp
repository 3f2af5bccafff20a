#include "freshfinger/finger_tree.hpp"

#include <atomic>
#include <stdexcept>
#include <utility>

namespace freshfinger {

using detail::Node;
using detail::SearchOutcome;

namespace {

std::atomic<std::uint64_t> next_tree_id{1};

int index_of(const Node* parent, const Node* child) {
    for (int i = 0; i < parent->degree; ++i) {
        if (parent->child[i] == child) return i;
    }
    throw std::logic_error("finger tree: child not found under its parent");
}

// Resumable single-finger search. Each call to step() performs at most one
// key comparison, which is what lets two searches be dovetailed fairly.
//
// Climbing right keeps `target > min(node)`; climbing left keeps
// `target < min(node)`. Descending scans the children of `node` between
// `cur` (known <= target) and `end` (exclusive, known > target).
class Cursor {
public:
    Cursor(const Node* finger, Key target, FingerSide side) : node_(finger), target_(target) {
        switch (side) {
            case FingerSide::unknown: state_ = State::start; break;
            case FingerSide::below: state_ = State::climb_right; break;
            case FingerSide::above: state_ = State::climb_left; break;
        }
    }

    // Returns true once the answer is known.
    bool step(std::uint64_t& comparisons) {
        settle();
        if (state_ == State::done) return true;
        compare_once(comparisons);
        settle();
        return state_ == State::done;
    }

    void run(std::uint64_t& comparisons) {
        while (!step(comparisons)) {
        }
    }

    const SearchOutcome& outcome() const { return outcome_; }

private:
    enum class State { start, climb_right, climb_left, check_parent_left, descend, done };

    int compare(Key key, std::uint64_t& comparisons) const {
        ++comparisons;
        return (target_ > key) - (target_ < key);
    }

    void found(const Node* leaf) {
        outcome_.found = leaf;
        state_ = State::done;
    }

    void begin_descend(const Node* node, int cur, int end) {
        node_ = node;
        cur_ = cur;
        end_ = end;
        state_ = State::descend;
    }

    // Runs comparison-free transitions until a comparison is due.
    void settle() {
        for (;;) {
            switch (state_) {
                case State::climb_right:
                    if (node_->next != nullptr) return;
                    begin_descend(node_, cur_, node_->degree);
                    break;
                case State::climb_left:
                    if (node_->prev != nullptr) return;
                    outcome_.succ = node_->first;
                    state_ = State::done;
                    return;
                case State::descend:
                    if (node_->height == 0) {
                        outcome_.pred = node_;
                        outcome_.succ = node_->next;
                        state_ = State::done;
                        return;
                    }
                    if (cur_ + 1 < end_) return;
                    node_ = node_->child[cur_];
                    cur_ = 0;
                    end_ = node_->degree;
                    break;
                case State::start:
                case State::check_parent_left:
                    return;
                case State::done:
                    return;
            }
        }
    }

    void compare_once(std::uint64_t& comparisons) {
        switch (state_) {
            case State::start: {
                const int c = compare(node_->key, comparisons);
                if (c == 0) {
                    found(node_);
                } else if (c > 0) {
                    cur_ = 0;
                    state_ = State::climb_right;
                } else {
                    state_ = State::climb_left;
                }
                return;
            }
            case State::climb_right: {
                const Node* n = node_->next;
                const int c = compare(n->first->key, comparisons);
                if (c == 0) {
                    found(n->first);
                } else if (c < 0) {
                    begin_descend(node_, cur_, node_->degree);
                } else {
                    node_ = n->parent;
                    cur_ = index_of(node_, n);
                }
                return;
            }
            case State::climb_left: {
                const Node* p = node_->prev;
                const int c = compare(p->first->key, comparisons);
                if (c == 0) {
                    found(p->first);
                } else if (c > 0) {
                    begin_descend(p, 0, p->degree);
                } else {
                    const Node* up = p->parent;
                    const int i = index_of(up, p);
                    node_ = up;
                    if (i > 0) {
                        end_ = i;
                        state_ = State::check_parent_left;
                    }
                }
                return;
            }
            case State::check_parent_left: {
                const int c = compare(node_->first->key, comparisons);
                if (c == 0) {
                    found(node_->first);
                } else if (c > 0) {
                    begin_descend(node_, 0, end_);
                } else {
                    state_ = State::climb_left;
                }
                return;
            }
            case State::descend: {
                const Node* candidate = node_->child[cur_ + 1];
                const int c = compare(candidate->first->key, comparisons);
                if (c == 0) {
                    found(candidate->first);
                } else if (c > 0) {
                    ++cur_;
                } else {
                    node_ = node_->child[cur_];
                    cur_ = 0;
                    end_ = node_->degree;
                }
                return;
            }
            case State::done:
                return;
        }
    }

    const Node* node_;
    Key target_;
    State state_ = State::start;
    int cur_ = 0;
    int end_ = 0;
    SearchOutcome outcome_;
};

}  // namespace

FingerTree::FingerTree() : id_(next_tree_id.fetch_add(1)) {}

FingerTree::FingerTree(FingerTree&& other) noexcept
    : pool_(std::move(other.pool_)),
      free_(std::move(other.free_)),
      root_(std::exchange(other.root_, nullptr)),
      size_(std::exchange(other.size_, 0)),
      id_(std::exchange(other.id_, next_tree_id.fetch_add(1))),
      epoch_(other.epoch_),
      comparisons_(other.comparisons_),
      structural_steps_(other.structural_steps_) {}

FingerTree& FingerTree::operator=(FingerTree&& other) noexcept {
    if (this != &other) {
        pool_ = std::move(other.pool_);
        free_ = std::move(other.free_);
        root_ = std::exchange(other.root_, nullptr);
        size_ = std::exchange(other.size_, 0);
        id_ = std::exchange(other.id_, next_tree_id.fetch_add(1));
        epoch_ = other.epoch_;
        comparisons_ = other.comparisons_;
        structural_steps_ = other.structural_steps_;
    }
    return *this;
}

FingerTree FingerTree::build(std::span<const Key> sorted_keys) {
    FingerTree tree;
    for (std::size_t i = 1; i < sorted_keys.size(); ++i) {
        ++tree.comparisons_;
        if (!(sorted_keys[i - 1] < sorted_keys[i])) {
            throw std::invalid_argument("finger tree build: keys must be strictly increasing");
        }
    }
    if (sorted_keys.empty()) return tree;

    std::vector<Node*> level;
    level.reserve(sorted_keys.size());
    for (Key k : sorted_keys) {
        Node* leaf = tree.allocate(0);
        leaf->key = k;
        leaf->first = leaf;
        level.push_back(leaf);
    }

    std::uint8_t height = 0;
    do {
        for (std::size_t i = 0; i < level.size(); ++i) {
            level[i]->prev = i > 0 ? level[i - 1] : nullptr;
            level[i]->next = i + 1 < level.size() ? level[i + 1] : nullptr;
        }
        // ceil(c/3) groups of near-equal size keep every node at degree 2..4.
        const std::size_t count = level.size();
        const std::size_t groups = (count + 2) / 3;
        const std::size_t base = count / groups;
        const std::size_t extra = count % groups;
        std::vector<Node*> upper;
        upper.reserve(groups);
        std::size_t at = 0;
        ++height;
        for (std::size_t g = 0; g < groups; ++g) {
            const std::size_t take = base + (g < extra ? 1 : 0);
            Node* node = tree.allocate(height);
            for (std::size_t j = 0; j < take; ++j) {
                Node* c = level[at++];
                c->parent = node;
                node->child[j] = c;
            }
            node->degree = static_cast<std::uint8_t>(take);
            node->first = node->child[0]->first;
            upper.push_back(node);
        }
        level = std::move(upper);
    } while (level.size() > 1);

    tree.root_ = level.front();
    tree.size_ = sorted_keys.size();
    return tree;
}

Node* FingerTree::allocate(std::uint8_t height) {
    Node* node;
    if (!free_.empty()) {
        node = free_.back();
        free_.pop_back();
        const std::uint32_t generation = node->generation;
        *node = Node{};
        node->generation = generation;
    } else {
        node = &pool_.emplace_back();
    }
    node->height = height;
    node->live = true;
    return node;
}

void FingerTree::release(Node* node) {
    node->live = false;
    ++node->generation;
    node->parent = node->prev = node->next = node->first = nullptr;
    node->degree = 0;
    free_.push_back(node);
}

bool FingerTree::is_valid(NodeHandle h) const {
    return h.node_ != nullptr && h.tree_id_ == id_ && h.node_->live && h.node_->height == 0 &&
           h.node_->generation == h.generation_;
}

Node* FingerTree::checked(NodeHandle h) const {
    if (!is_valid(h)) throw std::invalid_argument("finger tree: stale or foreign handle");
    return h.node_;
}

Key FingerTree::key(NodeHandle h) const { return checked(h)->key; }

NodeHandle FingerTree::any_handle() const {
    if (root_ == nullptr) throw std::logic_error("finger tree: any_handle on empty tree");
    return handle_of(root_->first);
}

int FingerTree::height() const { return root_ == nullptr ? 0 : root_->height; }

SearchResult FingerTree::make_result(const SearchOutcome& outcome, Key target,
                                     std::uint64_t comparisons) const {
    SearchResult result;
    auto wrap = [this](const Node* n) -> std::optional<NodeHandle> {
        if (n == nullptr) return std::nullopt;
        return handle_of(const_cast<Node*>(n));
    };
    result.found = wrap(outcome.found);
    if (!result.found) {
        result.pred = wrap(outcome.pred);
        result.succ = wrap(outcome.succ);
    }
    result.comparisons = comparisons;
    result.target = target;
    result.epoch = epoch_;
    result.tree_id = id_;
    comparisons_ += comparisons;
    return result;
}

SearchResult FingerTree::finger_search(NodeHandle finger, Key target, FingerSide side) const {
    Cursor cursor(checked(finger), target, side);
    std::uint64_t comparisons = 0;
    cursor.run(comparisons);
    return make_result(cursor.outcome(), target, comparisons);
}

SearchResult FingerTree::dovetail_search(NodeHandle a, NodeHandle b, Key target) const {
    const Node* na = checked(a);
    const Node* nb = checked(b);
    if (nb->key < na->key) std::swap(a, b);
    return dovetail_search(a, FingerSide::unknown, b, FingerSide::unknown, target);
}

SearchResult FingerTree::dovetail_search(NodeHandle below, FingerSide below_side, NodeHandle above,
                                         FingerSide above_side, Key target) const {
    Cursor first(checked(below), target, below_side);
    Cursor second(checked(above), target, above_side);
    std::uint64_t comparisons = 0;
    for (;;) {
        if (first.step(comparisons)) return make_result(first.outcome(), target, comparisons);
        if (second.step(comparisons)) return make_result(second.outcome(), target, comparisons);
    }
}

void FingerTree::insert_child(Node* parent, int index, Node* child) {
    for (int i = parent->degree; i > index; --i) parent->child[i] = parent->child[i - 1];
    parent->child[index] = child;
    ++parent->degree;
    child->parent = parent;
}

void FingerTree::remove_child(Node* parent, int index) {
    for (int i = index; i + 1 < parent->degree; ++i) parent->child[i] = parent->child[i + 1];
    --parent->degree;
    parent->child[parent->degree] = nullptr;
}

void FingerTree::refresh_first_upwards(Node* node, Node* leaf) {
    for (;;) {
        node->first = leaf;
        Node* up = node->parent;
        if (up == nullptr || up->child[0] != node) return;
        node = up;
    }
}

NodeHandle FingerTree::insert_first(Key key) {
    if (root_ != nullptr) throw std::logic_error("finger tree: insert_first on non-empty tree");
    Node* leaf = allocate(0);
    leaf->key = key;
    leaf->first = leaf;
    Node* bottom = allocate(1);
    insert_child(bottom, 0, leaf);
    bottom->first = leaf;
    root_ = bottom;
    size_ = 1;
    ++epoch_;
    structural_steps_ += 2;
    return handle_of(leaf);
}

NodeHandle FingerTree::link_after(Node* pred, Key key) {
    Node* leaf = allocate(0);
    leaf->key = key;
    leaf->first = leaf;
    leaf->prev = pred;
    leaf->next = pred->next;
    if (pred->next != nullptr) pred->next->prev = leaf;
    pred->next = leaf;
    Node* bottom = pred->parent;
    insert_child(bottom, index_of(bottom, pred) + 1, leaf);
    ++size_;
    ++epoch_;
    ++structural_steps_;
    fix_overflow(bottom);
    return handle_of(leaf);
}

NodeHandle FingerTree::link_as_minimum(Key key) {
    Node* old_min = root_->first;
    Node* leaf = allocate(0);
    leaf->key = key;
    leaf->first = leaf;
    leaf->next = old_min;
    old_min->prev = leaf;
    Node* bottom = old_min->parent;
    insert_child(bottom, 0, leaf);
    refresh_first_upwards(bottom, leaf);
    ++size_;
    ++epoch_;
    ++structural_steps_;
    fix_overflow(bottom);
    return handle_of(leaf);
}

void FingerTree::fix_overflow(Node* node) {
    while (node->degree == 5) {
        Node* right = allocate(node->height);
        for (int i = 3; i < 5; ++i) {
            right->child[i - 3] = node->child[i];
            node->child[i]->parent = right;
            node->child[i] = nullptr;
        }
        right->degree = 2;
        node->degree = 3;
        right->first = right->child[0]->first;
        right->prev = node;
        right->next = node->next;
        if (node->next != nullptr) node->next->prev = right;
        node->next = right;
        ++structural_steps_;

        Node* parent = node->parent;
        if (parent == nullptr) {
            Node* top = allocate(static_cast<std::uint8_t>(node->height + 1));
            insert_child(top, 0, node);
            insert_child(top, 1, right);
            top->first = node->first;
            root_ = top;
            ++structural_steps_;
            return;
        }
        insert_child(parent, index_of(parent, node) + 1, right);
        node = parent;
    }
}

NodeHandle FingerTree::insert_near(NodeHandle finger, Key key) {
    Node* f = checked(finger);
    ++comparisons_;
    if (key == f->key) throw std::invalid_argument("finger tree insert: duplicate key");
    if (key > f->key) {
        if (f->next != nullptr) {
            ++comparisons_;
            if (key == f->next->key) throw std::invalid_argument("finger tree insert: duplicate key");
            if (key > f->next->key) {
                throw std::invalid_argument("finger tree insert: finger is not adjacent to key");
            }
        }
        return link_after(f, key);
    }
    if (f->prev != nullptr) {
        ++comparisons_;
        if (key == f->prev->key) throw std::invalid_argument("finger tree insert: duplicate key");
        if (key < f->prev->key) {
            throw std::invalid_argument("finger tree insert: finger is not adjacent to key");
        }
        return link_after(f->prev, key);
    }
    return link_as_minimum(key);
}

NodeHandle FingerTree::insert_at(const SearchResult& where) {
    if (where.tree_id != id_ || where.epoch != epoch_) {
        throw std::invalid_argument("finger tree insert_at: search result is stale");
    }
    if (where.found) throw std::invalid_argument("finger tree insert_at: duplicate key");
    if (root_ == nullptr) return insert_first(where.target);
    if (where.pred) return link_after(checked(*where.pred), where.target);
    return link_as_minimum(where.target);
}

Key FingerTree::erase(NodeHandle h) {
    Node* leaf = checked(h);
    const Key key = leaf->key;
    Node* bottom = leaf->parent;
    const int index = index_of(bottom, leaf);
    remove_child(bottom, index);
    if (leaf->prev != nullptr) leaf->prev->next = leaf->next;
    if (leaf->next != nullptr) leaf->next->prev = leaf->prev;
    release(leaf);
    --size_;
    ++epoch_;
    ++structural_steps_;

    if (bottom->degree == 0) {
        // Only a height-1 root can run out of children.
        release(bottom);
        root_ = nullptr;
        ++structural_steps_;
        return key;
    }
    if (index == 0) refresh_first_upwards(bottom, bottom->child[0]->first);
    fix_underflow(bottom);
    return key;
}

void FingerTree::fix_underflow(Node* node) {
    while (node != root_ && node->degree == 1) {
        Node* parent = node->parent;
        const int i = index_of(parent, node);
        if (i > 0) {
            Node* left = parent->child[i - 1];
            if (left->degree >= 3) {
                Node* moved = left->child[left->degree - 1];
                remove_child(left, left->degree - 1);
                insert_child(node, 0, moved);
                node->first = moved->first;
                ++structural_steps_;
                return;
            }
            Node* only = node->child[0];
            insert_child(left, left->degree, only);
            if (node->prev != nullptr) node->prev->next = node->next;
            if (node->next != nullptr) node->next->prev = node->prev;
            remove_child(parent, i);
            release(node);
            ++structural_steps_;
        } else {
            Node* right = parent->child[1];
            if (right->degree >= 3) {
                Node* moved = right->child[0];
                remove_child(right, 0);
                insert_child(node, node->degree, moved);
                right->first = right->child[0]->first;
                ++structural_steps_;
                return;
            }
            for (int j = 0; j < right->degree; ++j) insert_child(node, node->degree, right->child[j]);
            if (right->prev != nullptr) right->prev->next = right->next;
            if (right->next != nullptr) right->next->prev = right->prev;
            remove_child(parent, 1);
            release(right);
            ++structural_steps_;
        }
        node = parent;
    }
    if (node == root_ && root_->height >= 2 && root_->degree == 1) {
        Node* old = root_;
        root_ = old->child[0];
        root_->parent = nullptr;
        release(old);
        ++structural_steps_;
    }
}

std::vector<Key> FingerTree::keys() const {
    std::vector<Key> out;
    out.reserve(size_);
    if (root_ == nullptr) return out;
    for (const Node* leaf = root_->first; leaf != nullptr; leaf = leaf->next) out.push_back(leaf->key);
    return out;
}

std::vector<NodeHandle> FingerTree::handles() const {
    std::vector<NodeHandle> out;
    out.reserve(size_);
    if (root_ == nullptr) return out;
    for (Node* leaf = root_->first; leaf != nullptr; leaf = leaf->next) out.push_back(handle_of(leaf));
    return out;
}

std::vector<std::string> FingerTree::validate() const {
    std::vector<std::string> problems;
    if (root_ == nullptr) {
        if (size_ != 0) problems.emplace_back("empty root with non-zero size");
        return problems;
    }
    if (root_->parent != nullptr) problems.emplace_back("root has a parent");

    // Walk level by level using the level links, checking them against the
    // child arrays on the way down.
    std::vector<const Node*> level{root_};
    while (!level.empty()) {
        std::vector<const Node*> below;
        for (std::size_t i = 0; i < level.size(); ++i) {
            const Node* n = level[i];
            const Node* expect_prev = i > 0 ? level[i - 1] : nullptr;
            const Node* expect_next = i + 1 < level.size() ? level[i + 1] : nullptr;
            if (n->prev != expect_prev || n->next != expect_next) {
                problems.emplace_back("level links broken at height " + std::to_string(n->height));
            }
            if (!n->live) problems.emplace_back("dead node reachable");
            if (n->height == 0) {
                if (n->first != n) problems.emplace_back("leaf first pointer is not itself");
                continue;
            }
            const bool is_root = n == root_;
            const int min_degree = is_root ? (n->height == 1 ? 1 : 2) : 2;
            if (n->degree < min_degree || n->degree > 4) {
                problems.emplace_back("degree " + std::to_string(n->degree) + " at height " +
                                      std::to_string(n->height));
            }
            for (int c = 0; c < n->degree; ++c) {
                const Node* ch = n->child[c];
                if (ch->parent != n) problems.emplace_back("parent pointer mismatch");
                if (ch->height + 1 != n->height) problems.emplace_back("uneven leaf depth");
                below.push_back(ch);
            }
            if (n->degree > 0 && n->first != n->child[0]->first) {
                problems.emplace_back("stale leftmost-leaf pointer at height " +
                                      std::to_string(n->height));
            }
        }
        if (!level.empty() && level.front()->height == 0) break;
        level = std::move(below);
    }
    if (level.size() != size_) problems.emplace_back("leaf count differs from size");
    for (std::size_t i = 1; i < level.size(); ++i) {
        if (!(level[i - 1]->key < level[i]->key)) {
            problems.emplace_back("keys out of order");
            break;
        }
    }
    return problems;
}

}  // namespace freshfinger
