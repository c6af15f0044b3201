#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "cost_vector.hpp"
#include "detail/flat_map.hpp"
#include "errors.hpp"
#include "ext_int.hpp"

namespace costdd {

/// Exact solution count.
using BigCount = boost::multiprecision::cpp_int;

/// Strictly increasing list of 1-based item numbers.
using ItemSet = std::vector<std::uint32_t>;

/// Handle to a node inside one Forest. Ids 0 and 1 are the terminals.
struct NodeId {
    std::uint64_t id = 0;

    constexpr bool is_terminal() const noexcept { return id < 2; }
    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

enum class SetOp : std::uint8_t { kUnion = 0, kIntersection = 1, kDifference = 2 };

struct CostRange {
    ExtInt min;
    ExtInt max;
    friend bool operator==(const CostRange&, const CostRange&) = default;
};

struct ForestOptions {
    /// Hard ceiling on stored nodes (terminals included). Each node costs
    /// 16 bytes in the node table plus about 16 bytes of unique-table slot,
    /// so 2^27 nodes is roughly 4 GiB.
    std::uint64_t max_nodes = (std::uint64_t{1} << 40) - 1;
    /// Operations recurse once per item level; forests with more items
    /// than this are refused instead of risking the machine stack.
    std::uint32_t max_items = 16384;
};

/// Hash-consed store of ZDD nodes over items 1..n.
///
/// Nodes are never freed. Node ids are handed out in creation order, and a
/// node is always created after both of its children, so increasing id
/// order is a topological order (children first).
class Forest {
public:
    static constexpr NodeId kBottom{0};
    static constexpr NodeId kTop{1};
    static constexpr std::uint32_t kMaxVar = (1u << 24) - 2;

    explicit Forest(std::uint32_t n_items, ForestOptions options = {})
        : n_items_(n_items), options_(options) {
        if (n_items > kMaxVar) throw ContractError("Forest: too many items");
        if (n_items > options_.max_items)
            throw ContractError("Forest: " + std::to_string(n_items) + " items exceed the recursion guard of " +
                                std::to_string(options_.max_items));
        // Terminal slots keep ids 0 and 1 reserved in the node table.
        push_node(0, 0);
        push_node(0, 0);
        unique_.assign(1024, 0);
    }

    Forest(const Forest&) = delete;
    Forest& operator=(const Forest&) = delete;
    Forest(Forest&&) noexcept = default;
    Forest& operator=(Forest&&) noexcept = default;

    std::uint32_t n_items() const noexcept { return n_items_; }
    /// Number of stored non-terminal nodes.
    std::uint64_t stored_nodes() const noexcept { return n_slots_ - 2; }

    bool valid(NodeId f) const noexcept { return f.id < n_slots_; }

    /// Item tested at f; terminals report n + 1.
    std::uint32_t var(NodeId f) const noexcept {
        if (f.is_terminal()) return n_items_ + 1;
        return static_cast<std::uint32_t>(slot(f.id).w0 >> kIdBits);
    }
    NodeId lo(NodeId f) const noexcept { return NodeId{slot(f.id).w0 & kIdMask}; }
    NodeId hi(NodeId f) const noexcept { return NodeId{slot(f.id).hi}; }

    /// Canonical node for (var, lo, hi). Applies the zero-suppress rule
    /// and returns an existing node when one with the same triple exists.
    NodeId make_node(std::uint32_t v, NodeId lo_child, NodeId hi_child) {
        if (!valid(lo_child) || !valid(hi_child)) throw ContractError("make_node: invalid child handle");
        if (v == 0 || v > n_items_) throw ContractError("make_node: item index out of range");
        if (v >= var(lo_child) || v >= var(hi_child))
            throw ContractError("make_node: item " + std::to_string(v) + " must precede both children");
        if (hi_child == kBottom) return lo_child;

        const std::uint64_t w0 = (std::uint64_t{v} << kIdBits) | lo_child.id;
        const std::uint64_t h = detail::hash_combine(w0, hi_child.id);
        std::size_t mask = unique_.size() - 1;
        std::size_t i = h & mask;
        for (;; i = (i + 1) & mask) {
            std::uint64_t id = unique_[i];
            if (id == 0) break;
            const Slot& s = slot(id);
            if (s.w0 == w0 && s.hi == hi_child.id) return NodeId{id};
        }
        if (n_slots_ >= options_.max_nodes)
            throw CapacityError("node table full: " + std::to_string(n_slots_) + " nodes (limit " +
                                std::to_string(options_.max_nodes) + ")");
        const std::uint64_t id = n_slots_;
        push_node(w0, hi_child.id);
        unique_[i] = id;
        if (++unique_size_ * 10 > unique_.size() * 7) grow_unique();
        return NodeId{id};
    }

    /// Family {{items...}} for a single set.
    NodeId single(const ItemSet& items) {
        check_item_set(items);
        NodeId r = kTop;
        for (auto it = items.rbegin(); it != items.rend(); ++it) r = make_node(*it, kBottom, r);
        return r;
    }

    /// Family of all subsets of 1..n: one chain node per item.
    NodeId power_set() {
        NodeId r = kTop;
        for (std::uint32_t v = n_items_; v >= 1; --v) r = make_node(v, r, r);
        return r;
    }

    NodeId apply(SetOp op, NodeId f, NodeId g) {
        if (!valid(f) || !valid(g)) throw ContractError("apply: invalid handle");
        switch (op) {
            case SetOp::kUnion: return unite(f, g);
            case SetOp::kIntersection: return intersect(f, g);
            case SetOp::kDifference: return subtract(f, g);
        }
        throw ContractError("apply: unknown operator");
    }

    NodeId unite(NodeId f, NodeId g) {
        if (f == kBottom || f == g) return g;
        if (g == kBottom) return f;
        if (g < f) std::swap(f, g);
        const detail::Key2 key{op_key(SetOp::kUnion, f), g.id};
        if (const std::uint64_t* hit = op_cache_.find(key)) return NodeId{*hit};
        const std::uint32_t vf = var(f), vg = var(g);
        NodeId r;
        if (vf < vg) {
            r = make_node(vf, unite(lo(f), g), hi(f));
        } else if (vf > vg) {
            r = make_node(vg, unite(f, lo(g)), hi(g));
        } else {
            NodeId l = unite(lo(f), lo(g));
            r = make_node(vf, l, unite(hi(f), hi(g)));
        }
        op_cache_.insert(key, r.id);
        return r;
    }

    NodeId intersect(NodeId f, NodeId g) {
        if (f == kBottom || g == kBottom) return kBottom;
        if (f == g) return f;
        if (g < f) std::swap(f, g);
        const detail::Key2 key{op_key(SetOp::kIntersection, f), g.id};
        if (const std::uint64_t* hit = op_cache_.find(key)) return NodeId{*hit};
        const std::uint32_t vf = var(f), vg = var(g);
        NodeId r;
        if (vf < vg) {
            r = intersect(lo(f), g);
        } else if (vf > vg) {
            r = intersect(f, lo(g));
        } else {
            NodeId l = intersect(lo(f), lo(g));
            r = make_node(vf, l, intersect(hi(f), hi(g)));
        }
        op_cache_.insert(key, r.id);
        return r;
    }

    NodeId subtract(NodeId f, NodeId g) {
        if (f == kBottom || f == g) return kBottom;
        if (g == kBottom) return f;
        const detail::Key2 key{op_key(SetOp::kDifference, f), g.id};
        if (const std::uint64_t* hit = op_cache_.find(key)) return NodeId{*hit};
        const std::uint32_t vf = var(f), vg = var(g);
        NodeId r;
        if (vf < vg) {
            r = make_node(vf, subtract(lo(f), g), hi(f));
        } else if (vf > vg) {
            r = subtract(f, lo(g));
        } else {
            NodeId l = subtract(lo(f), lo(g));
            r = make_node(vf, l, subtract(hi(f), hi(g)));
        }
        op_cache_.insert(key, r.id);
        return r;
    }

    void clear_op_cache() { op_cache_.clear(); }
    void clear_count_cache() { count_cache_.clear(); }

    /// |S_f|, memoized per node.
    const BigCount& count(NodeId f) {
        static const BigCount kZero = 0;
        static const BigCount kOne = 1;
        if (f == kBottom) return kZero;
        if (f == kTop) return kOne;
        if (!valid(f)) throw ContractError("count: invalid handle");
        if (const std::uint64_t* hit = count_index_.find({f.id, 0})) return count_cache_[*hit];
        BigCount c = count(lo(f));
        c += count(hi(f));
        count_index_.insert({f.id, 0}, count_cache_.size());
        count_cache_.push_back(std::move(c));
        return count_cache_.back();
    }

    /// Number of distinct non-terminal nodes reachable from f.
    std::uint64_t node_count(NodeId f) const {
        if (!valid(f)) throw ContractError("node_count: invalid handle");
        std::vector<bool> seen(n_slots_, false);
        std::vector<std::uint64_t> stack;
        std::uint64_t n = 0;
        if (!f.is_terminal()) stack.push_back(f.id);
        while (!stack.empty()) {
            std::uint64_t id = stack.back();
            stack.pop_back();
            if (seen[id]) continue;
            seen[id] = true;
            ++n;
            for (NodeId c : {lo(NodeId{id}), hi(NodeId{id})})
                if (!c.is_terminal() && !seen[c.id]) stack.push_back(c.id);
        }
        return n;
    }

    bool contains(NodeId f, const ItemSet& x) const {
        check_item_set(x);
        if (!valid(f)) throw ContractError("contains: invalid handle");
        std::size_t pos = 0;
        while (!f.is_terminal()) {
            const std::uint32_t v = var(f);
            // Items skipped by the diagram must be absent from x.
            if (pos < x.size() && x[pos] < v) return false;
            if (pos < x.size() && x[pos] == v) {
                f = hi(f);
                ++pos;
            } else {
                f = lo(f);
            }
        }
        return f == kTop && pos == x.size();
    }

    /// Every member of S_f, in lexicographic order. Refuses (before
    /// producing anything) when the family has more than `limit` members.
    std::vector<ItemSet> enumerate(NodeId f, std::uint64_t limit) {
        if (count(f) > limit)
            throw ContractError("enumerate: family has " + count(f).str() + " members, limit is " +
                                std::to_string(limit));
        std::vector<ItemSet> out;
        ItemSet prefix;
        std::function<void(NodeId)> walk = [&](NodeId g) {
            if (g == kBottom) return;
            if (g == kTop) {
                out.push_back(prefix);
                return;
            }
            prefix.push_back(var(g));
            walk(hi(g));
            prefix.pop_back();
            walk(lo(g));
        };
        walk(f);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// (min, max) of Cost(X) over S_f; (+inf, -inf) for the empty family.
    CostRange min_max_cost(NodeId f, const CostVector& costs) const {
        if (costs.size() != n_items_) throw ContractError("min_max_cost: cost vector length mismatch");
        if (!valid(f)) throw ContractError("min_max_cost: invalid handle");
        detail::FlatMap<CostRange> memo;
        std::function<CostRange(NodeId)> rec = [&](NodeId g) -> CostRange {
            if (g == kBottom) return {ExtInt::pos_inf(), ExtInt::neg_inf()};
            if (g == kTop) return {ExtInt(0), ExtInt(0)};
            if (const CostRange* hit = memo.find({g.id, 0})) return *hit;
            const CostRange r0 = rec(lo(g));
            const CostRange r1 = rec(hi(g));
            const std::int64_t c = costs[var(g)];
            const CostRange r{std::min(r0.min, r1.min + c), std::max(r0.max, r1.max + c)};
            memo.insert({g.id, 0}, r);
            return r;
        };
        return rec(f);
    }

    /// k independent uniform draws from S_f using a count-weighted walk.
    /// Deterministic for a given seed (std::mt19937_64).
    std::vector<ItemSet> sample(NodeId f, std::size_t k, std::uint64_t seed) {
        if (!valid(f)) throw ContractError("sample: invalid handle");
        if (f == kBottom) throw ContractError("sample: empty family");
        std::mt19937_64 rng(seed);
        boost::random::uniform_int_distribution<BigCount> pick(0, count(f) - 1);
        std::vector<ItemSet> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            BigCount r = pick(rng);
            ItemSet x;
            NodeId g = f;
            while (!g.is_terminal()) {
                const BigCount& c0 = count(lo(g));
                if (r < c0) {
                    g = lo(g);
                } else {
                    r -= c0;
                    x.push_back(var(g));
                    g = hi(g);
                }
            }
            out.push_back(std::move(x));
        }
        return out;
    }

    /// Scans the node table for zero-suppress and sharing violations.
    bool check_canonical() const {
        detail::FlatMap<std::uint8_t> seen;
        for (std::uint64_t id = 2; id < n_slots_; ++id) {
            const NodeId f{id};
            if (hi(f) == kBottom) return false;
            if (var(f) >= var(lo(f)) || var(f) >= var(hi(f))) return false;
            const Slot& s = slot(id);
            if (seen.find({s.w0, s.hi})) return false;
            seen.insert({s.w0, s.hi}, 1);
        }
        return true;
    }

    const ForestOptions& options() const noexcept { return options_; }

private:
    static constexpr int kIdBits = 40;
    static constexpr std::uint64_t kIdMask = (std::uint64_t{1} << kIdBits) - 1;
    static constexpr int kChunkBits = 20;
    static constexpr std::uint64_t kChunkSize = std::uint64_t{1} << kChunkBits;

    struct Slot {
        std::uint64_t w0; // var << 40 | lo
        std::uint64_t hi;
    };

    const Slot& slot(std::uint64_t id) const noexcept { return chunks_[id >> kChunkBits][id & (kChunkSize - 1)]; }

    void push_node(std::uint64_t w0, std::uint64_t hi) {
        if ((n_slots_ & (kChunkSize - 1)) == 0) chunks_.push_back(std::make_unique<Slot[]>(kChunkSize));
        chunks_[n_slots_ >> kChunkBits][n_slots_ & (kChunkSize - 1)] = Slot{w0, hi};
        ++n_slots_;
    }

    void grow_unique() {
        std::vector<std::uint64_t> next(unique_.size() * 2, 0);
        const std::size_t mask = next.size() - 1;
        for (std::uint64_t id : unique_) {
            if (id == 0) continue;
            const Slot& s = slot(id);
            std::size_t i = detail::hash_combine(s.w0, s.hi) & mask;
            while (next[i] != 0) i = (i + 1) & mask;
            next[i] = id;
        }
        unique_.swap(next);
    }

    static std::uint64_t op_key(SetOp op, NodeId f) noexcept {
        return (static_cast<std::uint64_t>(op) << 60) | f.id;
    }

    void check_item_set(const ItemSet& x) const {
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0 || x[i] > n_items_) throw ContractError("item set: item out of range");
            if (i > 0 && x[i] <= x[i - 1]) throw ContractError("item set: items must be strictly increasing");
        }
    }

    std::uint32_t n_items_;
    ForestOptions options_;
    std::vector<std::unique_ptr<Slot[]>> chunks_;
    std::uint64_t n_slots_ = 0;
    std::vector<std::uint64_t> unique_; // node ids, 0 = empty
    std::uint64_t unique_size_ = 0;
    detail::FlatMap<std::uint64_t> op_cache_;
    detail::FlatMap<std::uint64_t> count_index_;
    std::deque<BigCount> count_cache_; // deque keeps returned references stable
};

} // namespace costdd
