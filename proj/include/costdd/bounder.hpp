#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>

#include "cost_vector.hpp"
#include "detail/flat_map.hpp"
#include "errors.hpp"
#include "ext_int.hpp"
#include "forest.hpp"

namespace costdd {

/// Half-open bound interval [aw, rb) on which a filtered result is constant.
///
/// An interval whose upper end is +inf also contains +inf itself: when no
/// feasible solution is rejected, the unbounded query yields the same
/// result as any finite bound >= aw.
struct Interval {
    ExtInt aw; // accept_worst: highest accepted cost, inclusive
    ExtInt rb; // reject_best: lowest rejected cost, exclusive

    bool contains(ExtInt b) const noexcept { return aw <= b && (b < rb || rb.is_pos_inf()); }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Per-node ordered store of (interval -> result) entries, keyed by aw.
/// Intervals stored for one node never overlap.
class IntervalMemo {
public:
    struct Entry {
        ExtInt rb;
        NodeId h;
    };
    using NodeMap = std::map<ExtInt, Entry>;

    /// Entry whose interval contains b. O(log m) in the node's entry count.
    std::optional<std::pair<NodeId, Interval>> lookup(NodeId node, ExtInt b) const {
        auto it = nodes_.find(node.id);
        if (it == nodes_.end()) return std::nullopt;
        const NodeMap& m = it->second;
        auto e = m.upper_bound(b);
        if (e == m.begin()) return std::nullopt;
        --e;
        Interval iv{e->first, e->second.rb};
        if (!iv.contains(b)) return std::nullopt;
        return std::make_pair(e->second.h, iv);
    }

    /// Stores (node, iv -> h). Re-inserting an identical entry is a no-op;
    /// any other overlap means the intervals were computed wrongly.
    void insert(NodeId node, Interval iv, NodeId h) {
        if (!(iv.aw < iv.rb)) throw InternalError("interval memo: empty interval " + describe(iv));
        NodeMap& m = nodes_[node.id];
        auto next = m.lower_bound(iv.aw);
        if (next != m.end() && next->first == iv.aw) {
            if (next->second.rb == iv.rb && next->second.h == h) return;
            throw InternalError("interval memo: conflicting entry at node " + std::to_string(node.id) + ": " +
                                describe(iv) + " vs " + describe({next->first, next->second.rb}));
        }
        if (next != m.end() && overlaps(iv, {next->first, next->second.rb}))
            throw InternalError("interval memo: overlapping intervals at node " + std::to_string(node.id));
        if (next != m.begin()) {
            auto prev = std::prev(next);
            if (overlaps(iv, {prev->first, prev->second.rb}))
                throw InternalError("interval memo: overlapping intervals at node " + std::to_string(node.id));
        }
        m.emplace_hint(next, iv.aw, Entry{iv.rb, h});
        ++size_;
    }

    std::size_t size() const noexcept { return size_; }
    void clear() {
        nodes_.clear();
        size_ = 0;
    }

    template <class Fn>
    void for_each(Fn&& fn) const {
        for (const auto& [id, m] : nodes_)
            for (const auto& [aw, e] : m) fn(NodeId{id}, Interval{aw, e.rb}, e.h);
    }

private:
    static bool overlaps(const Interval& a, const Interval& b) {
        if (a.rb.is_pos_inf() && b.rb.is_pos_inf()) return true;
        return std::max(a.aw, b.aw) < std::min(a.rb, b.rb);
    }
    static std::string describe(const Interval& iv) { return "[" + iv.aw.to_string() + ", " + iv.rb.to_string() + ")"; }

    std::unordered_map<std::uint64_t, NodeMap> nodes_;
    std::size_t size_ = 0;
};

struct BoundResult {
    NodeId h;
    /// Set only by the interval-memo variant.
    std::optional<ExtInt> aw;
    std::optional<ExtInt> rb;
    /// Procedure invocations spent on this query, terminal and memo-hit
    /// returns included.
    std::uint64_t calls = 0;
};

/// Cost-bounded filtering of diagrams in one forest under one cost vector.
///
/// All three backtracking variants compute h with
/// S_h = { X in S_f | Cost(X) <= b }. The memos live as long as the
/// Bounder, so repeated queries with different bounds reuse earlier work.
/// Changing costs means creating a new Bounder.
class Bounder {
public:
    Bounder(Forest& forest, CostVector costs) : forest_(&forest), costs_(std::move(costs)) {
        if (costs_.size() != forest.n_items())
            throw ContractError("Bounder: cost vector has " + std::to_string(costs_.size()) + " entries, forest has " +
                                std::to_string(forest.n_items()) + " items");
    }

    Forest& forest() noexcept { return *forest_; }
    const CostVector& costs() const noexcept { return costs_; }
    /// Invocations across every query issued so far.
    std::uint64_t total_calls() const noexcept { return calls_; }
    const IntervalMemo& interval_memo() const noexcept { return interval_memo_; }
    std::size_t flat_memo_size() const noexcept { return flat_memo_.size(); }

    void clear_memos() {
        interval_memo_.clear();
        flat_memo_.clear();
    }

    /// Plain depth-first backtracking without any memo.
    BoundResult backtrack_naive(NodeId f, ExtInt b) {
        check(f);
        const std::uint64_t before = calls_;
        NodeId h = naive_rec(f, b);
        return {h, std::nullopt, std::nullopt, calls_ - before};
    }

    /// Backtracking memoized on the exact (node, residual bound) pair.
    BoundResult backtrack_memo(NodeId f, ExtInt b) {
        check(f);
        const std::uint64_t before = calls_;
        NodeId h = memo_rec(f, b);
        return {h, std::nullopt, std::nullopt, calls_ - before};
    }

    /// Backtracking memoized on bound intervals. The returned [aw, rb) is
    /// the full range of bounds that give the same h for f.
    BoundResult backtrack_interval_memo(NodeId f, ExtInt b) {
        check(f);
        const std::uint64_t before = calls_;
        Step s = interval_rec(f, b);
        return {s.h, s.aw, s.rb, calls_ - before};
    }

    /// Exact call count backtrack_naive(f, b) would spend, for any b: the
    /// naive walk never prunes, so every root-to-node path is one visit.
    BigCount naive_call_estimate(NodeId f) const {
        check(f);
        if (f.is_terminal()) return 1;
        // Path counts flow parent -> child; ids descending is parents first.
        std::unordered_map<std::uint64_t, BigCount> paths;
        std::vector<std::uint64_t> order;
        std::vector<std::uint64_t> stack{f.id};
        while (!stack.empty()) {
            std::uint64_t id = stack.back();
            stack.pop_back();
            if (!paths.emplace(id, 0).second) continue;
            order.push_back(id);
            for (NodeId c : {forest_->lo(NodeId{id}), forest_->hi(NodeId{id})})
                if (!c.is_terminal() && !paths.contains(c.id)) stack.push_back(c.id);
        }
        std::sort(order.rbegin(), order.rend());
        paths[f.id] = 1;
        BigCount visits = 0;
        for (std::uint64_t id : order) {
            const BigCount& p = paths[id];
            visits += p;
            for (NodeId c : {forest_->lo(NodeId{id}), forest_->hi(NodeId{id})})
                if (!c.is_terminal()) paths[c.id] += p;
        }
        return 1 + 2 * visits;
    }

    /// ZDD of { X subset of items | Cost(X) <= b }: the interval-memo
    /// procedure applied to the power-set chain.
    NodeId build_cost_constraint(ExtInt b) { return backtrack_interval_memo(forest_->power_set(), b).h; }

    /// Conventional route: intersect f with the cost-constraint diagram.
    NodeId bound_via_intersection(NodeId f, ExtInt b) {
        check(f);
        return forest_->intersect(f, build_cost_constraint(b));
    }

    /// { X in S_f | lb < Cost(X) <= ub } as the difference of two bounded
    /// results.
    NodeId range_query(NodeId f, ExtInt lb, ExtInt ub) {
        if (lb > ub) throw ContractError("range_query: lower bound exceeds upper bound");
        const NodeId upper = backtrack_interval_memo(f, ub).h;
        const NodeId lower = backtrack_interval_memo(f, lb).h;
        return forest_->subtract(upper, lower);
    }

    /// Number of members of S_f costing at most c.
    BigCount rank(NodeId f, ExtInt c) { return forest_->count(backtrack_interval_memo(f, c).h); }

private:
    struct Step {
        NodeId h;
        ExtInt aw;
        ExtInt rb;
    };

    void check(NodeId f) const {
        if (!forest_->valid(f)) throw ContractError("Bounder: invalid handle");
    }

    NodeId naive_rec(NodeId f, ExtInt b) {
        ++calls_;
        if (f == Forest::kBottom) return Forest::kBottom;
        if (f == Forest::kTop) return b >= ExtInt(0) ? Forest::kTop : Forest::kBottom;
        const std::uint32_t v = forest_->var(f);
        const NodeId h0 = naive_rec(forest_->lo(f), b);
        const NodeId h1 = naive_rec(forest_->hi(f), b - costs_[v]);
        return forest_->make_node(v, h0, h1);
    }

    NodeId memo_rec(NodeId f, ExtInt b) {
        ++calls_;
        if (f == Forest::kBottom) return Forest::kBottom;
        if (f == Forest::kTop) return b >= ExtInt(0) ? Forest::kTop : Forest::kBottom;
        if (const std::uint32_t* hit = flat_memo_.find(f.id, b.raw())) return NodeId{*hit};
        const std::uint32_t v = forest_->var(f);
        const NodeId h0 = memo_rec(forest_->lo(f), b);
        const NodeId h1 = memo_rec(forest_->hi(f), b - costs_[v]);
        const NodeId h = forest_->make_node(v, h0, h1);
        if (!flat_memo_.insert(f.id, b.raw(), h.id))
            throw CapacityError("backtrack_memo: node ids beyond 32 bits are not supported by the flat memo");
        return h;
    }

    Step interval_rec(NodeId f, ExtInt b) {
        ++calls_;
        if (f == Forest::kBottom) return {Forest::kBottom, ExtInt::neg_inf(), ExtInt::pos_inf()};
        if (f == Forest::kTop) {
            if (b >= ExtInt(0)) return {Forest::kTop, ExtInt(0), ExtInt::pos_inf()};
            return {Forest::kBottom, ExtInt::neg_inf(), ExtInt(0)};
        }
        if (auto hit = interval_memo_.lookup(f, b)) return {hit->first, hit->second.aw, hit->second.rb};
        const std::uint32_t v = forest_->var(f);
        const std::int64_t c = costs_[v];
        const Step s0 = interval_rec(forest_->lo(f), b);
        const Step s1 = interval_rec(forest_->hi(f), b - c);
        const NodeId h = forest_->make_node(v, s0.h, s1.h);
        const ExtInt aw = std::max(s0.aw, s1.aw + c);
        const ExtInt rb = std::min(s0.rb, s1.rb + c);
        interval_memo_.insert(f, {aw, rb}, h);
        return {h, aw, rb};
    }

    Forest* forest_;
    CostVector costs_;
    IntervalMemo interval_memo_;
    detail::BoundMemo flat_memo_;
    std::uint64_t calls_ = 0;
};

} // namespace costdd
