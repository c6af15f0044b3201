#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "detail/flat_map.hpp"
#include "errors.hpp"
#include "forest.hpp"
#include "graph.hpp"

namespace costdd {

enum class PathKind { kSimple, kHamiltonian };

namespace detail {

/// Interned mate vectors of one frontier level, all of the same width.
class StateTable {
public:
    explicit StateTable(std::size_t width) : width_(width) { index_.assign(64, kNone); }

    std::size_t size() const noexcept { return count_; }
    std::span<const std::uint16_t> at(std::uint32_t i) const {
        return {data_.data() + static_cast<std::size_t>(i) * width_, width_};
    }

    std::uint32_t intern(std::span<const std::uint16_t> s) {
        const std::uint64_t h = hash(s);
        std::size_t mask = index_.size() - 1;
        std::size_t i = h & mask;
        for (;; i = (i + 1) & mask) {
            const std::uint32_t k = index_[i];
            if (k == kNone) break;
            if (std::equal(s.begin(), s.end(), data_.begin() + static_cast<std::ptrdiff_t>(k) * width_)) return k;
        }
        const auto k = static_cast<std::uint32_t>(count_++);
        data_.insert(data_.end(), s.begin(), s.end());
        index_[i] = k;
        if (count_ * 10 > index_.size() * 7) regrow();
        return k;
    }

    void release() {
        std::vector<std::uint16_t>().swap(data_);
        std::vector<std::uint32_t>().swap(index_);
    }

private:
    static constexpr std::uint32_t kNone = 0xffffffffu;

    std::uint64_t hash(std::span<const std::uint16_t> s) const {
        std::uint64_t h = 0x12345678;
        for (std::uint16_t x : s) h = hash_combine(h, x);
        return h;
    }

    void regrow() {
        std::vector<std::uint32_t> next(index_.size() * 2, kNone);
        const std::size_t mask = next.size() - 1;
        for (std::uint32_t k = 0; k < count_; ++k) {
            std::size_t i = hash(at(k)) & mask;
            while (next[i] != kNone) i = (i + 1) & mask;
            next[i] = k;
        }
        index_.swap(next);
    }

    std::size_t width_;
    std::size_t count_ = 0;
    std::vector<std::uint16_t> data_;
    std::vector<std::uint32_t> index_;
};

} // namespace detail

/// Frontier-based (simpath style) construction of the ZDD whose members
/// are the edge sets of s-t paths in g: all simple paths, or only those
/// visiting every vertex.
///
/// Per frontier vertex the state keeps a mate value:
///   mate[v] == v      v has degree 0
///   mate[v] == kUsed  v has degree 2 (interior of a path)
///   mate[v] == w      v is an end of a path fragment whose other end is w
/// Equal states at the same edge level are merged. Levels are expanded
/// top-down, then nodes are emitted bottom-up through make_node.
class PathZddBuilder {
public:
    static constexpr std::uint16_t kUsed = 0;

    PathZddBuilder(const Graph& g, VertexId s, VertexId t, PathKind kind) : g_(g), s_(s), t_(t), kind_(kind) {
        if (s == 0 || s > g.n_vertices() || t == 0 || t > g.n_vertices())
            throw ContractError("build_path_zdd: terminal vertex out of range");
        if (s == t) throw ContractError("build_path_zdd: source and target must differ");
        if (g.n_vertices() >= 0xffff) throw ContractError("build_path_zdd: at most 65534 vertices");
    }

    NodeId build(Forest& forest) {
        const std::uint32_t m = g_.n_edges();
        if (forest.n_items() != m)
            throw ContractError("build_path_zdd: forest has " + std::to_string(forest.n_items()) + " items, graph has " +
                                std::to_string(m) + " edges");
        spans_ = edge_spans(g_);
        if (spans_.first[s_] == 0 || spans_.first[t_] == 0) return Forest::kBottom;
        max_first_ = 0;
        for (VertexId w = 1; w <= g_.n_vertices(); ++w) {
            if (spans_.first[w] == 0 && kind_ == PathKind::kHamiltonian) return Forest::kBottom;
            max_first_ = std::max(max_first_, spans_.first[w]);
        }

        // slots[i] = sorted vertices with first <= i <= last (1-based levels)
        slots_.assign(m + 2, {});
        for (VertexId w = 1; w <= g_.n_vertices(); ++w)
            if (spans_.first[w] != 0)
                for (std::uint32_t i = spans_.first[w]; i <= spans_.last[w]; ++i) slots_[i].push_back(w);

        mate_.assign(g_.n_vertices() + 1, 0);
        children_.assign(m + 1, {});

        // Top-down: expand level i into level i + 1.
        detail::StateTable cur(slots_[1].size());
        {
            std::vector<std::uint16_t> root(slots_[1].begin(), slots_[1].end());
            cur.intern(root);
        }
        std::vector<std::uint16_t> buf;
        for (std::uint32_t i = 1; i <= m; ++i) {
            detail::StateTable next(i < m ? slots_[i + 1].size() : 0);
            auto& kids = children_[i];
            kids.resize(cur.size() * 2);
            for (std::uint32_t k = 0; k < cur.size(); ++k) {
                for (int take = 0; take < 2; ++take) {
                    kids[2 * k + take] = transition(i, cur.at(k), take == 1, next, buf);
                }
            }
            cur.release();
            cur = std::move(next);
        }

        // Bottom-up: level i nodes from level i + 1 ids.
        std::vector<NodeId> below, here;
        for (std::uint32_t i = m; i >= 1; --i) {
            const auto& kids = children_[i];
            here.assign(kids.size() / 2, Forest::kBottom);
            auto resolve = [&](std::uint32_t ref) {
                if (ref == kRefBottom) return Forest::kBottom;
                if (ref == kRefTop) return Forest::kTop;
                return below[ref];
            };
            for (std::size_t k = 0; k < here.size(); ++k)
                here[k] = forest.make_node(i, resolve(kids[2 * k]), resolve(kids[2 * k + 1]));
            std::vector<std::uint32_t>().swap(children_[i]);
            below.swap(here);
        }
        return m == 0 ? Forest::kBottom : below.at(0);
    }

    /// Number of distinct mate states created, summed over levels.
    std::uint64_t states() const noexcept { return states_; }

private:
    static constexpr std::uint32_t kRefBottom = 0xffffffffu;
    static constexpr std::uint32_t kRefTop = 0xfffffffeu;

    std::uint32_t degree(VertexId w) const {
        if (mate_[w] == kUsed) return 2;
        return mate_[w] == w ? 0 : 1;
    }
    bool is_terminal(VertexId w) const { return w == s_ || w == t_; }

    std::uint32_t transition(std::uint32_t i, std::span<const std::uint16_t> state, bool take,
                             detail::StateTable& next, std::vector<std::uint16_t>& buf) {
        const std::vector<VertexId>& here = slots_[i];
        for (std::size_t j = 0; j < here.size(); ++j) mate_[here[j]] = state[j];
        const VertexId u = g_.edge(i).u, v = g_.edge(i).v;

        if (take) {
            if (degree(u) == 2 || degree(v) == 2) return kRefBottom;
            if ((is_terminal(u) && degree(u) == 1) || (is_terminal(v) && degree(v) == 1)) return kRefBottom;
            if (mate_[u] == v) return kRefBottom; // would close a cycle
            const VertexId a = degree(u) == 0 ? u : mate_[u];
            const VertexId b = degree(v) == 0 ? v : mate_[v];
            const bool u_was_end = degree(u) == 1, v_was_end = degree(v) == 1;
            mate_[a] = static_cast<std::uint16_t>(b);
            mate_[b] = static_cast<std::uint16_t>(a);
            if (u_was_end) mate_[u] = kUsed;
            if (v_was_end) mate_[v] = kUsed;
            if ((a == s_ && b == t_) || (a == t_ && b == s_)) return complete(i);
        }

        for (VertexId w : here) {
            if (spans_.last[w] != i) continue;
            const std::uint32_t d = degree(w);
            if (is_terminal(w)) {
                if (d != 1) return kRefBottom;
            } else if (kind_ == PathKind::kSimple ? d == 1 : d != 2) {
                return kRefBottom;
            }
        }
        if (i == g_.n_edges()) return kRefBottom;

        const std::vector<VertexId>& there = slots_[i + 1];
        buf.resize(there.size());
        for (std::size_t j = 0; j < there.size(); ++j) {
            const VertexId w = there[j];
            buf[j] = spans_.first[w] == i + 1 ? static_cast<std::uint16_t>(w) : mate_[w];
        }
        const std::size_t before = next.size();
        const std::uint32_t k = next.intern(buf);
        if (next.size() != before) ++states_;
        return k;
    }

    /// The s-t path just closed; every later edge stays unused.
    std::uint32_t complete(std::uint32_t i) const {
        for (VertexId w : slots_[i]) {
            const std::uint32_t d = degree(w);
            if (d == 1 && !is_terminal(w)) return kRefBottom;
            if (kind_ == PathKind::kHamiltonian && d == 0) return kRefBottom;
        }
        if (kind_ == PathKind::kHamiltonian && i < max_first_) return kRefBottom;
        return kRefTop;
    }

    const Graph& g_;
    VertexId s_, t_;
    PathKind kind_;
    EdgeSpan spans_;
    std::uint32_t max_first_ = 0;
    std::vector<std::vector<VertexId>> slots_;
    std::vector<std::uint16_t> mate_;
    std::vector<std::vector<std::uint32_t>> children_;
    std::uint64_t states_ = 1;
};

inline NodeId build_path_zdd(Forest& forest, const Graph& g, VertexId s, VertexId t, PathKind kind) {
    return PathZddBuilder(g, s, t, kind).build(forest);
}

} // namespace costdd
