#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cost_vector.hpp"
#include "errors.hpp"

namespace costdd {

using VertexId = std::uint32_t;

struct Edge {
    VertexId u;
    VertexId v;
    std::int64_t cost;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected simple graph with 1-based vertices. Edge k (1-based) is
/// item k of every diagram built from the graph, so edge order is the
/// variable order.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::uint32_t n_vertices) : n_vertices_(n_vertices) {}

    std::uint32_t n_vertices() const noexcept { return n_vertices_; }
    std::uint32_t n_edges() const noexcept { return static_cast<std::uint32_t>(edges_.size()); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    /// 1-based.
    const Edge& edge(std::uint32_t item) const { return edges_.at(item - 1); }

    void add_edge(VertexId u, VertexId v, std::int64_t cost) {
        if (u == 0 || v == 0 || u > n_vertices_ || v > n_vertices_)
            throw ContractError("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") has a vertex out of range");
        if (u == v) throw ContractError("self-loop on vertex " + std::to_string(u));
        if (!keys_.insert(std::minmax(u, v)).second)
            throw ContractError("duplicate edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
        edges_.push_back({u, v, cost});
    }

    CostVector costs() const {
        std::vector<std::int64_t> c;
        c.reserve(edges_.size());
        for (const Edge& e : edges_) c.push_back(e.cost);
        return CostVector(std::move(c));
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_vertices_ == b.n_vertices_ && a.edges_ == b.edges_;
    }

private:
    std::uint32_t n_vertices_ = 0;
    std::vector<Edge> edges_;
    std::set<std::pair<VertexId, VertexId>> keys_;
};

/// Uniform integer in [lo, hi] from a 64-bit Mersenne Twister, by rejection
/// on the raw 64-bit output followed by modulo. Fixed across platforms.
inline std::int64_t uniform_cost(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == std::numeric_limits<std::uint64_t>::max()) return static_cast<std::int64_t>(rng());
    const std::uint64_t range = span + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + x % range);
}

/// n x n grid of cells: (n+1)^2 vertices numbered row-major from 1 and
/// 2n(n+1) edges. Row by row, each vertex contributes its edge to the
/// right and then its edge downward, which keeps the frontier within
/// n + 2 vertices. Costs are i.i.d. uniform_cost(lo, hi) from
/// std::mt19937_64(seed), drawn in edge order.
inline Graph grid_graph(std::uint32_t n, std::int64_t cost_lo, std::int64_t cost_hi, std::uint64_t seed) {
    if (n < 1) throw ContractError("grid_graph: n must be at least 1");
    if (cost_lo > cost_hi) throw ContractError("grid_graph: cost_lo exceeds cost_hi");
    const std::uint32_t side = n + 1;
    Graph g(side * side);
    std::mt19937_64 rng(seed);
    auto id = [side](std::uint32_t r, std::uint32_t c) { return r * side + c + 1; };
    for (std::uint32_t r = 0; r < side; ++r) {
        for (std::uint32_t c = 0; c < side; ++c) {
            if (c + 1 < side) g.add_edge(id(r, c), id(r, c + 1), uniform_cost(rng, cost_lo, cost_hi));
            if (r + 1 < side) g.add_edge(id(r, c), id(r + 1, c), uniform_cost(rng, cost_lo, cost_hi));
        }
    }
    return g;
}

/// First and last 1-based edge index touching each vertex (0 if isolated).
struct EdgeSpan {
    std::vector<std::uint32_t> first;
    std::vector<std::uint32_t> last;
};

inline EdgeSpan edge_spans(const Graph& g) {
    EdgeSpan s{std::vector<std::uint32_t>(g.n_vertices() + 1, 0), std::vector<std::uint32_t>(g.n_vertices() + 1, 0)};
    for (std::uint32_t i = 1; i <= g.n_edges(); ++i) {
        for (VertexId w : {g.edge(i).u, g.edge(i).v}) {
            if (s.first[w] == 0) s.first[w] = i;
            s.last[w] = i;
        }
    }
    return s;
}

/// Largest number of vertices touching both a processed and an unprocessed
/// edge between two consecutive steps of an edge-order scan. The edge being
/// processed always occupies two slots, so any nonempty graph reports >= 2.
inline std::uint32_t frontier_width(const Graph& g) {
    if (g.n_edges() == 0) return 0;
    const EdgeSpan s = edge_spans(g);
    // delta[i] = change in frontier size after step i
    std::vector<std::int64_t> delta(g.n_edges() + 2, 0);
    for (VertexId w = 1; w <= g.n_vertices(); ++w) {
        if (s.first[w] == 0 || s.first[w] == s.last[w]) continue;
        delta[s.first[w]] += 1;
        delta[s.last[w]] -= 1;
    }
    std::int64_t cur = 0, best = 2;
    for (std::uint32_t i = 1; i <= g.n_edges(); ++i) {
        cur += delta[i];
        best = std::max(best, cur);
    }
    return static_cast<std::uint32_t>(best);
}

/// Same graph with edges re-sorted by breadth-first rank from `source`:
/// by the earlier-ranked endpoint, then the later one. Unreachable
/// vertices rank after every reachable one in id order.
inline Graph bfs_edge_order(const Graph& g, VertexId source) {
    if (source == 0 || source > g.n_vertices()) throw ContractError("bfs_edge_order: source out of range");
    std::vector<std::vector<VertexId>> adj(g.n_vertices() + 1);
    for (const Edge& e : g.edges()) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    const std::uint32_t unset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> rank(g.n_vertices() + 1, unset);
    std::vector<VertexId> queue{source};
    rank[source] = 0;
    std::uint32_t next = 1;
    for (std::size_t qi = 0; qi < queue.size(); ++qi)
        for (VertexId w : adj[queue[qi]])
            if (rank[w] == unset) {
                rank[w] = next++;
                queue.push_back(w);
            }
    for (VertexId w = 1; w <= g.n_vertices(); ++w)
        if (rank[w] == unset) rank[w] = next++;

    std::vector<Edge> edges = g.edges();
    std::stable_sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
        auto key = [&](const Edge& e) { return std::minmax(rank[e.u], rank[e.v]); };
        return key(a) < key(b);
    });
    Graph out(g.n_vertices());
    for (const Edge& e : edges) out.add_edge(e.u, e.v, e.cost);
    return out;
}

} // namespace costdd
