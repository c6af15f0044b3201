#include <catch2/catch_amalgamated.hpp>

#include "costdd/frontier.hpp"
#include "oracles.hpp"

using namespace costdd;
using oracle::Family;

namespace {

NodeId paths(Forest& forest, const Graph& g, VertexId s, VertexId t, PathKind kind) {
    return build_path_zdd(forest, g, s, t, kind);
}

std::vector<std::uint32_t> degrees(const Graph& g, const ItemSet& x) {
    std::vector<std::uint32_t> deg(g.n_vertices() + 1, 0);
    for (auto i : x) {
        ++deg[g.edge(i).u];
        ++deg[g.edge(i).v];
    }
    return deg;
}

} // namespace

TEST_CASE("grid sizes and edge order") {
    const Graph g8 = grid_graph(8, 1000, 1999, 1);
    CHECK(g8.n_vertices() == 81);
    CHECK(g8.n_edges() == 144);
    const Graph g10 = grid_graph(10, 1000, 1999, 1);
    CHECK(g10.n_vertices() == 121);
    CHECK(g10.n_edges() == 220);

    // 2x2 vertices: right then down from each vertex, row-major
    const Graph g1 = grid_graph(1, 5, 5, 0);
    REQUIRE(g1.n_edges() == 4);
    CHECK(g1.edge(1) == Edge{1, 2, 5});
    CHECK(g1.edge(2) == Edge{1, 3, 5});
    CHECK(g1.edge(3) == Edge{2, 4, 5});
    CHECK(g1.edge(4) == Edge{3, 4, 5});

    for (const Edge& e : g8.edges()) {
        CHECK(e.cost >= 1000);
        CHECK(e.cost <= 1999);
    }
    CHECK(grid_graph(4, 1, 100, 7) == grid_graph(4, 1, 100, 7));
    CHECK_FALSE(grid_graph(4, 1, 100, 7) == grid_graph(4, 1, 100, 8));
    CHECK_THROWS_AS(grid_graph(0, 1, 2, 0), ContractError);
    CHECK_THROWS_AS(grid_graph(2, 3, 2, 0), ContractError);
}

TEST_CASE("graph rejects malformed edges") {
    Graph g(3);
    g.add_edge(1, 2, 0);
    CHECK_THROWS_AS(g.add_edge(2, 1, 4), ContractError);
    CHECK_THROWS_AS(g.add_edge(3, 3, 4), ContractError);
    CHECK_THROWS_AS(g.add_edge(0, 3, 4), ContractError);
    CHECK_THROWS_AS(g.add_edge(1, 4, 4), ContractError);
    CHECK_THROWS(g.edge(2));
}

TEST_CASE("frontier width") {
    CHECK(frontier_width(grid_graph(1, 1, 1, 0)) == 2);
    Graph single(2);
    single.add_edge(1, 2, 1);
    CHECK(frontier_width(single) == 2);
    CHECK(frontier_width(Graph(3)) == 0);
    CHECK(frontier_width(grid_graph(6, 1, 1, 0)) <= 8);
    CHECK(frontier_width(grid_graph(6, 1, 1, 0)) >= 7);
}

TEST_CASE("paths in the 2x2 grid") {
    const Graph g = grid_graph(1, 1, 1, 0);
    Forest forest(g.n_edges());
    const NodeId simple = paths(forest, g, 1, 4, PathKind::kSimple);
    CHECK(forest.count(simple) == 2);
    CHECK(forest.enumerate(simple, 10) == std::vector<ItemSet>{{1, 3}, {2, 4}});
    CHECK(paths(forest, g, 1, 4, PathKind::kHamiltonian) == Forest::kBottom);
    // adjacent corners: the edge itself plus the long way round
    CHECK(forest.count(paths(forest, g, 1, 2, PathKind::kSimple)) == 2);
    CHECK(forest.count(paths(forest, g, 1, 2, PathKind::kHamiltonian)) == 1);
}

TEST_CASE("known grid path counts") {
    {
        const Graph g = grid_graph(6, 1000, 1999, 1);
        Forest forest(g.n_edges());
        CHECK(forest.count(paths(forest, g, 1, g.n_vertices(), PathKind::kSimple)) == BigCount("575780564"));
    }
    {
        const Graph g = grid_graph(8, 1000, 1999, 1);
        Forest forest(g.n_edges());
        CHECK(forest.count(paths(forest, g, 1, g.n_vertices(), PathKind::kHamiltonian)) == BigCount("2688307514"));
    }
}

TEST_CASE("terminal validation") {
    const Graph g = grid_graph(1, 1, 1, 0);
    Forest forest(g.n_edges());
    CHECK_THROWS_AS(paths(forest, g, 2, 2, PathKind::kSimple), ContractError);
    CHECK_THROWS_AS(paths(forest, g, 0, 2, PathKind::kSimple), ContractError);
    CHECK_THROWS_AS(paths(forest, g, 1, 5, PathKind::kSimple), ContractError);
    Forest wrong(3);
    CHECK_THROWS_AS(paths(wrong, g, 1, 4, PathKind::kSimple), ContractError);
}

TEST_CASE("isolated terminal yields the empty family") {
    Graph g(3);
    g.add_edge(1, 2, 1);
    Forest forest(1);
    CHECK(paths(forest, g, 1, 3, PathKind::kSimple) == Forest::kBottom);
    CHECK(paths(forest, g, 1, 2, PathKind::kHamiltonian) == Forest::kBottom);
    CHECK(paths(forest, g, 1, 2, PathKind::kSimple) == forest.single({1}));
}

TEST_CASE("frontier construction matches depth-first enumeration") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        const std::uint32_t nv = 2 + rng() % 9;
        const Graph g = oracle::random_graph(rng, nv, 14, 1, 20);
        std::uniform_int_distribution<std::uint32_t> vd(1, nv);
        const VertexId s = vd(rng);
        VertexId t = vd(rng);
        if (t == s) t = s % nv + 1;
        Forest forest(g.n_edges());
        for (bool ham : {false, true}) {
            const Family expected = oracle::brute_paths(g, s, t, ham);
            const NodeId f = paths(forest, g, s, t, ham ? PathKind::kHamiltonian : PathKind::kSimple);
            // canonical forms: equal families share one handle
            REQUIRE(f == oracle::family_to_zdd(forest, expected));
            REQUIRE(forest.count(f) == expected.size());
        }
        REQUIRE(forest.check_canonical());
    }
}

TEST_CASE("members are s-t paths with the right degrees") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint32_t nv = 3 + rng() % 8;
        const Graph g = oracle::random_graph(rng, nv, 14, 1, 20);
        Forest forest(g.n_edges());
        const NodeId simple = paths(forest, g, 1, nv, PathKind::kSimple);
        const NodeId ham = paths(forest, g, 1, nv, PathKind::kHamiltonian);
        CHECK(forest.subtract(ham, simple) == Forest::kBottom);
        for (const ItemSet& x : forest.enumerate(simple, 1u << 16)) {
            const auto deg = degrees(g, x);
            REQUIRE(deg[1] == 1);
            REQUIRE(deg[nv] == 1);
            for (VertexId v = 2; v < nv; ++v) REQUIRE((deg[v] == 0 || deg[v] == 2));
            // a path on k edges touches k + 1 vertices
            const auto touched = std::count_if(deg.begin() + 1, deg.end(), [](auto d) { return d > 0; });
            REQUIRE(static_cast<std::size_t>(touched) == x.size() + 1);
        }
        for (const ItemSet& x : forest.enumerate(ham, 1u << 16)) REQUIRE(x.size() == nv - 1);
    }
}

TEST_CASE("edge reordering preserves path counts") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint32_t nv = 3 + rng() % 8;
        const Graph g = oracle::random_graph(rng, nv, 14, 1, 20);
        const Graph h = bfs_edge_order(g, 1);
        REQUIRE(h.n_edges() == g.n_edges());
        Forest a(g.n_edges()), b(h.n_edges());
        for (auto kind : {PathKind::kSimple, PathKind::kHamiltonian})
            CHECK(a.count(paths(a, g, 1, nv, kind)) == b.count(paths(b, h, 1, nv, kind)));
    }
    CHECK_THROWS_AS(bfs_edge_order(grid_graph(1, 1, 1, 0), 5), ContractError);
}
