// Cost histogram of all corner-to-corner simple paths in a 5x5 grid, read
// off as range queries on one Bounder.
#include <iostream>

#include "costdd/costdd.hpp"

int main() {
    using namespace costdd;
    const Graph g = grid_graph(5, 1000, 1999, 7);
    Forest forest(g.n_edges());
    const NodeId paths = build_path_zdd(forest, g, 1, g.n_vertices(), PathKind::kSimple);
    Bounder bounder(forest, g.costs());

    const CostRange range = forest.min_max_cost(paths, bounder.costs());
    std::cout << forest.count(paths) << " paths, cost " << range.min << " .. " << range.max << '\n';

    const std::int64_t lo = range.min.value() - 1, hi = range.max.value();
    const int buckets = 10;
    for (int i = 0; i < buckets; ++i) {
        const ExtInt a(lo + (hi - lo) * i / buckets), b(lo + (hi - lo) * (i + 1) / buckets);
        const NodeId slice = bounder.range_query(paths, a, b);
        std::cout << "(" << a << ", " << b << "]  " << forest.count(slice) << '\n';
    }
    std::cout << "interval memo entries: " << bounder.interval_memo().size() << '\n';
}
