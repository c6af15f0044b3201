#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "costdd/bounder.hpp"
#include "oracles.hpp"

using namespace costdd;
using oracle::Family;

namespace {

Family members(Forest& forest, NodeId f) {
    const auto v = forest.enumerate(f, 1u << 20);
    return Family(v.begin(), v.end());
}

/// Distinct (node, residual bound) pairs a memoized walk expands, found by
/// exploring the pair graph directly.
std::size_t reachable_states(const Forest& forest, NodeId f, ExtInt b, const CostVector& costs) {
    std::set<std::pair<std::uint64_t, std::int64_t>> seen;
    std::vector<std::pair<NodeId, ExtInt>> stack{{f, b}};
    while (!stack.empty()) {
        auto [g, r] = stack.back();
        stack.pop_back();
        if (g.is_terminal() || !seen.insert({g.id, r.raw()}).second) continue;
        stack.push_back({forest.lo(g), r});
        stack.push_back({forest.hi(g), r - costs[forest.var(g)]});
    }
    return seen.size();
}

ExtInt random_bound(std::mt19937_64& rng) {
    switch (rng() % 10) {
        case 0: return ExtInt::neg_inf();
        case 1: return ExtInt::pos_inf();
        default: return ExtInt(static_cast<std::int64_t>(rng() % 301) - 150);
    }
}

} // namespace

TEST_CASE("terminal cases of every variant") {
    Forest forest(3);
    Bounder bounder(forest, CostVector{3, 5, 7});
    for (auto run : {&Bounder::backtrack_naive, &Bounder::backtrack_memo, &Bounder::backtrack_interval_memo}) {
        CHECK((bounder.*run)(Forest::kTop, ExtInt(0)).h == Forest::kTop);
        CHECK((bounder.*run)(Forest::kTop, ExtInt(-1)).h == Forest::kBottom);
        CHECK((bounder.*run)(Forest::kBottom, ExtInt(100)).h == Forest::kBottom);
    }
}

TEST_CASE("power set of three items with costs 3, 5, 7 under bound 8") {
    Forest forest(3);
    Bounder bounder(forest, CostVector{3, 5, 7});
    const NodeId f = forest.power_set();
    const Family expected{{}, {1}, {2}, {3}, {1, 2}};

    const BoundResult naive = bounder.backtrack_naive(f, ExtInt(8));
    CHECK(forest.count(naive.h) == 5);
    CHECK(members(forest, naive.h) == expected);
    CHECK_FALSE(naive.aw);

    CHECK(bounder.backtrack_memo(f, ExtInt(8)).h == naive.h);

    // subset costs are 0,3,5,7,8,10,12,15
    const BoundResult iv = bounder.backtrack_interval_memo(f, ExtInt(8));
    CHECK(iv.h == naive.h);
    CHECK(*iv.aw == ExtInt(8));
    CHECK(*iv.rb == ExtInt(10));
}

TEST_CASE("interval variant at the extreme bounds") {
    Forest forest(3);
    Bounder bounder(forest, CostVector{3, 5, 7});
    const NodeId f = forest.power_set();

    const BoundResult bottom = bounder.backtrack_interval_memo(Forest::kBottom, ExtInt(12));
    CHECK(bottom.h == Forest::kBottom);
    CHECK(*bottom.aw == ExtInt::neg_inf());
    CHECK(*bottom.rb == ExtInt::pos_inf());

    const BoundResult lo = bounder.backtrack_interval_memo(f, ExtInt::neg_inf());
    CHECK(lo.h == Forest::kBottom);
    CHECK(*lo.aw == ExtInt::neg_inf());
    CHECK(*lo.rb == ExtInt(0));

    const BoundResult hi = bounder.backtrack_interval_memo(f, ExtInt::pos_inf());
    CHECK(hi.h == f);
    CHECK(*hi.aw == ExtInt(15));
    CHECK(*hi.rb == ExtInt::pos_inf());
}

TEST_CASE("flat memo skips repeated (node, bound) pairs") {
    Forest forest(3);
    // Items 1 and 2 both cost 4, so taking exactly one of them reaches the
    // item-3 node with the same residual bound along two paths.
    Bounder bounder(forest, CostVector{4, 4, 1});
    const NodeId f = forest.power_set();
    const BoundResult naive = bounder.backtrack_naive(f, ExtInt(5));
    const BoundResult memo = bounder.backtrack_memo(f, ExtInt(5));
    CHECK(naive.h == memo.h);
    CHECK(memo.calls < naive.calls);
    CHECK(memo.calls == 2 * reachable_states(forest, f, ExtInt(5), bounder.costs()) + 1);
    // Second identical query: one call, straight from the memo.
    CHECK(bounder.backtrack_memo(f, ExtInt(5)).calls == 1);
}

TEST_CASE("flat memo call count is polynomial on a unit-cost power set") {
    for (std::uint32_t n : {4u, 8u, 16u, 24u}) {
        Forest forest(n);
        Bounder bounder(forest, CostVector(std::vector<std::int64_t>(n, 1)));
        const NodeId f = forest.power_set();
        const ExtInt b(n / 2);
        const BoundResult r = bounder.backtrack_memo(f, b);
        const std::size_t states = reachable_states(forest, f, b, bounder.costs());
        CHECK(states <= n * (n + 1));
        CHECK(r.calls == 2 * states + 1);
    }
}

TEST_CASE("interval memo lookup") {
    IntervalMemo memo;
    const NodeId node{7}, h{9};
    memo.insert(node, {ExtInt(245), ExtInt(265)}, h);
    const auto hit = memo.lookup(node, ExtInt(252));
    REQUIRE(hit);
    CHECK(hit->first == h);
    CHECK(hit->second == Interval{ExtInt(245), ExtInt(265)});
    CHECK(memo.lookup(node, ExtInt(245)));
    CHECK_FALSE(memo.lookup(node, ExtInt(265)));
    CHECK_FALSE(memo.lookup(node, ExtInt(175)));
    CHECK_FALSE(memo.lookup(NodeId{8}, ExtInt(252)));

    memo.insert(node, {ExtInt(153), ExtInt(230)}, NodeId{10});
    CHECK(memo.lookup(node, ExtInt(175))->first == NodeId{10});
    CHECK_FALSE(memo.lookup(node, ExtInt(240)));
    CHECK(memo.size() == 2);
}

TEST_CASE("interval memo rejects inconsistent inserts") {
    IntervalMemo memo;
    const NodeId node{7};
    memo.insert(node, {ExtInt(245), ExtInt(265)}, NodeId{9});
    CHECK_NOTHROW(memo.insert(node, {ExtInt(245), ExtInt(265)}, NodeId{9}));
    CHECK(memo.size() == 1);
    CHECK_THROWS_AS(memo.insert(node, {ExtInt(245), ExtInt(265)}, NodeId{3}), InternalError);
    CHECK_THROWS_AS(memo.insert(node, {ExtInt(250), ExtInt(300)}, NodeId{3}), InternalError);
    CHECK_THROWS_AS(memo.insert(node, {ExtInt(200), ExtInt(246)}, NodeId{3}), InternalError);
    CHECK_THROWS_AS(memo.insert(node, {ExtInt(5), ExtInt(5)}, NodeId{3}), InternalError);
    CHECK_NOTHROW(memo.insert(node, {ExtInt(265), ExtInt::pos_inf()}, NodeId{4}));
    CHECK(memo.lookup(node, ExtInt::pos_inf())->first == NodeId{4});
}

TEST_CASE("cost constraint diagrams") {
    Forest forest(3);
    Bounder bounder(forest, CostVector{3, 5, 7});
    const NodeId g = bounder.build_cost_constraint(ExtInt(3));
    CHECK(members(forest, g) == Family{{}, {1}});
    const NodeId all = bounder.build_cost_constraint(ExtInt::pos_inf());
    CHECK(all == forest.power_set());
    CHECK(forest.node_count(all) == 3);
}

TEST_CASE("unit costs give the threshold function") {
    const std::uint32_t n = 12;
    Forest forest(n);
    Bounder bounder(forest, CostVector(std::vector<std::int64_t>(n, 1)));
    BigCount binom = 1, sum = 0;
    for (std::uint32_t k = 0; k <= n; ++k) {
        sum += binom;
        CHECK(forest.count(bounder.build_cost_constraint(ExtInt(k))) == sum);
        binom = binom * (n - k) / (k + 1);
    }
}

TEST_CASE("bound via intersection") {
    Forest forest(3);
    Bounder bounder(forest, CostVector{3, 5, 7});
    const NodeId f = forest.power_set();
    CHECK(bounder.bound_via_intersection(f, ExtInt::pos_inf()) == f);
    CHECK(bounder.bound_via_intersection(f, ExtInt::neg_inf()) == Forest::kBottom);
    CHECK(bounder.bound_via_intersection(f, ExtInt(8)) == bounder.backtrack_naive(f, ExtInt(8)).h);
}

TEST_CASE("range queries") {
    Forest forest(3);
    Bounder bounder(forest, CostVector{3, 5, 7});
    const NodeId f = forest.power_set();
    CHECK(bounder.range_query(f, ExtInt(8), ExtInt(8)) == Forest::kBottom);
    CHECK(members(forest, bounder.range_query(f, ExtInt(3), ExtInt(8))) == Family{{2}, {3}, {1, 2}});
    CHECK(bounder.range_query(f, ExtInt::neg_inf(), ExtInt::pos_inf()) == f);
    CHECK_THROWS_AS(bounder.range_query(f, ExtInt(9), ExtInt(8)), ContractError);
}

TEST_CASE("rank counts solutions at or below a cost") {
    Forest forest(2);
    Bounder bounder(forest, CostVector{3, 5});
    // costs 0, 3, 8
    const NodeId f = oracle::family_to_zdd(forest, {{}, {1}, {1, 2}});
    CHECK(bounder.rank(f, ExtInt(3)) == 2);
    CHECK(bounder.rank(f, ExtInt::neg_inf()) == 0);
    CHECK(bounder.rank(f, ExtInt::pos_inf()) == forest.count(f));
}

TEST_CASE("naive call estimate is exact") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint32_t n = 1 + rng() % 10;
        Forest forest(n);
        const NodeId f = oracle::family_to_zdd(forest, oracle::random_family(rng, n, 40));
        Bounder bounder(forest, CostVector(oracle::random_costs(rng, n, -50, 50)));
        CHECK(bounder.naive_call_estimate(f) == bounder.backtrack_naive(f, random_bound(rng)).calls);
    }
}

TEST_CASE("cost overflow fails fast") {
    Forest forest(2);
    Bounder bounder(forest, CostVector{ExtInt::kMaxFinite, ExtInt::kMaxFinite});
    const NodeId f = forest.single({1, 2});
    CHECK_THROWS_AS(bounder.backtrack_interval_memo(f, ExtInt(ExtInt::kMinFinite)), OverflowError);
    CHECK_THROWS_AS(Bounder(forest, CostVector{1}), ContractError);
}

TEST_CASE("all variants agree with brute-force filtering") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 300; ++trial) {
        const std::uint32_t n = 1 + rng() % 14;
        Forest forest(n);
        const Family fam = oracle::random_family(rng, n, 80);
        const NodeId f = oracle::family_to_zdd(forest, fam);
        const auto costs = oracle::random_costs(rng, n, -50, 50);
        Bounder bounder(forest, CostVector(costs));
        Bounder fresh(forest, CostVector(costs));
        for (int q = 0; q < 4; ++q) {
            const ExtInt b = random_bound(rng);
            const NodeId expected = oracle::family_to_zdd(forest, oracle::filter_upto(fam, costs, b));
            const BoundResult naive = fresh.backtrack_naive(f, b);
            const BoundResult memo = bounder.backtrack_memo(f, b);
            const BoundResult iv = bounder.backtrack_interval_memo(f, b);
            REQUIRE(naive.h == expected);
            REQUIRE(memo.h == expected);
            REQUIRE(iv.h == expected);
            REQUIRE(bounder.bound_via_intersection(f, b) == expected);
        }
    }
}

TEST_CASE("stored intervals are sound and tight") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 60; ++trial) {
        const std::uint32_t n = 1 + rng() % 10;
        Forest forest(n);
        const NodeId f = oracle::family_to_zdd(forest, oracle::random_family(rng, n, 60));
        const auto costs = oracle::random_costs(rng, n, -50, 50);
        Bounder bounder(forest, CostVector(costs));
        for (int q = 0; q < 3; ++q) bounder.backtrack_interval_memo(f, random_bound(rng));
        Bounder check(forest, CostVector(costs));
        bounder.interval_memo().for_each([&](NodeId node, Interval iv, NodeId h) {
            REQUIRE(check.backtrack_naive(node, iv.aw).h == h);
            if (iv.aw.is_finite()) REQUIRE(check.backtrack_naive(node, iv.aw - 1).h != h);
            if (iv.rb.is_finite()) REQUIRE(check.backtrack_naive(node, iv.rb).h != h);
            if (iv.rb.is_pos_inf()) REQUIRE(check.backtrack_naive(node, ExtInt::pos_inf()).h == h);
        });
    }
}

TEST_CASE("results grow monotonically with the bound") {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint32_t n = 1 + rng() % 12;
        Forest forest(n);
        const NodeId f = oracle::family_to_zdd(forest, oracle::random_family(rng, n, 60));
        Bounder bounder(forest, CostVector(oracle::random_costs(rng, n, -50, 50)));
        ExtInt b1 = random_bound(rng), b2 = random_bound(rng);
        if (b2 < b1) std::swap(b1, b2);
        const NodeId h1 = bounder.backtrack_interval_memo(f, b1).h;
        const NodeId h2 = bounder.backtrack_interval_memo(f, b2).h;
        CHECK(forest.subtract(h1, h2) == Forest::kBottom);
    }
}

TEST_CASE("extremal bounds visit each node once") {
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint32_t n = 1 + rng() % 12;
        Forest forest(n);
        const NodeId f = oracle::family_to_zdd(forest, oracle::random_family(rng, n, 60));
        const CostVector costs(oracle::random_costs(rng, n, -50, 50));
        const CostRange range = forest.min_max_cost(f, costs);

        Bounder lo_side(forest, costs);
        const BoundResult lo = lo_side.backtrack_interval_memo(f, ExtInt::neg_inf());
        CHECK(lo.h == Forest::kBottom);
        CHECK(*lo.rb == range.min);
        CHECK(lo.calls == 2 * forest.node_count(f) + 1);

        Bounder hi_side(forest, costs);
        const BoundResult hi = hi_side.backtrack_interval_memo(f, ExtInt::pos_inf());
        CHECK(hi.h == f);
        CHECK(*hi.aw == range.max);
        CHECK(hi.calls == 2 * forest.node_count(f) + 1);
    }
}

TEST_CASE("interval calls <= flat calls <= naive calls, and memo reuse") {
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint32_t n = 1 + rng() % 12;
        Forest forest(n);
        const NodeId f = oracle::family_to_zdd(forest, oracle::random_family(rng, n, 60));
        const CostVector costs(oracle::random_costs(rng, n, -50, 50));
        const ExtInt b = random_bound(rng);
        Bounder a(forest, costs), m(forest, costs), v(forest, costs);
        const auto naive = a.backtrack_naive(f, b).calls;
        const auto flat = m.backtrack_memo(f, b).calls;
        const auto iv = v.backtrack_interval_memo(f, b).calls;
        CHECK(iv <= flat);
        CHECK(flat <= naive);
        CHECK(v.backtrack_interval_memo(f, b).calls == 1);
    }
}
