#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "costdd/costdd.hpp"

namespace costdd::cli {

/// Bad flags or missing input files. Exit status 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << text;
    if (!out) throw UsageError("write failed for '" + path + "'");
}

inline ExtInt parse_bound(const std::string& s) {
    auto b = ExtInt::parse(s);
    if (!b) throw UsageError("bad bound '" + s + "' (integer, -inf or +inf)");
    return *b;
}

/// Decimal ratio such as "1.05" held exactly as num / den.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;
    std::string text;

    static Ratio parse(const std::string& s) {
        Ratio r{0, 1, s};
        bool dot = false, digit = false;
        for (char ch : s) {
            if (ch == '.' && !dot) {
                dot = true;
                continue;
            }
            if (ch < '0' || ch > '9') throw UsageError("bad ratio '" + s + "'");
            digit = true;
            if (r.num > (std::int64_t{1} << 50) || r.den > (std::int64_t{1} << 50))
                throw UsageError("ratio '" + s + "' has too many digits");
            r.num = r.num * 10 + (ch - '0');
            if (dot) r.den *= 10;
        }
        if (!digit) throw UsageError("bad ratio '" + s + "'");
        return r;
    }

    /// floor(base * num / den)
    ExtInt apply(std::int64_t base) const {
        const __int128 p = static_cast<__int128>(base) * num;
        __int128 q = p / den;
        if (p % den != 0 && p < 0) --q;
        if (q <= ExtInt::kMinFinite || q >= ExtInt::kMaxFinite) throw OverflowError("ratio bound overflow");
        return ExtInt(static_cast<std::int64_t>(q));
    }
};

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (ch != ' ') {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline PathKind parse_kind(const std::string& s) {
    if (s == "simple") return PathKind::kSimple;
    if (s == "hamiltonian") return PathKind::kHamiltonian;
    throw UsageError("unknown kind '" + s + "' (simple or hamiltonian)");
}

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// A loaded or freshly built feasible-solution diagram with its costs.
struct Instance {
    Graph graph;
    std::optional<Terminals> terminals;
    std::unique_ptr<Forest> forest;
    NodeId f;
};

struct InstanceFlags {
    std::string graph_path;
    std::string zdd_path;
    std::string kind;
    std::uint32_t source = 0;
    std::uint32_t target = 0;
    std::uint64_t max_nodes = 0;
};

inline Terminals pick_terminals(const InstanceFlags& fl, const std::optional<Terminals>& from_file, const Graph& g) {
    Terminals st{};
    if (from_file) st = *from_file;
    if (fl.source) st.s = fl.source;
    if (fl.target) st.t = fl.target;
    if (st.s == 0 || st.t == 0) {
        if (from_file || fl.source || fl.target) throw UsageError("both --source and --target are needed");
        st = {1, g.n_vertices()};
    }
    if (st.s > g.n_vertices() || st.t > g.n_vertices()) throw UsageError("terminal vertex out of range");
    if (st.s == st.t) throw UsageError("source and target must differ");
    return st;
}

inline ForestOptions forest_options(const InstanceFlags& fl) {
    ForestOptions o;
    if (fl.max_nodes) o.max_nodes = fl.max_nodes;
    return o;
}

/// Reads the graph, then either loads --zdd or builds the path diagram of
/// --kind between the terminals.
inline Instance load_instance(const InstanceFlags& fl) {
    if (fl.graph_path.empty()) throw UsageError("--graph is required");
    ParsedGraph pg = parse_graph(read_file(fl.graph_path));
    Instance in{std::move(pg.graph), pg.terminals, nullptr, Forest::kBottom};
    in.forest = std::make_unique<Forest>(in.graph.n_edges(), forest_options(fl));
    if (!fl.zdd_path.empty()) {
        const std::string text = read_file(fl.zdd_path);
        if (zdd_header_items(text) != in.graph.n_edges())
            throw UsageError("diagram and graph disagree on the item count");
        in.f = deserialize(text, *in.forest);
    } else {
        if (fl.kind.empty()) throw UsageError("give --zdd or --kind");
        const Terminals st = pick_terminals(fl, in.terminals, in.graph);
        in.f = build_path_zdd(*in.forest, in.graph, st.s, st.t, parse_kind(fl.kind));
    }
    return in;
}

inline std::optional<double> ratio_of(ExtInt bound, const CostRange& range) {
    if (!bound.is_finite() || !range.min.is_finite() || range.min.value() <= 0) return std::nullopt;
    return static_cast<double>(bound.value()) / static_cast<double>(range.min.value());
}

inline const std::vector<std::string> kMethods{"naive", "memo", "interval", "intersection"};

struct BoundOutcome {
    NodeId h;
    RunReport report;
};

/// Runs one bound query with `method` and fills everything in the report
/// except time_ms.
inline BoundOutcome run_bound(Bounder& bounder, NodeId f, ExtInt b, const std::string& method,
                              std::uint64_t naive_limit) {
    RunReport rep;
    rep.method = method;
    rep.bound = b;
    NodeId h;
    if (method == "naive") {
        const BigCount est = bounder.naive_call_estimate(f);
        if (est > naive_limit)
            throw ContractError("naive method refused: " + est.str() + " calls needed, limit " +
                                std::to_string(naive_limit) + " (raise --naive-limit)");
        BoundResult r = bounder.backtrack_naive(f, b);
        h = r.h;
        rep.calls = r.calls;
    } else if (method == "memo") {
        BoundResult r = bounder.backtrack_memo(f, b);
        h = r.h;
        rep.calls = r.calls;
    } else if (method == "interval") {
        BoundResult r = bounder.backtrack_interval_memo(f, b);
        h = r.h;
        rep.calls = r.calls;
        rep.aw = r.aw;
        rep.rb = r.rb;
    } else if (method == "intersection") {
        const std::uint64_t before = bounder.total_calls();
        h = bounder.bound_via_intersection(f, b);
        rep.calls = bounder.total_calls() - before;
    } else {
        throw UsageError("unknown method '" + method + "'");
    }
    rep.solutions = bounder.forest().count(h);
    rep.zdd_size = bounder.forest().node_count(h);
    return {h, std::move(rep)};
}

struct Preset {
    std::string name;
    PathKind kind;
    std::uint32_t grid_n; // 0 for the external map instances
    std::vector<std::string> ratios;
    std::vector<std::string> methods;
};

/// Benchmark scaffolding: grid sizes, path kinds and the
/// ratio rows of each table. The final maximum-cost row is always added.
inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> kPresets{
        {"us48-ham", PathKind::kHamiltonian, 0,
         {"1.00", "1.01", "1.02", "1.05", "1.10", "1.20", "1.30", "1.40", "1.50"}, {"interval", "memo"}},
        {"us48-simple", PathKind::kSimple, 0,
         {"1.00", "1.10", "1.20", "1.50", "2.00", "2.50", "3.00", "3.50", "4.00", "4.50"}, {"interval", "memo"}},
        {"grid8-ham", PathKind::kHamiltonian, 8,
         {"1.00", "1.01", "1.02", "1.03", "1.05", "1.08", "1.10", "1.12"}, {"interval", "memo"}},
        {"grid10-ham", PathKind::kHamiltonian, 10,
         {"1.00", "1.01", "1.02", "1.03", "1.05", "1.08", "1.10", "1.12", "1.15"}, {"interval"}},
        {"grid6-simple", PathKind::kSimple, 6,
         {"1.00", "1.10", "1.20", "1.50", "2.00", "2.50", "3.00", "3.50", "4.00", "4.50"}, {"interval", "memo"}},
        {"grid7-simple", PathKind::kSimple, 7,
         {"1.00", "1.11", "1.20", "1.50", "2.00", "2.50", "3.00", "3.50", "4.00", "4.50", "5.00", "5.50"},
         {"interval"}},
    };
    return kPresets;
}

inline const Preset& find_preset(const std::string& name) {
    for (const Preset& p : presets())
        if (p.name == name) return p;
    throw UsageError("unknown preset '" + name + "'");
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cost-bounded enumeration over zero-suppressed decision diagrams", "costdd"};
    app.require_subcommand(1);

    // gen grid
    struct {
        std::uint32_t n = 0;
        std::int64_t lo = 1000, hi = 1999;
        std::uint64_t seed = 1;
        std::string output;
    } gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Generate an instance");
    gen_cmd->require_subcommand(1);
    CLI::App* gen_grid = gen_cmd->add_subcommand("grid", "n x n grid, terminals at opposite corners");
    gen_grid->add_option("--n", gen.n, "Cells per side")->required()->check(CLI::Range(1u, 200u));
    gen_grid->add_option("--cost-lo", gen.lo, "Lowest edge cost");
    gen_grid->add_option("--cost-hi", gen.hi, "Highest edge cost");
    gen_grid->add_option("--seed", gen.seed, "Cost generator seed");
    gen_grid->add_option("-o,--output", gen.output, "Graph file to write")->required();

    InstanceFlags inst;
    auto add_instance_flags = [&](CLI::App* cmd, bool zdd_allowed, bool kind_allowed) {
        cmd->add_option("--graph", inst.graph_path, "Graph file (edge order = item order)")->required();
        if (zdd_allowed) cmd->add_option("--zdd", inst.zdd_path, "Feasible-solution diagram");
        if (kind_allowed) {
            cmd->add_option("--kind", inst.kind, "simple or hamiltonian")
                ->check(CLI::IsMember({"simple", "hamiltonian"}));
            cmd->add_option("--source", inst.source, "Path source vertex");
            cmd->add_option("--target", inst.target, "Path target vertex");
        }
        cmd->add_option("--max-nodes", inst.max_nodes, "Node table ceiling");
    };

    // build
    std::string build_out, graph_out;
    bool bfs_order = false;
    CLI::App* build_cmd = app.add_subcommand("build", "Construct the path diagram of a graph");
    add_instance_flags(build_cmd, false, true);
    build_cmd->get_option("--kind")->required();
    build_cmd->add_flag("--bfs-order", bfs_order, "Re-sort edges breadth-first from the source first");
    build_cmd->add_option("--graph-out", graph_out, "Where to write the re-sorted graph (with --bfs-order)");
    build_cmd->add_option("-o,--output", build_out, "Diagram file to write");

    // bound
    std::string bound_text, method = "interval", bound_out;
    std::uint64_t naive_limit = 100'000'000;
    CLI::App* bound_cmd = app.add_subcommand("bound", "Filter a diagram by a cost bound");
    add_instance_flags(bound_cmd, true, true);
    bound_cmd->add_option("-b,--bound", bound_text, "Cost bound (integer, -inf, +inf)")->required();
    bound_cmd->add_option("--method", method, "naive, memo, interval or intersection")
        ->check(CLI::IsMember(kMethods));
    bound_cmd->add_option("-o,--output", bound_out, "Write the filtered diagram here");
    bound_cmd->add_option("--naive-limit", naive_limit, "Largest call count the naive method may spend");

    // sweep
    std::string ratios_text, bounds_text;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Several bounds on one persistent memo");
    add_instance_flags(sweep_cmd, true, true);
    sweep_cmd->add_option("--ratios", ratios_text, "Bounds as multiples of the minimum cost, e.g. 1.00,1.05");
    sweep_cmd->add_option("--bounds", bounds_text, "Absolute bounds, comma separated");
    sweep_cmd->add_option("--method", method, "naive, memo, interval or intersection")
        ->check(CLI::IsMember(kMethods));
    sweep_cmd->add_option("--naive-limit", naive_limit, "Largest call count the naive method may spend");

    // count
    std::string count_zdd;
    CLI::App* count_cmd = app.add_subcommand("count", "Count the members of a diagram");
    count_cmd->add_option("--zdd", count_zdd, "Diagram file")->required();

    // minmax
    CLI::App* minmax_cmd = app.add_subcommand("minmax", "Minimum and maximum solution cost");
    add_instance_flags(minmax_cmd, true, true);

    // sample
    std::size_t sample_k = 1;
    std::uint64_t sample_seed = 1;
    CLI::App* sample_cmd = app.add_subcommand("sample", "Uniform random members of a diagram");
    sample_cmd->add_option("--zdd", count_zdd, "Diagram file")->required();
    sample_cmd->add_option("-k", sample_k, "Number of draws");
    sample_cmd->add_option("--seed", sample_seed, "Random seed");

    // rank
    std::string rank_cost;
    CLI::App* rank_cmd = app.add_subcommand("rank", "How many solutions cost at most C");
    add_instance_flags(rank_cmd, true, true);
    rank_cmd->add_option("--cost", rank_cost, "Observed cost C")->required();

    // bench
    std::string preset_name, us_graph, bench_methods;
    std::uint64_t bench_seed = 1;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Table of bound rows for a named preset");
    bench_cmd->add_option("--preset", preset_name, "Preset name")->required();
    bench_cmd->add_option("--us-graph", us_graph, "Map graph file for the us48 presets");
    bench_cmd->add_option("--seed", bench_seed, "Cost seed for grid presets");
    bench_cmd->add_option("--ratios", ratios_text, "Override the preset's ratio rows");
    bench_cmd->add_option("--methods", bench_methods, "Override the preset's methods");
    bench_cmd->add_option("--naive-limit", naive_limit, "Largest call count the naive method may spend");
    bench_cmd->add_option("--max-nodes", inst.max_nodes, "Node table ceiling");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen_grid->parsed()) {
            if (gen.lo > gen.hi) throw UsageError("--cost-lo exceeds --cost-hi");
            const Graph g = grid_graph(gen.n, gen.lo, gen.hi, gen.seed);
            std::ostringstream text;
            text << "c grid " << gen.n << "x" << gen.n << " costs [" << gen.lo << ", " << gen.hi << "] seed "
                 << gen.seed << '\n'
                 << write_graph(g, Terminals{1, g.n_vertices()});
            write_file(gen.output, text.str());
            nlohmann::ordered_json j;
            j["vertices"] = g.n_vertices();
            j["edges"] = g.n_edges();
            j["frontier_width"] = frontier_width(g);
            out << j.dump() << '\n';
        } else if (build_cmd->parsed()) {
            if (bfs_order && graph_out.empty())
                throw UsageError("--bfs-order changes item numbering; give --graph-out for the re-sorted graph");
            const auto t0 = Clock::now();
            ParsedGraph pg = parse_graph(read_file(inst.graph_path));
            const Terminals st = pick_terminals(inst, pg.terminals, pg.graph);
            Graph g = bfs_order ? bfs_edge_order(pg.graph, st.s) : std::move(pg.graph);
            Forest forest(g.n_edges(), forest_options(inst));
            const NodeId f = build_path_zdd(forest, g, st.s, st.t, parse_kind(inst.kind));
            const BigCount& total = forest.count(f);
            const double ms = ms_since(t0);
            if (!graph_out.empty()) write_file(graph_out, write_graph(g, st));
            if (!build_out.empty()) write_file(build_out, serialize(forest, f));
            nlohmann::ordered_json j;
            j["kind"] = inst.kind;
            j["zdd_size"] = forest.node_count(f);
            j["solutions"] = total.str();
            j["frontier_width"] = frontier_width(g);
            j["time_ms"] = std::round(ms * 1000.0) / 1000.0;
            out << j.dump() << '\n';
        } else if (bound_cmd->parsed()) {
            const ExtInt b = parse_bound(bound_text);
            const auto t0 = Clock::now();
            Instance in = load_instance(inst);
            Bounder bounder(*in.forest, in.graph.costs());
            BoundOutcome o = run_bound(bounder, in.f, b, method, naive_limit);
            o.report.time_ms = ms_since(t0);
            o.report.ratio = ratio_of(b, in.forest->min_max_cost(in.f, bounder.costs()));
            if (!bound_out.empty()) write_file(bound_out, serialize(*in.forest, o.h));
            out << report_line(o.report) << '\n';
        } else if (sweep_cmd->parsed()) {
            if (ratios_text.empty() == bounds_text.empty()) throw UsageError("give exactly one of --ratios or --bounds");
            std::vector<Ratio> ratios;
            std::vector<ExtInt> bounds;
            for (const std::string& s : split_list(ratios_text)) ratios.push_back(Ratio::parse(s));
            for (const std::string& s : split_list(bounds_text)) bounds.push_back(parse_bound(s));
            Instance in = load_instance(inst);
            Bounder bounder(*in.forest, in.graph.costs());
            const CostRange range = in.forest->min_max_cost(in.f, bounder.costs());
            if (!ratios.empty()) {
                if (!range.min.is_finite()) throw ContractError("ratios need a finite minimum cost (empty family)");
                for (const Ratio& r : ratios) bounds.push_back(r.apply(range.min.value()));
            }
            for (ExtInt b : bounds) {
                const auto t0 = Clock::now();
                BoundOutcome o = run_bound(bounder, in.f, b, method, naive_limit);
                o.report.time_ms = ms_since(t0);
                o.report.ratio = ratio_of(b, range);
                out << report_line(o.report) << '\n';
            }
        } else if (count_cmd->parsed()) {
            const std::string text = read_file(count_zdd);
            Forest forest(zdd_header_items(text));
            const NodeId f = deserialize(text, forest);
            nlohmann::ordered_json j;
            j["solutions"] = forest.count(f).str();
            j["zdd_size"] = forest.node_count(f);
            out << j.dump() << '\n';
        } else if (minmax_cmd->parsed()) {
            Instance in = load_instance(inst);
            const CostRange r = in.forest->min_max_cost(in.f, in.graph.costs());
            nlohmann::ordered_json j;
            j["min"] = detail::ext_to_json(r.min);
            j["max"] = detail::ext_to_json(r.max);
            out << j.dump() << '\n';
        } else if (sample_cmd->parsed()) {
            const std::string text = read_file(count_zdd);
            Forest forest(zdd_header_items(text));
            const NodeId f = deserialize(text, forest);
            for (const ItemSet& x : forest.sample(f, sample_k, sample_seed)) out << nlohmann::json(x).dump() << '\n';
        } else if (rank_cmd->parsed()) {
            const ExtInt c = parse_bound(rank_cost);
            Instance in = load_instance(inst);
            Bounder bounder(*in.forest, in.graph.costs());
            nlohmann::ordered_json j;
            j["cost"] = detail::ext_to_json(c);
            j["rank"] = bounder.rank(in.f, c).str();
            j["solutions"] = in.forest->count(in.f).str();
            out << j.dump() << '\n';
        } else if (bench_cmd->parsed()) {
            const Preset& p = find_preset(preset_name);
            std::vector<Ratio> ratios;
            for (const std::string& s : ratios_text.empty() ? p.ratios : split_list(ratios_text))
                ratios.push_back(Ratio::parse(s));
            const std::vector<std::string> methods = bench_methods.empty() ? p.methods : split_list(bench_methods);
            for (const std::string& m : methods)
                if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end())
                    throw UsageError("unknown method '" + m + "'");

            Graph g;
            Terminals st{};
            if (p.grid_n == 0) {
                if (us_graph.empty()) throw UsageError("preset " + p.name + " needs --us-graph");
                ParsedGraph pg = parse_graph(read_file(us_graph));
                if (!pg.terminals) throw UsageError("map graph file needs a 't <s> <t>' line");
                g = std::move(pg.graph);
                st = *pg.terminals;
            } else {
                g = grid_graph(p.grid_n, 1000, 1999, bench_seed);
                st = {1, g.n_vertices()};
            }
            const CostVector costs = g.costs();
            // Each row starts from scratch: construction, bounding and
            // counting are all inside the timed region.
            auto run_row = [&](const std::string& m, std::optional<Ratio> ratio) {
                const auto t0 = Clock::now();
                Forest forest(g.n_edges(), forest_options(inst));
                const NodeId f = build_path_zdd(forest, g, st.s, st.t, p.kind);
                const CostRange range = forest.min_max_cost(f, costs);
                if (!range.min.is_finite()) throw ContractError("preset instance has no feasible path");
                const ExtInt b = ratio ? ratio->apply(range.min.value()) : range.max;
                Bounder bounder(forest, costs);
                BoundOutcome o = run_bound(bounder, f, b, m, naive_limit);
                o.report.time_ms = ms_since(t0);
                o.report.ratio = ratio_of(b, range);
                out << report_line(o.report) << std::endl;
            };
            for (const Ratio& r : ratios)
                for (const std::string& m : methods) run_row(m, r);
            for (const std::string& m : methods) run_row(m, std::nullopt);
        }
    } catch (const UsageError& e) {
        err << "costdd: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "costdd: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

} // namespace costdd::cli
