#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "ext_int.hpp"
#include "forest.hpp"
#include "graph.hpp"
#include "zdd_io.hpp"

namespace costdd {

struct Terminals {
    VertexId s;
    VertexId t;
    friend bool operator==(const Terminals&, const Terminals&) = default;
};

struct ParsedGraph {
    Graph graph;
    std::optional<Terminals> terminals;
};

/// Reads the line-oriented graph format:
///
///     c <comment>          anywhere, ignored
///     p path <V> <E>       exactly once, before any edge
///     t <s> <t>            optional
///     e <u> <v> <cost>     E lines; their order is the item order
inline ParsedGraph parse_graph(std::string_view text) {
    detail::LineReader reader(text);
    std::string_view line;
    std::optional<Graph> graph;
    std::optional<Terminals> terminals;
    std::uint32_t declared_edges = 0;
    while (reader.next(line)) {
        const std::size_t ln = reader.line_no();
        auto tok = detail::split_ws(line);
        if (tok.empty() || tok[0] == "c") continue;
        if (tok[0] == "p") {
            std::uint32_t nv = 0;
            if (graph) throw ParseError(ln, "duplicate problem line");
            if (tok.size() != 4 || tok[1] != "path" || !detail::parse_int(tok[2], nv) ||
                !detail::parse_int(tok[3], declared_edges))
                throw ParseError(ln, "expected 'p path <V> <E>'");
            graph.emplace(nv);
        } else if (tok[0] == "t") {
            if (!graph) throw ParseError(ln, "terminal line before 'p path' line");
            if (terminals) throw ParseError(ln, "duplicate terminal line");
            Terminals st{};
            if (tok.size() != 3 || !detail::parse_int(tok[1], st.s) || !detail::parse_int(tok[2], st.t))
                throw ParseError(ln, "expected 't <s> <t>'");
            if (st.s == 0 || st.s > graph->n_vertices() || st.t == 0 || st.t > graph->n_vertices())
                throw ParseError(ln, "terminal vertex out of range");
            if (st.s == st.t) throw ParseError(ln, "terminals must differ");
            terminals = st;
        } else if (tok[0] == "e") {
            if (!graph) throw ParseError(ln, "edge line before 'p path' line");
            VertexId u = 0, v = 0;
            std::int64_t cost = 0;
            if (tok.size() != 4 || !detail::parse_int(tok[1], u) || !detail::parse_int(tok[2], v) ||
                !detail::parse_int(tok[3], cost))
                throw ParseError(ln, "expected 'e <u> <v> <cost>'");
            if (graph->n_edges() == declared_edges)
                throw ParseError(ln, "more edge lines than the declared " + std::to_string(declared_edges));
            try {
                graph->add_edge(u, v, cost);
            } catch (const ContractError& e) {
                throw ParseError(ln, e.what());
            }
        } else {
            throw ParseError(ln, "unknown line type '" + std::string(tok[0]) + "'");
        }
    }
    if (!graph) throw ParseError(0, "missing 'p path <V> <E>' line");
    if (graph->n_edges() != declared_edges)
        throw ParseError(reader.line_no(), "header declares " + std::to_string(declared_edges) + " edges but only " +
                                               std::to_string(graph->n_edges()) + " edge lines follow");
    return {std::move(*graph), terminals};
}

inline std::string write_graph(const Graph& g, std::optional<Terminals> terminals = std::nullopt) {
    std::ostringstream os;
    os << "p path " << g.n_vertices() << ' ' << g.n_edges() << '\n';
    if (terminals) os << "t " << terminals->s << ' ' << terminals->t << '\n';
    for (const Edge& e : g.edges()) os << "e " << e.u << ' ' << e.v << ' ' << e.cost << '\n';
    return os.str();
}

/// One row of a bound experiment.
struct RunReport {
    std::string method;
    ExtInt bound;
    std::optional<double> ratio; // bound / minimum cost
    BigCount solutions;
    std::uint64_t zdd_size = 0;
    std::uint64_t calls = 0;
    double time_ms = 0.0;
    std::optional<ExtInt> aw;
    std::optional<ExtInt> rb;
};

namespace detail {

inline nlohmann::ordered_json ext_to_json(ExtInt x) {
    if (x.is_finite()) return x.value();
    return x.to_string();
}

inline ExtInt ext_from_json(const nlohmann::ordered_json& j) {
    if (j.is_string()) {
        auto v = ExtInt::parse(j.get<std::string>());
        if (!v) throw ParseError(0, "bad extended integer '" + j.get<std::string>() + "'");
        return *v;
    }
    return ExtInt(j.get<std::int64_t>());
}

} // namespace detail

/// Single-line JSON object with a fixed field order. Counts are decimal
/// strings so they survive readers that parse numbers as doubles.
inline std::string report_line(const RunReport& r) {
    nlohmann::ordered_json j;
    j["method"] = r.method;
    j["bound"] = detail::ext_to_json(r.bound);
    j["ratio"] = r.ratio ? nlohmann::ordered_json(std::round(*r.ratio * 1000.0) / 1000.0) : nlohmann::ordered_json(nullptr);
    j["solutions"] = r.solutions.str();
    j["zdd_size"] = r.zdd_size;
    j["calls"] = r.calls;
    j["time_ms"] = std::round(r.time_ms * 1000.0) / 1000.0;
    j["aw"] = r.aw ? detail::ext_to_json(*r.aw) : nlohmann::ordered_json(nullptr);
    j["rb"] = r.rb ? detail::ext_to_json(*r.rb) : nlohmann::ordered_json(nullptr);
    return j.dump();
}

inline std::string write_report(const std::vector<RunReport>& rows) {
    std::string out;
    for (const RunReport& r : rows) {
        out += report_line(r);
        out += '\n';
    }
    return out;
}

inline std::vector<RunReport> parse_report(std::string_view text) {
    std::vector<RunReport> rows;
    detail::LineReader reader(text);
    std::string_view line;
    while (reader.next(line)) {
        if (detail::split_ws(line).empty()) continue;
        try {
            const auto j = nlohmann::ordered_json::parse(line);
            RunReport r;
            r.method = j.at("method").get<std::string>();
            r.bound = detail::ext_from_json(j.at("bound"));
            if (!j.at("ratio").is_null()) r.ratio = j.at("ratio").get<double>();
            r.solutions = BigCount(j.at("solutions").get<std::string>());
            r.zdd_size = j.at("zdd_size").get<std::uint64_t>();
            r.calls = j.at("calls").get<std::uint64_t>();
            r.time_ms = j.at("time_ms").get<double>();
            if (!j.at("aw").is_null()) r.aw = detail::ext_from_json(j.at("aw"));
            if (!j.at("rb").is_null()) r.rb = detail::ext_from_json(j.at("rb"));
            rows.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(reader.line_no(), e.what());
        }
    }
    return rows;
}

} // namespace costdd
