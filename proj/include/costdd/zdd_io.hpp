#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "forest.hpp"

namespace costdd {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

/// Iterates lines, tracking 1-based line numbers.
class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    bool next(std::string_view& line) {
        if (pos_ >= text_.size()) return false;
        std::size_t end = text_.find('\n', pos_);
        if (end == std::string_view::npos) end = text_.size();
        line = text_.substr(pos_, end - pos_);
        pos_ = end + 1;
        ++line_no_;
        return true;
    }
    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

} // namespace detail

/// Text form:
///
///     zdd <n_items> <n_nodes> <root_id>
///     <id> <var> <lo_id> <hi_id>        one line per non-terminal
///
/// Ids 0 and 1 are the terminals; node lines use 2, 3, ... with children
/// listed before parents.
inline std::string serialize(const Forest& forest, NodeId f) {
    if (!forest.valid(f)) throw ContractError("serialize: invalid handle");
    std::vector<std::uint64_t> ids;
    std::vector<std::uint64_t> stack;
    std::unordered_map<std::uint64_t, std::uint64_t> local;
    if (!f.is_terminal()) stack.push_back(f.id);
    while (!stack.empty()) {
        std::uint64_t id = stack.back();
        stack.pop_back();
        if (!local.emplace(id, 0).second) continue;
        ids.push_back(id);
        for (NodeId c : {forest.lo(NodeId{id}), forest.hi(NodeId{id})})
            if (!c.is_terminal() && !local.contains(c.id)) stack.push_back(c.id);
    }
    // Forest ids are already children-first.
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) local[ids[i]] = i + 2;
    auto out_id = [&](NodeId g) { return g.is_terminal() ? g.id : local.at(g.id); };

    std::ostringstream os;
    os << "zdd " << forest.n_items() << ' ' << ids.size() << ' ' << out_id(f) << '\n';
    for (std::uint64_t id : ids) {
        const NodeId g{id};
        os << local[id] << ' ' << forest.var(g) << ' ' << out_id(forest.lo(g)) << ' ' << out_id(forest.hi(g))
           << '\n';
    }
    return os.str();
}

/// Item count declared in a serialized diagram's header.
inline std::uint32_t zdd_header_items(std::string_view text) {
    detail::LineReader reader(text);
    std::string_view line;
    while (reader.next(line)) {
        auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        std::uint32_t n = 0;
        if (tok.size() != 4 || tok[0] != "zdd" || !detail::parse_int(tok[1], n))
            throw ParseError(reader.line_no(), "expected header 'zdd <n_items> <n_nodes> <root_id>'");
        return n;
    }
    throw ParseError(0, "empty ZDD document");
}

/// Rebuilds a serialized diagram inside `forest` through make_node, so the
/// result is canonical and shares nodes with whatever the forest holds.
inline NodeId deserialize(std::string_view text, Forest& forest) {
    detail::LineReader reader(text);
    std::string_view line;
    bool have_header = false;
    std::uint64_t n_nodes = 0, root = 0, seen_nodes = 0;
    std::unordered_map<std::uint64_t, NodeId> id_map;
    auto resolve = [&](std::uint64_t id, std::size_t line_no) -> NodeId {
        if (id < 2) return NodeId{id};
        auto it = id_map.find(id);
        if (it == id_map.end()) throw ParseError(line_no, "dangling child id " + std::to_string(id));
        return it->second;
    };
    while (reader.next(line)) {
        auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        const std::size_t ln = reader.line_no();
        if (!have_header) {
            std::uint32_t n = 0;
            if (tok.size() != 4 || tok[0] != "zdd" || !detail::parse_int(tok[1], n) ||
                !detail::parse_int(tok[2], n_nodes) || !detail::parse_int(tok[3], root))
                throw ParseError(ln, "expected header 'zdd <n_items> <n_nodes> <root_id>'");
            if (n != forest.n_items())
                throw ParseError(ln, "diagram has " + std::to_string(n) + " items, forest has " +
                                         std::to_string(forest.n_items()));
            have_header = true;
            continue;
        }
        std::uint64_t id = 0, lo = 0, hi = 0;
        std::uint32_t v = 0;
        if (tok.size() != 4 || !detail::parse_int(tok[0], id) || !detail::parse_int(tok[1], v) ||
            !detail::parse_int(tok[2], lo) || !detail::parse_int(tok[3], hi))
            throw ParseError(ln, "expected node line '<id> <var> <lo> <hi>'");
        if (id < 2) throw ParseError(ln, "node ids start at 2");
        if (id_map.contains(id)) throw ParseError(ln, "duplicate node id " + std::to_string(id));
        if (v == 0 || v > forest.n_items()) throw ParseError(ln, "item " + std::to_string(v) + " out of range");
        if (hi == 0) throw ParseError(ln, "1-edge points to the 0-terminal");
        const NodeId lo_node = resolve(lo, ln);
        const NodeId hi_node = resolve(hi, ln);
        if (v >= forest.var(lo_node) || v >= forest.var(hi_node))
            throw ParseError(ln, "ordering violation: item " + std::to_string(v) + " must precede its children");
        id_map.emplace(id, forest.make_node(v, lo_node, hi_node));
        ++seen_nodes;
    }
    if (!have_header) throw ParseError(0, "empty ZDD document");
    if (seen_nodes != n_nodes)
        throw ParseError(reader.line_no(), "header declares " + std::to_string(n_nodes) + " nodes, found " +
                                               std::to_string(seen_nodes));
    return resolve(root, reader.line_no());
}

} // namespace costdd
