#include "stlam/stp.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "stlam/error.hpp"
#include "text_util.hpp"

namespace stlam {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct Line {
    int number = 0;
    std::vector<std::string> tokens;
};

// Tokenized non-empty lines with '#' comments stripped.
std::vector<Line> tokenize(std::istream& in) {
    std::vector<Line> lines;
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        Line line;
        line.number = number;
        std::istringstream ss(raw);
        std::string tok;
        while (ss >> tok) line.tokens.push_back(tok);
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw Error("stp line " + std::to_string(line) + ": " + msg);
}

long long require_count(const Line& line, const std::string& what) {
    if (line.tokens.size() != 2) fail(line.number, "expected '" + what + " <count>'");
    long long v = 0;
    if (!detail::parse_int(line.tokens[1], v) || v < 0)
        fail(line.number, "bad " + what + " count '" + line.tokens[1] + "'");
    return v;
}

}  // namespace

Instance parse_stp(std::istream& in) {
    const std::vector<Line> lines = tokenize(in);
    size_t pos = 0;

    // SteinLib files open with a magic line; tolerate it, nothing else.
    if (pos < lines.size()) {
        const std::string head = lower(lines[pos].tokens[0]);
        if (head != "section" && head != "eof") {
            std::string joined;
            for (const auto& t : lines[pos].tokens) joined += lower(t);
            if (joined.find("stp") == std::string::npos)
                fail(lines[pos].number, "expected SECTION header");
            ++pos;
        }
    }

    long long node_count = -1;
    std::vector<Edge> edges;
    std::vector<int> terminals;
    bool saw_graph = false, saw_terminals = false, saw_eof = false;

    while (pos < lines.size()) {
        const Line& line = lines[pos];
        const std::string head = lower(line.tokens[0]);
        if (head == "eof") {
            saw_eof = true;
            break;
        }
        if (head != "section" || line.tokens.size() < 2)
            fail(line.number, "expected SECTION header");
        const std::string name = lower(line.tokens[1]);
        ++pos;

        if (name == "graph") {
            if (saw_graph) fail(line.number, "duplicate Graph section");
            saw_graph = true;
            if (pos >= lines.size() || lower(lines[pos].tokens[0]) != "nodes")
                fail(pos < lines.size() ? lines[pos].number : line.number, "expected 'Nodes <n>'");
            node_count = require_count(lines[pos], "node");
            if (node_count < 1) fail(lines[pos].number, "node count must be positive");
            ++pos;
            if (pos >= lines.size() || lower(lines[pos].tokens[0]) != "edges")
                fail(pos < lines.size() ? lines[pos].number : line.number, "expected 'Edges <m>'");
            const long long edge_count = require_count(lines[pos], "edge");
            ++pos;
            while (pos < lines.size() && lower(lines[pos].tokens[0]) == "e") {
                const Line& el = lines[pos];
                if (static_cast<long long>(edges.size()) == edge_count)
                    fail(el.number, "more edge lines than declared");
                if (el.tokens.size() != 4) fail(el.number, "expected 'E <u> <v> <cost>'");
                long long u = 0, v = 0;
                double c = 0.0;
                if (!detail::parse_int(el.tokens[1], u) || !detail::parse_int(el.tokens[2], v))
                    fail(el.number, "bad edge endpoint");
                if (u < 1 || u > node_count || v < 1 || v > node_count)
                    fail(el.number, "edge endpoint out of range");
                if (u == v) fail(el.number, "self-loop");
                if (!detail::parse_double(el.tokens[3], c)) fail(el.number, "bad edge cost");
                if (c < 0.0) fail(el.number, "negative edge cost");
                edges.push_back(Edge{static_cast<int>(u) - 1, static_cast<int>(v) - 1, c});
                ++pos;
            }
            if (pos >= lines.size() || lower(lines[pos].tokens[0]) != "end")
                fail(pos < lines.size() ? lines[pos].number : line.number,
                     "unexpected keyword in Graph section");
            if (static_cast<long long>(edges.size()) != edge_count)
                fail(lines[pos].number, "declared " + std::to_string(edge_count) + " edges, found " +
                                            std::to_string(edges.size()));
            ++pos;
        } else if (name == "terminals") {
            if (saw_terminals) fail(line.number, "duplicate Terminals section");
            if (!saw_graph) fail(line.number, "Terminals section before Graph section");
            saw_terminals = true;
            if (pos >= lines.size() || lower(lines[pos].tokens[0]) != "terminals")
                fail(pos < lines.size() ? lines[pos].number : line.number,
                     "expected 'Terminals <t>'");
            const long long term_count = require_count(lines[pos], "terminal");
            ++pos;
            while (pos < lines.size() && lower(lines[pos].tokens[0]) == "t") {
                const Line& tl = lines[pos];
                if (static_cast<long long>(terminals.size()) == term_count)
                    fail(tl.number, "more terminal lines than declared");
                if (tl.tokens.size() != 2) fail(tl.number, "expected 'T <v>'");
                long long v = 0;
                if (!detail::parse_int(tl.tokens[1], v)) fail(tl.number, "bad terminal id");
                if (v < 1 || v > node_count) fail(tl.number, "terminal id out of range");
                terminals.push_back(static_cast<int>(v) - 1);
                ++pos;
            }
            if (pos >= lines.size() || lower(lines[pos].tokens[0]) != "end")
                fail(pos < lines.size() ? lines[pos].number : line.number,
                     "unexpected keyword in Terminals section");
            if (static_cast<long long>(terminals.size()) != term_count)
                fail(lines[pos].number, "declared " + std::to_string(term_count) +
                                            " terminals, found " + std::to_string(terminals.size()));
            ++pos;
        } else {
            // Comment, Coordinates, ... : skip to the matching END.
            while (pos < lines.size() && lower(lines[pos].tokens[0]) != "end") ++pos;
            if (pos >= lines.size()) fail(line.number, "unterminated section");
            ++pos;
        }
    }

    if (!saw_eof) throw Error("stp: missing EOF marker");
    if (!saw_graph) throw Error("stp: missing Graph section");
    if (!saw_terminals) throw Error("stp: missing Terminals section");
    return Instance(static_cast<int>(node_count), std::move(edges), std::move(terminals));
}

Instance parse_stp(const std::string& text) {
    std::istringstream in(text);
    return parse_stp(in);
}

Instance load_stp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return parse_stp(in);
}

std::string write_stp(const Instance& g) {
    std::ostringstream out;
    out << "SECTION Graph\n";
    out << "Nodes " << g.node_count() << "\n";
    out << "Edges " << g.edge_count() << "\n";
    for (const Edge& e : g.edges())
        out << "E " << e.u + 1 << " " << e.v + 1 << " " << detail::format_number(e.cost) << "\n";
    out << "END\n\n";
    out << "SECTION Terminals\n";
    out << "Terminals " << g.terminals().size() << "\n";
    for (int t : g.terminals()) out << "T " << t + 1 << "\n";
    out << "END\n\nEOF\n";
    return out.str();
}

}  // namespace stlam
