#include "cldforge/dot.hpp"
#include "cldforge/loops.hpp"

#include <cctype>

namespace cldforge {

namespace {

std::string quote(std::string_view name) {
    std::string out = "\"";
    for (char c : name) {
        if (c == '"') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string_view arrowhead(Polarity p) { return p == Polarity::Positive ? "vee" : "tee"; }

bool is_ident_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '.' || u >= 0x80;
}

bool keyword_at(std::string_view text, std::size_t i) {
    constexpr std::string_view kw = "digraph";
    if (i + kw.size() > text.size()) return false;
    for (std::size_t k = 0; k < kw.size(); ++k)
        if (std::tolower(static_cast<unsigned char>(text[i + k])) != kw[k]) return false;
    if (i > 0 && is_ident_char(text[i - 1])) return false;
    std::size_t end = i + kw.size();
    return end == text.size() || !is_ident_char(text[end]);
}

void skip_space(std::string_view text, std::size_t& j) {
    while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
}

// Skips a quoted string starting at text[j] == '"'; leaves j past the closing
// quote, or at text.size() when unterminated.
void skip_quoted(std::string_view text, std::size_t& j) {
    ++j;
    while (j < text.size()) {
        if (text[j] == '\\' && j + 1 < text.size() && text[j + 1] == '"') {
            j += 2;
        } else if (text[j] == '"') {
            ++j;
            return;
        } else {
            ++j;
        }
    }
}

std::string trim_right(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

} // namespace

std::string emit_digraph(const CausalLoopDiagram& diagram) {
    std::string out = "digraph {\n";
    for (const auto& link : diagram.links()) {
        out += quote(link.source.raw());
        out += " -> ";
        out += quote(link.target.raw());
        out += " [arrowhead = ";
        out += arrowhead(link.polarity);
        out += "]\n";
    }
    out += "}";
    return out;
}

std::string extract_digraph_block(std::string_view completion) {
    for (std::size_t i = 0; i < completion.size(); ++i) {
        if (!keyword_at(completion, i)) continue;
        std::size_t j = i + 7;
        skip_space(completion, j);
        if (j < completion.size() && completion[j] == '"') {
            skip_quoted(completion, j);
            skip_space(completion, j);
        } else if (j < completion.size() && is_ident_char(completion[j])) {
            while (j < completion.size() && is_ident_char(completion[j])) ++j;
            skip_space(completion, j);
        }
        if (j >= completion.size() || completion[j] != '{') continue;

        int depth = 0;
        while (j < completion.size()) {
            char c = completion[j];
            if (c == '"') {
                skip_quoted(completion, j);
                continue;
            }
            if (c == '{') ++depth;
            if (c == '}' && --depth == 0) return std::string(completion.substr(i, j - i + 1));
            ++j;
        }
        // Truncated completion: keep everything up to a closing code fence.
        auto rest = completion.substr(i);
        auto fence = rest.find("```");
        return trim_right(rest.substr(0, fence));
    }
    throw NoDigraphFound();
}

std::string emit_render_dot(const CausalLoopDiagram& diagram, bool annotate_loops) {
    std::string out = "digraph cld {\n  node [shape=plaintext];\n";
    for (const auto& link : diagram.links()) {
        out += "  " + quote(link.source.raw()) + " -> " + quote(link.target.raw());
        out += " [arrowhead=";
        out += arrowhead(link.polarity);
        out += "];\n";
    }
    if (annotate_loops) {
        int reinforcing = 0;
        int balancing = 0;
        for (const auto& loop : enumerate_loops(diagram)) {
            std::string label = loop.kind == LoopKind::Reinforcing ? "R" + std::to_string(++reinforcing)
                                                                   : "B" + std::to_string(++balancing);
            std::string path;
            for (const auto& member : loop.members()) path += member.raw() + " -> ";
            path += loop.links.front().source.raw();
            // Members in the comment only; newlines would end the comment early.
            for (auto& c : path)
                if (c == '\n' || c == '\r') c = ' ';
            out += "  // " + label + " (" + std::string(to_string(loop.kind)) + "): " + path + "\n";
            out += "  __loop_" + label + " [label=\"" + label + "\", shape=circle, fontsize=10];\n";
        }
    }
    out += "}\n";
    return out;
}

} // namespace cldforge
