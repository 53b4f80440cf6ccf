#include "cldforge/diagram.hpp"

#include <algorithm>
#include <unordered_set>

namespace cldforge {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

} // namespace

std::string_view to_string(Polarity polarity) {
    return polarity == Polarity::Positive ? "Positive" : "Negative";
}

std::string_view to_string(LoopKind kind) {
    return kind == LoopKind::Reinforcing ? "Reinforcing" : "Balancing";
}

std::optional<LoopKind> loop_kind_from_string(std::string_view text) {
    if (text == "Reinforcing") return LoopKind::Reinforcing;
    if (text == "Balancing") return LoopKind::Balancing;
    return std::nullopt;
}

std::string normalize_name(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(ascii_lower(c));
    }
    return out;
}

VariableName::VariableName(std::string raw)
    : raw_(std::move(raw)), normalized_(normalize_name(raw_)) {
    if (normalized_.empty()) throw EmptyName("variable name is empty");
}

std::optional<std::size_t> CausalLoopDiagram::index_of(std::string_view normalized) const {
    auto it = variable_index_.find(std::string(normalized));
    if (it == variable_index_.end()) return std::nullopt;
    return it->second;
}

const Link* CausalLoopDiagram::find_link(std::string_view source_normalized,
                                         std::string_view target_normalized) const {
    auto it = link_index_.find({std::string(source_normalized), std::string(target_normalized)});
    return it == link_index_.end() ? nullptr : &links_[it->second];
}

DiagramBuilder::AddResult DiagramBuilder::add(Link link) {
    auto& d = diagram_;
    std::pair key{link.source.normalized(), link.target.normalized()};
    if (d.link_index_.contains(key)) return AddResult::Duplicate;
    for (const VariableName* v : {&link.source, &link.target}) {
        if (!d.variable_index_.contains(v->normalized())) {
            d.variable_index_.emplace(v->normalized(), d.variables_.size());
            d.variables_.push_back(*v);
        }
    }
    d.link_index_.emplace(std::move(key), d.links_.size());
    d.links_.push_back(std::move(link));
    return AddResult::Added;
}

CausalLoopDiagram DiagramBuilder::build() && { return std::move(diagram_); }

CausalLoopDiagram build_diagram(std::vector<Link> links) {
    DiagramBuilder builder;
    for (auto& link : links) {
        std::string src = link.source.raw();
        std::string dst = link.target.raw();
        if (builder.add(std::move(link)) == DiagramBuilder::AddResult::Duplicate)
            throw DuplicateLink("duplicate link " + quoted(src) + " -> " + quoted(dst));
    }
    return std::move(builder).build();
}

std::vector<VariableName> exogenous_variables(const CausalLoopDiagram& diagram) {
    std::vector<bool> has_incoming(diagram.variables().size(), false);
    for (const auto& link : diagram.links())
        has_incoming[*diagram.index_of(link.target.normalized())] = true;
    std::vector<VariableName> out;
    for (std::size_t i = 0; i < has_incoming.size(); ++i)
        if (!has_incoming[i]) out.push_back(diagram.variables()[i]);
    return out;
}

std::vector<VariableName> FeedbackLoop::members() const {
    std::vector<VariableName> out;
    out.reserve(links.size());
    for (const auto& link : links) out.push_back(link.source);
    return out;
}

LoopKind classify_loop(std::span<const Link> links) {
    if (links.empty()) throw NotACycle("loop has no links");
    std::unordered_set<std::string> sources;
    std::size_t negatives = 0;
    for (std::size_t i = 0; i < links.size(); ++i) {
        const Link& link = links[i];
        const Link& next = links[(i + 1) % links.size()];
        if (link.target.normalized() != next.source.normalized())
            throw NotACycle("link " + std::to_string(i) + " does not chain into the next link");
        if (!sources.insert(link.source.normalized()).second)
            throw NotACycle("variable " + quoted(link.source.raw()) + " repeats within the loop");
        if (link.polarity == Polarity::Negative) ++negatives;
    }
    return negatives % 2 == 0 ? LoopKind::Reinforcing : LoopKind::Balancing;
}

} // namespace cldforge
