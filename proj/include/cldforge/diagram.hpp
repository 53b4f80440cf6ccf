#pragma once

#include "cldforge/error.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cldforge {

enum class Polarity { Positive, Negative };
enum class LoopKind { Reinforcing, Balancing };

std::string_view to_string(Polarity polarity);
std::string_view to_string(LoopKind kind);
std::optional<LoopKind> loop_kind_from_string(std::string_view text);

class DuplicateLink : public Error {
public:
    using Error::Error;
};

class EmptyName : public Error {
public:
    using Error::Error;
};

class NotACycle : public Error {
public:
    using Error::Error;
};

class TooManyLoops : public Error {
public:
    using Error::Error;
};

// Lowercases ASCII letters, trims, and collapses internal whitespace runs to
// a single space. Idempotent.
std::string normalize_name(std::string_view raw);

// A variable as written (raw) plus its identity key (normalized).
class VariableName {
public:
    // Throws EmptyName when raw normalizes to the empty string.
    explicit VariableName(std::string raw);

    const std::string& raw() const noexcept { return raw_; }
    const std::string& normalized() const noexcept { return normalized_; }

    friend bool operator==(const VariableName&, const VariableName&) = default;

private:
    std::string raw_;
    std::string normalized_;
};

struct Link {
    VariableName source;
    VariableName target;
    Polarity polarity = Polarity::Positive;

    friend bool operator==(const Link&, const Link&) = default;
};

// Signed digraph of named variables. At most one link per ordered
// (normalized source, normalized target) pair; self-loops are allowed.
// Construct through build_diagram() or DiagramBuilder.
class CausalLoopDiagram {
public:
    CausalLoopDiagram() = default;

    const std::vector<VariableName>& variables() const noexcept { return variables_; }
    const std::vector<Link>& links() const noexcept { return links_; }
    bool empty() const noexcept { return links_.empty(); }

    std::optional<std::size_t> index_of(std::string_view normalized) const;
    const Link* find_link(std::string_view source_normalized,
                          std::string_view target_normalized) const;

    friend bool operator==(const CausalLoopDiagram& a, const CausalLoopDiagram& b) {
        return a.variables_ == b.variables_ && a.links_ == b.links_;
    }

private:
    friend class DiagramBuilder;

    std::vector<VariableName> variables_;
    std::vector<Link> links_;
    std::unordered_map<std::string, std::size_t> variable_index_;
    std::map<std::pair<std::string, std::string>, std::size_t> link_index_;
};

// Incremental construction that reports duplicates instead of throwing, so
// lenient readers can keep the first occurrence.
class DiagramBuilder {
public:
    enum class AddResult { Added, Duplicate };

    AddResult add(Link link);
    CausalLoopDiagram build() &&;

private:
    CausalLoopDiagram diagram_;
};

// Variables are the union of link endpoints in first-appearance order.
// Throws DuplicateLink on a repeated ordered pair (regardless of polarity).
CausalLoopDiagram build_diagram(std::vector<Link> links);

// Variables with no incoming link, in diagram order.
std::vector<VariableName> exogenous_variables(const CausalLoopDiagram& diagram);

struct FeedbackLoop {
    std::vector<Link> links;
    LoopKind kind = LoopKind::Reinforcing;

    std::size_t length() const noexcept { return links.size(); }
    // Loop members in traversal order, starting with the canonical first variable.
    std::vector<VariableName> members() const;

    friend bool operator==(const FeedbackLoop&, const FeedbackLoop&) = default;
};

// Reinforcing iff the number of Negative links is even. Throws NotACycle
// unless the links chain into a simple cycle.
LoopKind classify_loop(std::span<const Link> links);

} // namespace cldforge
