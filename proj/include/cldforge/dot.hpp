#pragma once

// Reader and writers for the quoted-edge DOT subset used to exchange
// causal loop diagrams:
//
//   digraph    := "digraph" [identifier] "{" edge* "}"
//   edge       := qstring "->" qstring "[" "arrowhead" "=" ("vee"|"tee") "]" [";"]
//   qstring    := '"' (any char except unescaped '"')* '"'
//
// vee marks a Positive link and tee a Negative one.

#include "cldforge/diagram.hpp"
#include "cldforge/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace cldforge {

enum class ParseMode { Strict, Lenient };
enum class Severity { Error, Warning };

std::string_view to_string(Severity severity);

struct ParseDiagnostic {
    int line = 1;    // 1-based
    int column = 1;  // 1-based, in bytes
    std::string message;
    Severity severity = Severity::Error;

    // "line:column: severity: message"
    std::string to_string() const;

    friend bool operator==(const ParseDiagnostic&, const ParseDiagnostic&) = default;
};

class SyntaxError : public Error {
public:
    explicit SyntaxError(ParseDiagnostic diagnostic);
    const ParseDiagnostic& diagnostic() const noexcept { return diagnostic_; }
    int line() const noexcept { return diagnostic_.line; }
    int column() const noexcept { return diagnostic_.column; }

private:
    ParseDiagnostic diagnostic_;
};

class NoDigraphFound : public Error {
public:
    NoDigraphFound() : Error("no digraph found in completion") {}
};

struct ParseResult {
    CausalLoopDiagram diagram;
    std::vector<ParseDiagnostic> diagnostics;
};

// Strict: any grammar violation or repeated ordered pair throws SyntaxError.
// Lenient: never throws. Keeps the first link per ordered pair, skips
// malformed or unsupported statements, tolerates a missing header or closing
// brace, accepts unquoted names, and defaults unknown or missing arrowheads
// to Positive; each recovery is reported as a Warning.
ParseResult parse_digraph(std::string_view text, ParseMode mode = ParseMode::Strict);

// Canonical interchange text: "digraph {", one `"SRC" -> "DST" [arrowhead = vee]`
// line per link in diagram order, then "}" with no trailing newline.
std::string emit_digraph(const CausalLoopDiagram& diagram);

// First "digraph [id] {" ... matching "}" span in free text. Throws
// NoDigraphFound for prose-only completions.
std::string extract_digraph_block(std::string_view completion);

// Graphviz-ready DOT. With annotate_loops, each feedback loop gets a label
// node (R1, R2, ..., B1, ...) preceded by a comment listing its members.
std::string emit_render_dot(const CausalLoopDiagram& diagram, bool annotate_loops);

} // namespace cldforge
