#include "cldforge/dot.hpp"

#include <cctype>

namespace cldforge {

namespace {

enum class Tok { Ident, QString, Arrow, LBrace, RBrace, LBracket, RBracket, Equals, Semicolon, Comma, Other, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

bool is_ident_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '.' || u >= 0x80;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = column_;
            if (pos_ >= text_.size()) {
                out.push_back(t);
                return out;
            }
            char c = text_[pos_];
            if (c == '"') {
                lex_string(t);
            } else if (is_ident_char(c)) {
                t.kind = Tok::Ident;
                while (pos_ < text_.size() && is_ident_char(text_[pos_])) t.text.push_back(advance());
            } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                t.kind = Tok::Arrow;
                t.text = "->";
                advance();
                advance();
            } else {
                t.text = std::string(1, advance());
                switch (c) {
                case '{': t.kind = Tok::LBrace; break;
                case '}': t.kind = Tok::RBrace; break;
                case '[': t.kind = Tok::LBracket; break;
                case ']': t.kind = Tok::RBracket; break;
                case '=': t.kind = Tok::Equals; break;
                case ';': t.kind = Tok::Semicolon; break;
                case ',': t.kind = Tok::Comma; break;
                default: t.kind = Tok::Other; break;
                }
            }
            out.push_back(std::move(t));
        }
    }

private:
    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
    }

    // Only \" is an escape; any other backslash is literal.
    void lex_string(Token& t) {
        advance();
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\\' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
                advance();
                t.text.push_back(advance());
            } else if (c == '"') {
                advance();
                t.kind = Tok::QString;
                return;
            } else {
                t.text.push_back(advance());
            }
        }
        t.kind = Tok::Other;
        t.text = "unterminated string";
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::QString: return "\"" + t.text + "\"";
    case Tok::Other:
        if (t.text == "unterminated string") return t.text;
        [[fallthrough]];
    default: return "'" + t.text + "'";
    }
}

class Parser {
public:
    Parser(std::string_view text, ParseMode mode) : tokens_(Lexer(text).run()), mode_(mode) {}

    ParseResult run() {
        if (mode_ == ParseMode::Strict)
            parse_strict();
        else
            parse_lenient();
        return {std::move(builder_).build(), std::move(diagnostics_)};
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    const Token& take() {
        const Token& t = peek();
        if (t.kind != Tok::End) ++pos_;
        return t;
    }
    bool at(Tok kind) const { return peek().kind == kind; }

    [[noreturn]] void fail(const Token& t, std::string message) const {
        throw SyntaxError({t.line, t.column, std::move(message), Severity::Error});
    }
    void warn(const Token& t, std::string message) {
        diagnostics_.push_back({t.line, t.column, std::move(message), Severity::Warning});
    }

    const Token& expect(Tok kind, std::string_view what) {
        if (!at(kind)) fail(peek(), "expected " + std::string(what) + ", found " + describe(peek()));
        return take();
    }

    bool is_header_at(std::size_t i, std::size_t& body_start) const {
        if (tokens_[i].kind != Tok::Ident || lower(tokens_[i].text) != "digraph") return false;
        std::size_t j = i + 1;
        if (tokens_[j].kind == Tok::Ident || tokens_[j].kind == Tok::QString) ++j;
        if (tokens_[j].kind != Tok::LBrace) return false;
        body_start = j + 1;
        return true;
    }

    // ---- strict ----------------------------------------------------------

    void parse_strict() {
        const Token& head = peek();
        if (head.kind != Tok::Ident || lower(head.text) != "digraph")
            fail(head, "expected 'digraph', found " + describe(head));
        take();
        if (at(Tok::Ident) || at(Tok::QString)) take();
        expect(Tok::LBrace, "'{'");
        for (;;) {
            if (at(Tok::RBrace)) {
                take();
                break;
            }
            if (!at(Tok::QString))
                fail(peek(), "expected edge statement or '}', found " + describe(peek()));
            parse_strict_edge();
        }
        if (!at(Tok::End)) fail(peek(), "unexpected " + describe(peek()) + " after closing '}'");
    }

    void parse_strict_edge() {
        const Token& source = take();
        expect(Tok::Arrow, "'->'");
        const Token& target = expect(Tok::QString, "quoted target name");
        expect(Tok::LBracket, "'['");
        const Token& key = expect(Tok::Ident, "'arrowhead'");
        if (key.text != "arrowhead") fail(key, "unsupported attribute '" + key.text + "'");
        expect(Tok::Equals, "'='");
        const Token& value = expect(Tok::Ident, "arrowhead value");
        Polarity polarity;
        if (value.text == "vee")
            polarity = Polarity::Positive;
        else if (value.text == "tee")
            polarity = Polarity::Negative;
        else
            fail(value, "unknown arrowhead value '" + value.text + "'");
        expect(Tok::RBracket, "']'");
        if (at(Tok::Semicolon)) take();

        auto src = make_name(source);
        auto dst = make_name(target);
        if (!src) fail(source, "empty variable name");
        if (!dst) fail(target, "empty variable name");
        if (builder_.add({std::move(*src), std::move(*dst), polarity}) == DiagramBuilder::AddResult::Duplicate)
            fail(source, "duplicate link " + describe(source) + " -> " + describe(target));
    }

    static std::optional<VariableName> make_name(const Token& t) {
        try {
            return VariableName(t.text);
        } catch (const EmptyName&) {
            return std::nullopt;
        }
    }

    // ---- lenient ---------------------------------------------------------

    void parse_lenient() {
        bool has_header = false;
        for (std::size_t i = 0; i + 1 < tokens_.size(); ++i) {
            std::size_t body = 0;
            if (is_header_at(i, body)) {
                if (i > 0) warn(tokens_[0], "ignoring text before 'digraph'");
                pos_ = body;
                has_header = true;
                break;
            }
        }
        if (!has_header) warn(peek(), "missing 'digraph {' header");

        bool closed = false;
        while (!closed) {
            const Token& t = peek();
            switch (t.kind) {
            case Tok::End:
                if (has_header) warn(t, "missing closing '}'");
                return;
            case Tok::RBrace:
                take();
                if (has_header)
                    closed = true;
                else
                    warn(t, "ignoring unexpected '}'");
                break;
            case Tok::QString:
            case Tok::Ident:
                lenient_statement();
                break;
            case Tok::Semicolon:
            case Tok::Comma:
                take();
                break;
            default:
                warn(t, "skipping unexpected " + describe(t));
                recover();
                break;
            }
        }
        if (!at(Tok::End)) warn(peek(), "ignoring content after closing '}'");
    }

    // Advances at least one token, then up to the next statement boundary.
    void recover() {
        take();
        for (;;) {
            switch (peek().kind) {
            case Tok::Semicolon:
            case Tok::RBracket:
                take();
                return;
            case Tok::QString:
            case Tok::RBrace:
            case Tok::End:
                return;
            default:
                take();
            }
        }
    }

    void skip_attribute_list() {
        take();
        while (!at(Tok::RBracket) && !at(Tok::RBrace) && !at(Tok::End)) take();
        if (at(Tok::RBracket)) take();
    }

    void lenient_statement() {
        const Token& source = take();
        if (!at(Tok::Arrow)) {
            warn(source, "skipping unsupported statement starting at " + describe(source));
            if (at(Tok::Equals)) {
                take();
                if (at(Tok::Ident) || at(Tok::QString)) take();
            }
            if (at(Tok::LBracket)) skip_attribute_list();
            if (at(Tok::Semicolon) || at(Tok::Comma)) take();
            return;
        }
        take();
        if (!at(Tok::QString) && !at(Tok::Ident)) {
            warn(peek(), "malformed edge statement: expected target name, found " + describe(peek()));
            recover();
            return;
        }
        const Token& target = take();
        if (source.kind == Tok::Ident) warn(source, "unquoted variable name " + describe(source));
        if (target.kind == Tok::Ident) warn(target, "unquoted variable name " + describe(target));
        if (at(Tok::Arrow)) {
            warn(peek(), "edge chains are not supported; statement skipped");
            recover();
            return;
        }

        Polarity polarity = Polarity::Positive;
        if (at(Tok::LBracket)) {
            take();
            bool have_arrowhead = false;
            for (;;) {
                const Token& t = peek();
                if (t.kind == Tok::RBracket) {
                    take();
                    break;
                }
                if (t.kind == Tok::End || t.kind == Tok::RBrace) {
                    warn(t, "unterminated attribute list; statement skipped");
                    return;
                }
                if (t.kind == Tok::Comma || t.kind == Tok::Semicolon) {
                    take();
                    continue;
                }
                if (t.kind != Tok::Ident && t.kind != Tok::QString) {
                    warn(t, "skipping unexpected " + describe(t) + " in attribute list");
                    take();
                    continue;
                }
                const Token& key = take();
                const Token* value = nullptr;
                if (at(Tok::Equals)) {
                    take();
                    if (at(Tok::Ident) || at(Tok::QString)) value = &take();
                }
                if (key.text != "arrowhead") {
                    warn(key, "ignoring attribute '" + key.text + "'");
                    continue;
                }
                have_arrowhead = true;
                std::string v = value ? value->text : std::string();
                if (v == "tee") {
                    polarity = Polarity::Negative;
                } else if (v == "vee") {
                    polarity = Polarity::Positive;
                } else {
                    warn(value ? *value : key, "unknown arrowhead value '" + v + "'; treating link as positive");
                    polarity = Polarity::Positive;
                }
            }
            if (!have_arrowhead) warn(source, "missing arrowhead; treating link as positive");
        } else {
            warn(source, "missing attribute list; treating link as positive");
        }
        if (at(Tok::Semicolon) || at(Tok::Comma)) take();

        auto src = make_name(source);
        auto dst = make_name(target);
        if (!src || !dst) {
            warn(src ? target : source, "empty variable name; statement skipped");
            return;
        }
        if (builder_.add({std::move(*src), std::move(*dst), polarity}) == DiagramBuilder::AddResult::Duplicate)
            warn(source, "duplicate link " + describe(source) + " -> " + describe(target) + "; keeping the first");
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    ParseMode mode_;
    std::vector<ParseDiagnostic> diagnostics_;
    DiagramBuilder builder_;
};

} // namespace

std::string_view to_string(Severity severity) {
    return severity == Severity::Error ? "error" : "warning";
}

std::string ParseDiagnostic::to_string() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " +
           std::string(cldforge::to_string(severity)) + ": " + message;
}

SyntaxError::SyntaxError(ParseDiagnostic diagnostic)
    : Error(diagnostic.to_string()), diagnostic_(std::move(diagnostic)) {}

ParseResult parse_digraph(std::string_view text, ParseMode mode) {
    return Parser(text, mode).run();
}

} // namespace cldforge
