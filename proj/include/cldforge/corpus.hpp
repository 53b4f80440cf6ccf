#pragma once

#include "cldforge/diagram.hpp"
#include "cldforge/error.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cldforge {

class IoError : public Error {
public:
    using Error::Error;
};

// File does not match the corpus JSON schema.
class SchemaError : public Error {
public:
    SchemaError(std::string item_id, std::string field, const std::string& message);
    const std::string& item_id() const noexcept { return item_id_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string item_id_;
    std::string field_;
};

// Well-formed file whose content breaks a corpus invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

struct ExpectedLoop {
    std::size_t length = 0;
    LoopKind kind = LoopKind::Reinforcing;

    friend auto operator<=>(const ExpectedLoop&, const ExpectedLoop&) = default;
};

// One dynamic hypothesis with its expert ground-truth diagram.
struct CorpusItem {
    std::string id;
    std::string dh;
    CausalLoopDiagram ground_truth;
    std::string source;
    std::optional<std::vector<ExpectedLoop>> expected_loops;
    // Ground-truth links whose polarity is not firmly established by the
    // hypothesis text, as (source, target) raw names.
    std::vector<std::pair<std::string, std::string>> low_confidence_links;

    friend bool operator==(const CorpusItem&, const CorpusItem&) = default;
};

class Corpus {
public:
    Corpus() = default;
    // Throws ValidationError on a duplicate id or an invalid item.
    explicit Corpus(std::vector<CorpusItem> items);

    const std::vector<CorpusItem>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    const CorpusItem* find(std::string_view id) const;

    friend bool operator==(const Corpus&, const Corpus&) = default;

private:
    std::vector<CorpusItem> items_;
};

// (length, kind) for every loop of the diagram, sorted.
std::vector<ExpectedLoop> loop_signature(const CausalLoopDiagram& diagram);

// Checks id slug form, non-empty hypothesis, and expected_loops consistency.
void validate_item(const CorpusItem& item);

// {"version": 1, "items": [{"id", "dh", "digraph", "source",
//   "expected_loops"?, "low_confidence_links"?}]}
Corpus parse_corpus_json(std::string_view json_text);
std::string corpus_to_json(const Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& path);

// The four hypothesis/diagram pairs shipped with the library, built once.
const Corpus& bundled_goldens();

} // namespace cldforge
