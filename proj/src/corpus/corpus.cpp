#include "cldforge/corpus.hpp"

#include "cldforge/dot.hpp"
#include "cldforge/loops.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace cldforge {

namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys{"version", "items"};
const std::set<std::string> kRequiredItemKeys{"id", "dh", "digraph", "source"};
const std::set<std::string> kOptionalItemKeys{"expected_loops", "low_confidence_links"};

std::string signature_text(const std::vector<ExpectedLoop>& loops) {
    std::string out = "[";
    for (std::size_t i = 0; i < loops.size(); ++i) {
        if (i) out += ", ";
        out += "(" + std::to_string(loops[i].length) + ", " + std::string(to_string(loops[i].kind)) + ")";
    }
    return out + "]";
}

const json& require_string(const json& item, const std::string& id, const char* field) {
    const json& value = item.at(field);
    if (!value.is_string()) throw SchemaError(id, field, "must be a string");
    return value;
}

std::vector<ExpectedLoop> parse_expected_loops(const json& value, const std::string& id) {
    if (!value.is_array()) throw SchemaError(id, "expected_loops", "must be an array");
    std::vector<ExpectedLoop> loops;
    for (const auto& entry : value) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_unsigned() || !entry[1].is_string())
            throw SchemaError(id, "expected_loops", "entries must be [length, \"Reinforcing\"|\"Balancing\"]");
        auto kind = loop_kind_from_string(entry[1].get<std::string>());
        if (!kind) throw SchemaError(id, "expected_loops", "unknown loop kind " + entry[1].dump());
        loops.push_back({entry[0].get<std::size_t>(), *kind});
    }
    return loops;
}

std::vector<std::pair<std::string, std::string>> parse_low_confidence(const json& value, const std::string& id) {
    if (!value.is_array()) throw SchemaError(id, "low_confidence_links", "must be an array");
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& entry : value) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() || !entry[1].is_string())
            throw SchemaError(id, "low_confidence_links", "entries must be [source, target]");
        out.emplace_back(entry[0].get<std::string>(), entry[1].get<std::string>());
    }
    return out;
}

CorpusItem parse_item(const json& item, std::size_t index) {
    std::string id = "#" + std::to_string(index);
    if (!item.is_object()) throw SchemaError(id, "", "item must be an object");
    if (item.contains("id") && item["id"].is_string()) id = item["id"].get<std::string>();

    for (const auto& key : kRequiredItemKeys)
        if (!item.contains(key)) throw SchemaError(id, key, "missing required field");
    for (const auto& [key, _] : item.items())
        if (!kRequiredItemKeys.contains(key) && !kOptionalItemKeys.contains(key))
            throw SchemaError(id, key, "unknown field");

    CorpusItem out;
    out.id = require_string(item, id, "id").get<std::string>();
    out.dh = require_string(item, id, "dh").get<std::string>();
    out.source = require_string(item, id, "source").get<std::string>();
    const auto digraph = require_string(item, id, "digraph").get<std::string>();
    try {
        out.ground_truth = parse_digraph(digraph, ParseMode::Strict).diagram;
    } catch (const SyntaxError& e) {
        throw ValidationError("item '" + id + "': digraph: " + e.what());
    }
    if (item.contains("expected_loops")) out.expected_loops = parse_expected_loops(item["expected_loops"], id);
    if (item.contains("low_confidence_links"))
        out.low_confidence_links = parse_low_confidence(item["low_confidence_links"], id);
    return out;
}

} // namespace

SchemaError::SchemaError(std::string item_id, std::string field, const std::string& message)
    : Error("schema error in item '" + item_id + "'" + (field.empty() ? "" : ", field '" + field + "'") + ": " +
            message),
      item_id_(std::move(item_id)),
      field_(std::move(field)) {}

Corpus::Corpus(std::vector<CorpusItem> items) : items_(std::move(items)) {
    std::set<std::string> seen;
    for (const auto& item : items_) {
        validate_item(item);
        if (!seen.insert(item.id).second) throw ValidationError("duplicate corpus id '" + item.id + "'");
    }
}

const CorpusItem* Corpus::find(std::string_view id) const {
    auto it = std::find_if(items_.begin(), items_.end(), [&](const CorpusItem& i) { return i.id == id; });
    return it == items_.end() ? nullptr : &*it;
}

std::vector<ExpectedLoop> loop_signature(const CausalLoopDiagram& diagram) {
    std::vector<ExpectedLoop> out;
    for (const auto& loop : enumerate_loops(diagram)) out.push_back({loop.length(), loop.kind});
    std::sort(out.begin(), out.end());
    return out;
}

void validate_item(const CorpusItem& item) {
    static const std::regex slug("[a-z0-9]+(-[a-z0-9]+)*");
    if (!std::regex_match(item.id, slug))
        throw ValidationError("corpus id '" + item.id + "' is not a lowercase slug");
    if (item.dh.find_first_not_of(" \t\r\n") == std::string::npos)
        throw ValidationError("item '" + item.id + "': dynamic hypothesis is empty");
    if (item.expected_loops) {
        auto expected = *item.expected_loops;
        std::sort(expected.begin(), expected.end());
        auto actual = loop_signature(item.ground_truth);
        if (expected != actual)
            throw ValidationError("item '" + item.id + "': expected_loops " + signature_text(expected) +
                                  " but ground truth has " + signature_text(actual));
    }
    for (const auto& [src, dst] : item.low_confidence_links)
        if (!item.ground_truth.find_link(normalize_name(src), normalize_name(dst)))
            throw ValidationError("item '" + item.id + "': low-confidence link \"" + src + "\" -> \"" + dst +
                                  "\" is not in the ground truth");
}

Corpus parse_corpus_json(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", "", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("", "", "top level must be an object");
    for (const auto& [key, _] : doc.items())
        if (!kTopLevelKeys.contains(key)) throw SchemaError("", key, "unknown top-level key");
    if (!doc.contains("version")) throw SchemaError("", "version", "missing required field");
    if (!doc["version"].is_number_integer() || doc["version"].get<long>() != 1)
        throw SchemaError("", "version", "unsupported version " + doc["version"].dump());
    if (!doc.contains("items") || !doc["items"].is_array()) throw SchemaError("", "items", "must be an array");

    std::vector<CorpusItem> items;
    std::size_t index = 0;
    for (const auto& item : doc["items"]) items.push_back(parse_item(item, index++));
    return Corpus(std::move(items));
}

std::string corpus_to_json(const Corpus& corpus) {
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["items"] = nlohmann::ordered_json::array();
    for (const auto& item : corpus.items()) {
        nlohmann::ordered_json j;
        j["id"] = item.id;
        j["dh"] = item.dh;
        j["digraph"] = emit_digraph(item.ground_truth);
        j["source"] = item.source;
        if (item.expected_loops) {
            j["expected_loops"] = nlohmann::ordered_json::array();
            for (const auto& loop : *item.expected_loops)
                j["expected_loops"].push_back({loop.length, std::string(to_string(loop.kind))});
        }
        if (!item.low_confidence_links.empty()) {
            j["low_confidence_links"] = nlohmann::ordered_json::array();
            for (const auto& [src, dst] : item.low_confidence_links) j["low_confidence_links"].push_back({src, dst});
        }
        doc["items"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("failed reading corpus file '" + path.string() + "'");
    return parse_corpus_json(buffer.str());
}

} // namespace cldforge
