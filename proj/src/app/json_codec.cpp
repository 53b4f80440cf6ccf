#include "cldforge/json_codec.hpp"

#include "cldforge/dot.hpp"
#include "cldforge/loops.hpp"

namespace cldforge {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json optional_number(const std::optional<long>& v) { return v ? Json(*v) : Json(nullptr); }

Json signature_json(const std::vector<ExpectedLoop>& loops) {
    Json out = Json::array();
    for (const auto& loop : loops) out.push_back({loop.length, std::string(to_string(loop.kind))});
    return out;
}

Json names_json(const std::vector<VariableName>& names) {
    Json out = Json::array();
    for (const auto& n : names) out.push_back(n.raw());
    return out;
}

} // namespace

Json to_json(const PrecisionRecall& pr) {
    return {{"precision", pr.precision}, {"recall", pr.recall}, {"f1", pr.f1}};
}

Json to_json(const ParseDiagnostic& d) {
    return {{"line", d.line}, {"column", d.column}, {"severity", std::string(to_string(d.severity))},
            {"message", d.message}};
}

Json to_json(const EvalReport& report) {
    Json pairs = Json::array();
    for (const auto& p : report.matching.pairs)
        pairs.push_back({{"generated", p.generated.raw()}, {"truth", p.truth.raw()}, {"similarity", p.similarity}});

    Json out;
    out["node"] = to_json(report.node);
    out["link_strict"] = to_json(report.link_strict);
    out["link_lenient"] = to_json(report.link_lenient);
    out["polarity_accuracy"] = optional_number(report.polarity_accuracy);
    out["loops"] = {{"generated", signature_json(report.loops.generated)},
                    {"truth", signature_json(report.loops.truth)},
                    {"loop_count_match", report.loops.loop_count_match},
                    {"loop_kind_multiset_match", report.loops.loop_kind_multiset_match},
                    {"overflow", report.loops.overflow}};
    out["matching"] = {{"pairs", pairs},
                       {"unmatched_generated", names_json(report.matching.unmatched_generated)},
                       {"unmatched_truth", names_json(report.matching.unmatched_truth)}};
    return out;
}

Json to_json(const AggregateReport& report) {
    Json items = Json::array();
    for (const auto& item : report.items) {
        Json j{{"id", item.id}, {"metrics", to_json(item.metrics)}, {"no_digraph", item.no_digraph}};
        j["error"] = item.error ? Json(*item.error) : Json(nullptr);
        items.push_back(std::move(j));
    }
    const auto& a = report.aggregate;
    Json aggregate{{"node", to_json(a.node)},
                   {"link_strict", to_json(a.link_strict)},
                   {"link_lenient", to_json(a.link_lenient)},
                   {"polarity_accuracy", optional_number(a.polarity_accuracy)},
                   {"loop_count_match_rate", a.loop_count_match_rate},
                   {"loop_kind_match_rate", a.loop_kind_match_rate},
                   {"no_digraph_count", a.no_digraph_count},
                   {"error_count", a.error_count}};
    return {{"items", items}, {"aggregate", aggregate}, {"threshold", report.threshold}};
}

Json to_json(const GenerationRecord& record) {
    Json transcripts = Json::array();
    for (const auto& t : record.stage_transcripts)
        transcripts.push_back({{"request", t.request}, {"completion", t.completion}});
    Json diagnostics = Json::array();
    for (const auto& d : record.diagnostics) diagnostics.push_back(to_json(d));

    Json out;
    out["item_id"] = record.item_id.empty() ? Json(nullptr) : Json(record.item_id);
    out["strategy"] = std::string(strategy_slug(record.strategy));
    out["dh"] = record.dh;
    out["stage_transcripts"] = transcripts;
    out["digraph"] = record.diagram ? Json(emit_digraph(*record.diagram)) : Json(nullptr);
    out["diagnostics"] = diagnostics;
    out["provider_meta"] = {{"model_id", record.provider_meta.model_id},
                            {"latency_ms", record.provider_meta.latency.count()},
                            {"prompt_tokens", optional_number(record.provider_meta.prompt_tokens)},
                            {"completion_tokens", optional_number(record.provider_meta.completion_tokens)}};
    out["error_note"] = record.error_note ? Json(*record.error_note) : Json(nullptr);
    return out;
}

Json loops_json(const CausalLoopDiagram& diagram) {
    Json out = Json::array();
    for (const auto& loop : enumerate_loops(diagram))
        out.push_back({{"length", loop.length()},
                       {"kind", std::string(to_string(loop.kind))},
                       {"members", names_json(loop.members())}});
    return out;
}

Json corpus_summary_json(const CorpusItem& item) {
    Json loops = Json::array();
    for (const auto& l : loop_signature(item.ground_truth))
        loops.push_back({{"length", l.length}, {"kind", std::string(to_string(l.kind))}});
    return {{"id", item.id},
            {"source", item.source},
            {"variable_count", item.ground_truth.variables().size()},
            {"loops", loops}};
}

Json corpus_item_json(const CorpusItem& item) {
    return Json::parse(corpus_to_json(Corpus({item})))["items"][0];
}

} // namespace cldforge
