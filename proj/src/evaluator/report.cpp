#include "cldforge/evaluator.hpp"
#include "cldforge/record.hpp"

namespace cldforge {

namespace {

void check_alignment(const std::vector<GenerationRecord>& records, const Corpus& corpus) {
    if (records.size() != corpus.size())
        throw AlignmentError(std::to_string(records.size()) + " records for " + std::to_string(corpus.size()) +
                             " corpus items");
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].item_id != corpus.items()[i].id)
            throw AlignmentError("record " + std::to_string(i) + " is for '" + records[i].item_id +
                                 "' but corpus item is '" + corpus.items()[i].id + "'");
}

ItemReport score_item(const GenerationRecord& record, const CorpusItem& item, double threshold) {
    ItemReport out;
    out.id = item.id;
    out.no_digraph = record.no_digraph();
    out.error = record.error_note;
    out.metrics = evaluate(record.diagram.value_or(CausalLoopDiagram{}), item.ground_truth, threshold);
    return out;
}

AggregateMetrics aggregate(const std::vector<ItemReport>& items) {
    AggregateMetrics out;
    if (items.empty()) return out;
    const double n = static_cast<double>(items.size());
    auto mean = [&](auto field) {
        double sum = 0.0;
        for (const auto& item : items) sum += field(item.metrics);
        return sum / n;
    };
    auto mean_pr = [&](auto select) {
        return PrecisionRecall{mean([&](const EvalReport& r) { return select(r).precision; }),
                               mean([&](const EvalReport& r) { return select(r).recall; }),
                               mean([&](const EvalReport& r) { return select(r).f1; })};
    };
    out.node = mean_pr([](const EvalReport& r) { return r.node; });
    out.link_strict = mean_pr([](const EvalReport& r) { return r.link_strict; });
    out.link_lenient = mean_pr([](const EvalReport& r) { return r.link_lenient; });
    out.loop_count_match_rate = mean([](const EvalReport& r) { return r.loops.loop_count_match ? 1.0 : 0.0; });
    out.loop_kind_match_rate = mean([](const EvalReport& r) { return r.loops.loop_kind_multiset_match ? 1.0 : 0.0; });

    double polarity_sum = 0.0;
    std::size_t polarity_items = 0;
    for (const auto& item : items) {
        if (item.metrics.polarity_accuracy) {
            polarity_sum += *item.metrics.polarity_accuracy;
            ++polarity_items;
        }
        if (item.no_digraph) ++out.no_digraph_count;
        if (item.error) ++out.error_count;
    }
    if (polarity_items > 0) out.polarity_accuracy = polarity_sum / static_cast<double>(polarity_items);
    return out;
}

} // namespace

AggregateReport batch_report(const std::vector<GenerationRecord>& records, const Corpus& corpus, double threshold) {
    check_alignment(records, corpus);
    std::vector<ItemReport> items(records.size());
    const auto n = static_cast<long>(records.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
        auto k = static_cast<std::size_t>(i);
        items[k] = score_item(records[k], corpus.items()[k], threshold);
    }
    return {items, aggregate(items), threshold};
}

AggregateReport batch_report_serial(const std::vector<GenerationRecord>& records, const Corpus& corpus,
                                    double threshold) {
    check_alignment(records, corpus);
    std::vector<ItemReport> items;
    items.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        items.push_back(score_item(records[i], corpus.items()[i], threshold));
    return {items, aggregate(items), threshold};
}

} // namespace cldforge
