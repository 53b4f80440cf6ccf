#include "cldforge/evaluator.hpp"

#include "cldforge/loops.hpp"

#include <algorithm>
#include <unordered_map>

namespace cldforge {

PrecisionRecall precision_recall(std::size_t hits, std::size_t predicted, std::size_t actual) {
    PrecisionRecall out;
    out.precision = predicted == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(predicted);
    out.recall = actual == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(actual);
    const double sum = out.precision + out.recall;
    out.f1 = sum == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / sum;
    return out;
}

namespace {

LoopComparison compare_loops(const CausalLoopDiagram& generated, const CausalLoopDiagram& truth) {
    LoopComparison out;
    try {
        out.generated = loop_signature(generated);
        out.truth = loop_signature(truth);
    } catch (const TooManyLoops&) {
        out.overflow = true;
        out.loop_count_match = false;
        out.loop_kind_multiset_match = false;
        return out;
    }
    out.loop_count_match = out.generated.size() == out.truth.size();
    out.loop_kind_multiset_match = out.generated == out.truth;
    return out;
}

} // namespace

EvalReport evaluate(const CausalLoopDiagram& generated, const CausalLoopDiagram& truth, double threshold) {
    EvalReport report;
    report.matching = match_nodes(generated, truth, threshold);
    report.node = precision_recall(report.matching.pairs.size(), generated.variables().size(),
                                   truth.variables().size());

    std::unordered_map<std::string, const VariableName*> to_truth;
    for (const auto& pair : report.matching.pairs) to_truth[pair.generated.normalized()] = &pair.truth;

    for (const auto& link : generated.links()) {
        auto src = to_truth.find(link.source.normalized());
        auto dst = to_truth.find(link.target.normalized());
        if (src == to_truth.end() || dst == to_truth.end()) continue;
        const Link* counterpart = truth.find_link(src->second->normalized(), dst->second->normalized());
        if (!counterpart) continue;
        ++report.lenient_matches;
        if (counterpart->polarity == link.polarity) ++report.strict_matches;
    }
    report.link_lenient = precision_recall(report.lenient_matches, generated.links().size(), truth.links().size());
    report.link_strict = precision_recall(report.strict_matches, generated.links().size(), truth.links().size());
    if (report.lenient_matches > 0)
        report.polarity_accuracy =
            static_cast<double>(report.strict_matches) / static_cast<double>(report.lenient_matches);

    report.loops = compare_loops(generated, truth);
    return report;
}

} // namespace cldforge
