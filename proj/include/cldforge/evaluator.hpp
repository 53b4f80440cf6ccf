#pragma once

#include "cldforge/corpus.hpp"
#include "cldforge/diagram.hpp"
#include "cldforge/error.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cldforge {

struct GenerationRecord;

inline constexpr double kDefaultThreshold = 0.8;

class AlignmentError : public Error {
public:
    using Error::Error;
};

// Levenshtein distance over Unicode code points of two strings.
std::size_t edit_distance(std::string_view a, std::string_view b);

// 1 - edit_distance / max_length over normalized names; 1.0 when both are empty.
double name_similarity(std::string_view a, std::string_view b);

struct MatchedPair {
    VariableName generated;
    VariableName truth;
    double similarity = 0.0;

    friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct NodeMatching {
    std::vector<MatchedPair> pairs;  // sorted by generated normalized name
    std::vector<VariableName> unmatched_generated;
    std::vector<VariableName> unmatched_truth;

    double total_similarity() const;

    friend bool operator==(const NodeMatching&, const NodeMatching&) = default;
};

// Maximum-weight one-to-one assignment over pairs whose similarity reaches
// threshold. Among optimal assignments, lexicographically smaller
// (generated, truth) normalized pairs are preferred.
NodeMatching match_nodes(const CausalLoopDiagram& generated, const CausalLoopDiagram& truth, double threshold);

struct PrecisionRecall {
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;

    friend bool operator==(const PrecisionRecall&, const PrecisionRecall&) = default;
};

// Empty denominators count as 1.0; f1 is 0 when precision + recall is 0.
PrecisionRecall precision_recall(std::size_t hits, std::size_t predicted, std::size_t actual);

struct LoopComparison {
    std::vector<ExpectedLoop> generated;  // sorted (length, kind)
    std::vector<ExpectedLoop> truth;
    bool loop_count_match = true;
    bool loop_kind_multiset_match = true;
    bool overflow = false;  // a diagram exceeded the loop enumeration bound

    friend bool operator==(const LoopComparison&, const LoopComparison&) = default;
};

struct EvalReport {
    PrecisionRecall node;
    PrecisionRecall link_strict;
    PrecisionRecall link_lenient;
    std::optional<double> polarity_accuracy;  // undefined without lenient matches
    std::size_t strict_matches = 0;
    std::size_t lenient_matches = 0;
    LoopComparison loops;
    NodeMatching matching;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

EvalReport evaluate(const CausalLoopDiagram& generated, const CausalLoopDiagram& truth,
                    double threshold = kDefaultThreshold);

struct ItemReport {
    std::string id;
    EvalReport metrics;
    bool no_digraph = false;
    std::optional<std::string> error;

    friend bool operator==(const ItemReport&, const ItemReport&) = default;
};

// Unweighted means over items. polarity_accuracy averages only items where it
// is defined; the rates are fractions of items with a matching loop summary.
struct AggregateMetrics {
    PrecisionRecall node;
    PrecisionRecall link_strict;
    PrecisionRecall link_lenient;
    std::optional<double> polarity_accuracy;
    double loop_count_match_rate = 1.0;
    double loop_kind_match_rate = 1.0;
    std::size_t no_digraph_count = 0;
    std::size_t error_count = 0;

    friend bool operator==(const AggregateMetrics&, const AggregateMetrics&) = default;
};

struct AggregateReport {
    std::vector<ItemReport> items;
    AggregateMetrics aggregate;
    double threshold = kDefaultThreshold;

    friend bool operator==(const AggregateReport&, const AggregateReport&) = default;
};

// Scores each record against the corpus item at the same position; items
// are evaluated in parallel (OpenMP). Throws AlignmentError when ids or
// counts disagree.
AggregateReport batch_report(const std::vector<GenerationRecord>& records, const Corpus& corpus,
                             double threshold = kDefaultThreshold);

// Single-threaded reference for batch_report.
AggregateReport batch_report_serial(const std::vector<GenerationRecord>& records, const Corpus& corpus,
                                    double threshold = kDefaultThreshold);

} // namespace cldforge
