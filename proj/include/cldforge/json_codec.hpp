#pragma once

// JSON shapes shared by the CLI and the HTTP service.

#include "cldforge/corpus.hpp"
#include "cldforge/evaluator.hpp"
#include "cldforge/record.hpp"

#include <json.hpp>

#include <vector>

namespace cldforge {

using Json = nlohmann::ordered_json;

Json to_json(const PrecisionRecall& pr);
Json to_json(const EvalReport& report);
Json to_json(const AggregateReport& report);
Json to_json(const GenerationRecord& record);
Json to_json(const ParseDiagnostic& diagnostic);

// [{"length", "kind", "members": [raw names]}], in enumerate_loops order.
Json loops_json(const CausalLoopDiagram& diagram);

// {"id", "source", "variable_count", "loops": [{"length", "kind"}]}
Json corpus_summary_json(const CorpusItem& item);
// Same object shape as one entry of the corpus file's "items" array.
Json corpus_item_json(const CorpusItem& item);

} // namespace cldforge
