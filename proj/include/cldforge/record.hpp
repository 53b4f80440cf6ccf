#pragma once

#include "cldforge/diagram.hpp"
#include "cldforge/dot.hpp"
#include "cldforge/prompting.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace cldforge {

struct StageTranscript {
    std::string request;     // full prompt text sent
    std::string completion;  // raw completion text received

    friend bool operator==(const StageTranscript&, const StageTranscript&) = default;
};

struct ProviderMeta {
    std::string model_id;
    std::chrono::milliseconds latency{0};
    std::optional<long> prompt_tokens;
    std::optional<long> completion_tokens;

    friend bool operator==(const ProviderMeta&, const ProviderMeta&) = default;
};

// Audit trail of one hypothesis-to-diagram run. `diagram` is present iff the
// final completion yielded a digraph block; transcripts cover every stage
// attempted.
struct GenerationRecord {
    std::string item_id;  // corpus id in batch runs, empty otherwise
    Strategy strategy = Strategy::Baseline;
    std::string dh;
    std::vector<StageTranscript> stage_transcripts;
    std::optional<CausalLoopDiagram> diagram;
    std::vector<ParseDiagnostic> diagnostics;
    ProviderMeta provider_meta;
    std::optional<std::string> error_note;  // transport failure captured by batch runs

    bool no_digraph() const { return !diagram.has_value(); }

    friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

} // namespace cldforge
