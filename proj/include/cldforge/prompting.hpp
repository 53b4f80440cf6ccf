#pragma once

#include "cldforge/corpus.hpp"
#include "cldforge/error.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cldforge {

// Approaches 1-4: zero-shot instruction, bare few-shot, few-shot with the
// guided instruction, and variable-list-then-links two-stage prompting.
enum class Strategy { Baseline, MinimalContext, GuidedPrompts, TwoStage };

inline constexpr std::array kAllStrategies{Strategy::Baseline, Strategy::MinimalContext,
                                           Strategy::GuidedPrompts, Strategy::TwoStage};

// Wire names: baseline, minimal, guided, two-stage.
std::string_view strategy_slug(Strategy strategy);
std::optional<Strategy> strategy_from_slug(std::string_view slug);

class NotEnoughExemplars : public Error {
public:
    using Error::Error;
};

class PreconditionViolation : public Error {
public:
    using Error::Error;
};

class EmptyVariableList : public Error {
public:
    EmptyVariableList() : Error("no variable names found in completion") {}
};

struct Exemplar {
    std::string dh;
    std::string digraph;  // canonical emit_digraph form

    friend bool operator==(const Exemplar&, const Exemplar&) = default;
};

enum class ParsePlan { ExpectDigraph, ExpectVariableList };

struct StageRequest {
    std::string system_preamble;
    std::string body;
    ParsePlan parse_plan = ParsePlan::ExpectDigraph;

    // What a completion-style provider sees, and the mock fixture key input.
    std::string prompt_text() const;

    friend bool operator==(const StageRequest&, const StageRequest&) = default;
};

struct PromptBundle {
    Strategy strategy = Strategy::Baseline;
    std::vector<StageRequest> stages;

    friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

struct PromptOptions {
    // Move instruction text out of the body into system_preamble.
    bool instructions_in_system = false;
};

inline constexpr std::size_t kDefaultShots = 3;

// Marker in the second TwoStage body replaced by the stage-1 variable list.
inline constexpr std::string_view kVariableSlot = "{{variables}}";

const std::string& baseline_instruction();
const std::string& guided_instruction();
// (variable-list stage, link stage)
std::pair<const std::string&, const std::string&> two_stage_instructions();

// First k items in corpus order, skipping exclude_id.
std::vector<Exemplar> select_exemplars(const Corpus& corpus, std::optional<std::string_view> exclude_id,
                                       std::size_t k);

PromptBundle build_prompt(Strategy strategy, std::string_view dh, std::span<const Exemplar> exemplars,
                          PromptOptions options = {});

// Returns the stage with kVariableSlot replaced by "- name" lines.
StageRequest fill_variable_slot(const StageRequest& stage, std::span<const std::string> variables);

// One name per line; strips bullets, ordinals, and quotes; drops blanks and
// normalized duplicates. Throws EmptyVariableList when nothing remains.
std::vector<std::string> parse_variable_list(std::string_view completion);

} // namespace cldforge
