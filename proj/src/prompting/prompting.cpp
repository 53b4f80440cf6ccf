#include "cldforge/prompting.hpp"

#include "cldforge/dot.hpp"
#include "prompt_texts.hpp"

#include <cctype>
#include <set>

namespace cldforge {

namespace {

constexpr std::string_view kHypothesisLabel = "Dynamic hypothesis:\n";
constexpr std::string_view kDigraphCue = "DOT:\n";
constexpr std::string_view kVariablesLabel = "Variable names:\n";

std::string bullet_list(std::span<const std::string> names) {
    std::string out;
    for (const auto& name : names) out += "- " + name + "\n";
    return out;
}

std::vector<std::string> exemplar_variables(const Exemplar& exemplar) {
    std::vector<std::string> names;
    const auto parsed = parse_digraph(exemplar.digraph, ParseMode::Strict);
    for (const auto& v : parsed.diagram.variables())
        names.push_back(v.raw());
    return names;
}

std::string digraph_block(const Exemplar& e) {
    return std::string(kHypothesisLabel) + e.dh + "\n" + std::string(kDigraphCue) + e.digraph + "\n\n";
}

std::string digraph_target(std::string_view dh) {
    return std::string(kHypothesisLabel) + std::string(dh) + "\n" + std::string(kDigraphCue);
}

// Instruction either leads the body or moves to the system preamble.
StageRequest with_instruction(const std::string& instruction, std::string rest, ParsePlan plan,
                              const PromptOptions& options) {
    if (options.instructions_in_system) return {instruction, std::move(rest), plan};
    return {"", instruction + "\n\n" + rest, plan};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view strip_list_marker(std::string_view line) {
    if (!line.empty() && (line.front() == '-' || line.front() == '*')) return trim(line.substr(1));
    std::size_t digits = 0;
    while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
    if (digits > 0 && digits < line.size() && (line[digits] == '.' || line[digits] == ')'))
        return trim(line.substr(digits + 1));
    return line;
}

std::string_view strip_quotes(std::string_view s) {
    while (s.size() >= 2 && (s.front() == '"' || s.front() == '\'' || s.front() == '`') && s.back() == s.front())
        s = trim(s.substr(1, s.size() - 2));
    return s;
}

} // namespace

std::string_view strategy_slug(Strategy strategy) {
    switch (strategy) {
    case Strategy::Baseline: return "baseline";
    case Strategy::MinimalContext: return "minimal";
    case Strategy::GuidedPrompts: return "guided";
    case Strategy::TwoStage: return "two-stage";
    }
    return "";
}

std::optional<Strategy> strategy_from_slug(std::string_view slug) {
    for (Strategy s : kAllStrategies)
        if (strategy_slug(s) == slug) return s;
    return std::nullopt;
}

std::string StageRequest::prompt_text() const {
    return system_preamble.empty() ? body : system_preamble + "\n\n" + body;
}

const std::string& baseline_instruction() { return detail::kBaselineInstruction; }
const std::string& guided_instruction() { return detail::kGuidedInstruction; }

std::pair<const std::string&, const std::string&> two_stage_instructions() {
    return {detail::kTwoStageVariablesInstruction, detail::kTwoStageLinksInstruction};
}

std::vector<Exemplar> select_exemplars(const Corpus& corpus, std::optional<std::string_view> exclude_id,
                                       std::size_t k) {
    std::vector<Exemplar> out;
    for (const auto& item : corpus.items()) {
        if (out.size() == k) break;
        if (exclude_id && item.id == *exclude_id) continue;
        out.push_back({item.dh, emit_digraph(item.ground_truth)});
    }
    if (out.size() < k)
        throw NotEnoughExemplars("requested " + std::to_string(k) + " exemplars but only " +
                                 std::to_string(out.size()) + " are available");
    return out;
}

PromptBundle build_prompt(Strategy strategy, std::string_view dh, std::span<const Exemplar> exemplars,
                          PromptOptions options) {
    if (trim(dh).empty()) throw PreconditionViolation("dynamic hypothesis is empty");
    if (strategy == Strategy::Baseline && !exemplars.empty())
        throw PreconditionViolation("baseline prompting takes no exemplars");
    if ((strategy == Strategy::MinimalContext || strategy == Strategy::GuidedPrompts) && exemplars.empty())
        throw PreconditionViolation(std::string(strategy_slug(strategy)) + " prompting needs at least one exemplar");

    PromptBundle bundle{strategy, {}};
    switch (strategy) {
    case Strategy::Baseline:
        bundle.stages.push_back(
            with_instruction(baseline_instruction(), std::string(dh), ParsePlan::ExpectDigraph, options));
        break;
    case Strategy::MinimalContext: {
        std::string body;
        for (const auto& e : exemplars) body += digraph_block(e);
        bundle.stages.push_back({"", body + digraph_target(dh), ParsePlan::ExpectDigraph});
        break;
    }
    case Strategy::GuidedPrompts: {
        std::string body;
        for (const auto& e : exemplars) body += digraph_block(e);
        bundle.stages.push_back(
            with_instruction(guided_instruction(), body + digraph_target(dh), ParsePlan::ExpectDigraph, options));
        break;
    }
    case Strategy::TwoStage: {
        auto [variables_instruction, links_instruction] = two_stage_instructions();
        std::string first;
        std::string second;
        for (const auto& e : exemplars) {
            auto names = bullet_list(exemplar_variables(e));
            first += std::string(kHypothesisLabel) + e.dh + "\n" + std::string(kVariablesLabel) + names + "\n";
            second += std::string(kVariablesLabel) + names + digraph_block(e);
        }
        first += std::string(kHypothesisLabel) + std::string(dh) + "\n" + std::string(kVariablesLabel);
        bundle.stages.push_back(with_instruction(variables_instruction, first, ParsePlan::ExpectVariableList, options));

        second += std::string(kVariablesLabel) + std::string(kVariableSlot) + std::string(kHypothesisLabel) +
                  std::string(dh) + "\n\n";
        if (options.instructions_in_system)
            bundle.stages.push_back({links_instruction, second + std::string(kDigraphCue), ParsePlan::ExpectDigraph});
        else
            bundle.stages.push_back(
                {"", second + links_instruction + "\n\n" + std::string(kDigraphCue), ParsePlan::ExpectDigraph});
        break;
    }
    }
    return bundle;
}

StageRequest fill_variable_slot(const StageRequest& stage, std::span<const std::string> variables) {
    StageRequest out = stage;
    auto at = out.body.find(kVariableSlot);
    if (at != std::string::npos) out.body.replace(at, kVariableSlot.size(), bullet_list(variables));
    return out;
}

std::vector<std::string> parse_variable_list(std::string_view completion) {
    std::vector<std::string> names;
    std::set<std::string> seen;
    std::size_t start = 0;
    while (start <= completion.size()) {
        auto end = completion.find('\n', start);
        if (end == std::string_view::npos) end = completion.size();
        auto line = strip_quotes(strip_list_marker(trim(completion.substr(start, end - start))));
        start = end + 1;
        if (line.empty()) continue;
        auto key = normalize_name(line);
        if (seen.insert(key).second) names.emplace_back(line);
    }
    if (names.empty()) throw EmptyVariableList();
    return names;
}

} // namespace cldforge
