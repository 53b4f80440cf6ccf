#include <doctest.h>

#include "cldforge/dot.hpp"
#include "cldforge/prompting.hpp"
#include "paths.hpp"

using namespace cldforge;

namespace {

std::size_t count(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (auto at = haystack.find(needle); at != std::string_view::npos; at = haystack.find(needle, at + 1)) ++n;
    return n;
}

const Exemplar kOne{"More a means more b.", "digraph {\n\"a\" -> \"b\" [arrowhead = vee]\n}"};
const Exemplar kTwo{"More c means less d.", "digraph {\n\"c\" -> \"d\" [arrowhead = tee]\n}"};

} // namespace

TEST_CASE("instruction texts equal the transcribed fixtures byte for byte") {
    CHECK(guided_instruction() == testing::slurp(testing::fixture("prompts/guided.txt")));
    CHECK(two_stage_instructions().first == testing::slurp(testing::fixture("prompts/two_stage_variables.txt")));
    CHECK(two_stage_instructions().second == testing::slurp(testing::fixture("prompts/two_stage_links.txt")));
}

TEST_CASE("instruction text spot checks") {
    const auto& guided = guided_instruction();
    CHECK(guided.rfind("First, Render a list of variable names", 0) == 0);
    CHECK(guided.find("[vee]") != std::string::npos);
    CHECK(guided.find("[tee]") != std::string::npos);
    CHECK(guided.find("the the meaning") != std::string::npos);
    CHECK(&guided_instruction() == &guided);

    auto [first, second] = two_stage_instructions();
    CHECK(first.find("nouns or nouns phrases") != std::string::npos);
    CHECK(second.find("Step 2: [arrowhead=vee] indicates a positive relationship.") != std::string::npos);
    CHECK(second.find("Step 3: Create a DOT format") != std::string::npos);
    std::string_view tail = "based on the cause-effect relationship.";
    CHECK(second.substr(second.size() - tail.size()) == tail);
    CHECK(baseline_instruction() == "Generate a causal loop diagram for the following dynamic hypothesis.");
}

TEST_CASE("strategy slugs round trip") {
    for (Strategy s : kAllStrategies) CHECK(strategy_from_slug(strategy_slug(s)) == s);
    CHECK(strategy_slug(Strategy::TwoStage) == "two-stage");
    CHECK(strategy_slug(Strategy::MinimalContext) == "minimal");
    CHECK_FALSE(strategy_from_slug("Guided").has_value());
    CHECK_FALSE(strategy_from_slug("two_stage").has_value());
}

TEST_CASE("select_exemplars takes the first k items in order") {
    auto corpus = bundled_goldens();
    auto two = select_exemplars(corpus, "rabbit-population", 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0].dh == corpus.find("cigarette-addiction")->dh);
    CHECK(two[1].dh == corpus.find("new-car-inventory")->dh);
    CHECK(two[1].digraph == emit_digraph(corpus.find("new-car-inventory")->ground_truth));
    CHECK(select_exemplars(corpus, std::nullopt, 0).empty());
    CHECK(select_exemplars(corpus, std::nullopt, 4).size() == 4);
    CHECK_THROWS_AS(select_exemplars(corpus, "assignment-backlog", 4), NotEnoughExemplars);
    CHECK(select_exemplars(corpus, "not-an-id", 3)[0].dh == corpus.items()[0].dh);
}

TEST_CASE("baseline prompt is the task sentence and the hypothesis") {
    auto bundle = build_prompt(Strategy::Baseline, "Rabbits breed.", {});
    REQUIRE(bundle.stages.size() == 1);
    CHECK(bundle.stages[0].system_preamble.empty());
    CHECK(bundle.stages[0].body ==
          "Generate a causal loop diagram for the following dynamic hypothesis.\n\nRabbits breed.");
    CHECK(bundle.stages[0].parse_plan == ParsePlan::ExpectDigraph);
    CHECK(bundle.stages[0].body.find("DOT:") == std::string::npos);
}

TEST_CASE("minimal context prompt is exemplar blocks and a cue") {
    std::vector<Exemplar> ex{kOne, kTwo};
    auto bundle = build_prompt(Strategy::MinimalContext, "Target text.", ex);
    REQUIRE(bundle.stages.size() == 1);
    CHECK(bundle.stages[0].body ==
          "Dynamic hypothesis:\nMore a means more b.\nDOT:\ndigraph {\n\"a\" -> \"b\" [arrowhead = vee]\n}\n\n"
          "Dynamic hypothesis:\nMore c means less d.\nDOT:\ndigraph {\n\"c\" -> \"d\" [arrowhead = tee]\n}\n\n"
          "Dynamic hypothesis:\nTarget text.\nDOT:\n");
    CHECK(count(bundle.stages[0].body, "Dynamic hypothesis:") == 3);
}

TEST_CASE("guided prompt leads with the instruction") {
    std::vector<Exemplar> ex{kOne};
    auto bundle = build_prompt(Strategy::GuidedPrompts, "Target text.", ex);
    REQUIRE(bundle.stages.size() == 1);
    CHECK(bundle.stages[0].body == guided_instruction() +
                                       "\n\nDynamic hypothesis:\nMore a means more b.\nDOT:\n"
                                       "digraph {\n\"a\" -> \"b\" [arrowhead = vee]\n}\n\n"
                                       "Dynamic hypothesis:\nTarget text.\nDOT:\n");
}

TEST_CASE("two-stage prompt has a variable stage and a link stage") {
    std::vector<Exemplar> ex{kOne};
    auto bundle = build_prompt(Strategy::TwoStage, "Target text.", ex);
    REQUIRE(bundle.stages.size() == 2);
    CHECK(bundle.stages[0].parse_plan == ParsePlan::ExpectVariableList);
    CHECK(bundle.stages[1].parse_plan == ParsePlan::ExpectDigraph);
    CHECK(bundle.stages[0].body == two_stage_instructions().first +
                                       "\n\nDynamic hypothesis:\nMore a means more b.\nVariable names:\n- a\n- b\n\n"
                                       "Dynamic hypothesis:\nTarget text.\nVariable names:\n");
    CHECK(bundle.stages[1].body == "Variable names:\n- a\n- b\n"
                                   "Dynamic hypothesis:\nMore a means more b.\nDOT:\n"
                                   "digraph {\n\"a\" -> \"b\" [arrowhead = vee]\n}\n\n"
                                   "Variable names:\n{{variables}}Dynamic hypothesis:\nTarget text.\n\n" +
                                       two_stage_instructions().second + "\n\nDOT:\n");

    std::vector<std::string> vars{"x", "y z"};
    auto filled = fill_variable_slot(bundle.stages[1], vars);
    CHECK(filled.body.find("{{variables}}") == std::string::npos);
    CHECK(filled.body.find("Variable names:\n- x\n- y z\nDynamic hypothesis:\nTarget text.") != std::string::npos);
    CHECK(filled.parse_plan == ParsePlan::ExpectDigraph);
}

TEST_CASE("two-stage prompting works without exemplars") {
    auto bundle = build_prompt(Strategy::TwoStage, "Target text.", {});
    REQUIRE(bundle.stages.size() == 2);
    CHECK(bundle.stages[0].body ==
          two_stage_instructions().first + "\n\nDynamic hypothesis:\nTarget text.\nVariable names:\n");
}

TEST_CASE("instructions can move to the system preamble") {
    std::vector<Exemplar> ex{kOne};
    PromptOptions opts{true};
    auto guided = build_prompt(Strategy::GuidedPrompts, "T.", ex, opts);
    CHECK(guided.stages[0].system_preamble == guided_instruction());
    CHECK(guided.stages[0].body.find(guided_instruction()) == std::string::npos);
    CHECK(guided.stages[0].prompt_text() == build_prompt(Strategy::GuidedPrompts, "T.", ex).stages[0].body);

    auto two = build_prompt(Strategy::TwoStage, "T.", ex, opts);
    CHECK(two.stages[0].system_preamble == two_stage_instructions().first);
    CHECK(two.stages[1].system_preamble == two_stage_instructions().second);
    auto minimal = build_prompt(Strategy::MinimalContext, "T.", ex, opts);
    CHECK(minimal.stages[0].system_preamble.empty());
}

TEST_CASE("prompt preconditions") {
    std::vector<Exemplar> ex{kOne};
    CHECK_THROWS_AS(build_prompt(Strategy::Baseline, "T.", ex), PreconditionViolation);
    CHECK_THROWS_AS(build_prompt(Strategy::MinimalContext, "T.", {}), PreconditionViolation);
    CHECK_THROWS_AS(build_prompt(Strategy::GuidedPrompts, "T.", {}), PreconditionViolation);
    CHECK_THROWS_AS(build_prompt(Strategy::MinimalContext, "  \n", ex), PreconditionViolation);
}

TEST_CASE("prompt construction is deterministic") {
    auto corpus = bundled_goldens();
    auto ex = select_exemplars(corpus, "rabbit-population", 3);
    for (Strategy s : {Strategy::MinimalContext, Strategy::GuidedPrompts, Strategy::TwoStage})
        CHECK(build_prompt(s, corpus.items()[0].dh, ex) == build_prompt(s, corpus.items()[0].dh, ex));
}

TEST_CASE("parse_variable_list strips markers and de-duplicates") {
    CHECK(parse_variable_list("1. Smoking\n2. Need for cigarettes\n3. Addiction time") ==
          std::vector<std::string>{"Smoking", "Need for cigarettes", "Addiction time"});
    CHECK(parse_variable_list("- inventory\n- Inventory\n") == std::vector<std::string>{"inventory"});
    CHECK(parse_variable_list("* \"market price\"\n\n  2) 'sales'  \r\n") ==
          std::vector<std::string>{"market price", "sales"});
    CHECK_THROWS_AS(parse_variable_list(""), EmptyVariableList);
    CHECK_THROWS_AS(parse_variable_list("\n - \n\n"), EmptyVariableList);
}
