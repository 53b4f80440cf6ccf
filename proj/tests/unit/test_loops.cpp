#include <doctest.h>

#include "cldforge/corpus.hpp"
#include "cldforge/loops.hpp"
#include "oracles.hpp"

#include <map>
#include <random>

using namespace cldforge;

namespace {

Link link(const char* s, const char* t, Polarity p = Polarity::Positive) {
    return {VariableName(s), VariableName(t), p};
}

std::map<oracle::Cycle, LoopKind> as_map(const std::vector<FeedbackLoop>& loops) {
    std::map<oracle::Cycle, LoopKind> out;
    for (const auto& loop : loops) {
        oracle::Cycle c;
        for (const auto& m : loop.members()) c.push_back(m.normalized());
        out[c] = loop.kind;
    }
    return out;
}

CausalLoopDiagram complete_digraph(int n) {
    std::vector<Link> links;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) links.push_back(link(("v" + std::to_string(i)).c_str(), ("v" + std::to_string(j)).c_str()));
    return build_diagram(std::move(links));
}

} // namespace

TEST_CASE("rabbit diagram has one two-member reinforcing loop") {
    auto d = build_diagram({link("births", "rabbit population"), link("rabbit population", "births"),
                            link("birth fraction", "births")});
    auto loops = enumerate_loops(d);
    REQUIRE(loops.size() == 1);
    CHECK(loops[0].length() == 2);
    CHECK(loops[0].kind == LoopKind::Reinforcing);
    // Rotated to start at the smallest normalized name.
    CHECK(loops[0].members()[0].normalized() == "births");
}

TEST_CASE("acyclic and empty diagrams have no loops") {
    CHECK(enumerate_loops(CausalLoopDiagram{}).empty());
    CHECK(enumerate_loops(build_diagram({link("a", "b"), link("b", "c"), link("a", "c")})).empty());
}

TEST_CASE("self-loops are length-one loops") {
    auto loops = enumerate_loops(build_diagram({link("habit", "habit", Polarity::Negative), link("habit", "x")}));
    REQUIRE(loops.size() == 1);
    CHECK(loops[0].length() == 1);
    CHECK(loops[0].kind == LoopKind::Balancing);
}

TEST_CASE("loops are ordered by length then member names") {
    auto d = build_diagram({link("c", "d"), link("d", "c"), link("a", "b"), link("b", "c"), link("c", "a"),
                            link("a", "a")});
    auto loops = enumerate_loops(d);
    REQUIRE(loops.size() == 3);
    CHECK(loops[0].length() == 1);
    CHECK(loops[1].length() == 2);
    CHECK(loops[1].members()[0].normalized() == "c");
    CHECK(loops[2].length() == 3);
    CHECK(loops[2].members()[0].normalized() == "a");
}

TEST_CASE("bundled goldens have the expected loop structure") {
    auto corpus = bundled_goldens();
    std::map<std::string, std::vector<ExpectedLoop>> want{
        {"rabbit-population", {{2, LoopKind::Reinforcing}}},
        {"cigarette-addiction", {{2, LoopKind::Reinforcing}}},
        {"new-car-inventory", {{3, LoopKind::Balancing}, {3, LoopKind::Balancing}}},
        {"assignment-backlog", {{4, LoopKind::Balancing}, {4, LoopKind::Balancing}}},
    };
    for (const auto& item : corpus.items()) {
        CAPTURE(item.id);
        CHECK(loop_signature(item.ground_truth) == want.at(item.id));
    }
}

TEST_CASE("enumeration matches exhaustive DFS on random graphs") {
    std::mt19937 rng(20240611);
    for (int trial = 0; trial < 300; ++trial) {
        auto d = oracle::random_diagram(rng, {});
        CAPTURE(trial);
        auto loops = enumerate_loops(d);
        CHECK(as_map(loops) == oracle::all_cycles(d));
        for (const auto& loop : loops) CHECK(classify_loop(loop.links) == loop.kind);
    }
}

TEST_CASE("parallel enumeration equals the serial reference") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        auto d = oracle::random_diagram(rng, {8, 24, true, true});
        CHECK(enumerate_loops(d) == enumerate_loops_serial(d));
    }
    auto big = complete_digraph(6);
    CHECK(enumerate_loops(big) == enumerate_loops_serial(big));
}

TEST_CASE("enumeration is invariant under link order") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        auto d = oracle::random_diagram(rng, {});
        CHECK(as_map(enumerate_loops(d)) == as_map(enumerate_loops(oracle::shuffled(d, rng))));
    }
}

TEST_CASE("loop count bound raises TooManyLoops") {
    // The complete digraph on 8 vertices has 16,064 simple cycles.
    auto big = complete_digraph(8);
    CHECK_THROWS_AS(enumerate_loops(big), TooManyLoops);
    CHECK_THROWS_AS(enumerate_loops_serial(big), TooManyLoops);
    auto small = complete_digraph(4);  // 20 cycles
    CHECK(enumerate_loops(small).size() == 20);
    CHECK(enumerate_loops(small, 20).size() == 20);
    CHECK_THROWS_AS(enumerate_loops(small, 19), TooManyLoops);
    CHECK_THROWS_AS(enumerate_loops_serial(small, 19), TooManyLoops);
}
