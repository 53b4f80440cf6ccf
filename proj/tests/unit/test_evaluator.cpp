#include <doctest.h>

#include "cldforge/evaluator.hpp"
#include "cldforge/json_codec.hpp"
#include "cldforge/record.hpp"
#include "oracles.hpp"
#include "paths.hpp"
#include "schema.hpp"

#include <algorithm>
#include <random>

using namespace cldforge;

namespace {

Link lnk(const char* s, const char* t, Polarity p = Polarity::Positive) {
    return {VariableName(s), VariableName(t), p};
}

CausalLoopDiagram car_truth() { return bundled_goldens().find("new-car-inventory")->ground_truth; }

// Truth with market price -> retail sales flipped to positive and
// retail sales -> inventory removed.
CausalLoopDiagram car_variant() {
    const auto truth = car_truth();
    std::vector<Link> links;
    for (auto l : truth.links()) {
        if (l.source.normalized() == "retail sales" && l.target.normalized() == "inventory") continue;
        if (l.source.normalized() == "market price" && l.target.normalized() == "retail sales")
            l.polarity = Polarity::Positive;
        links.push_back(l);
    }
    return build_diagram(std::move(links));
}

std::vector<std::string> names(const CausalLoopDiagram& d) {
    std::vector<std::string> out;
    for (const auto& v : d.variables()) out.push_back(v.raw());
    return out;
}

void check_bounds(const PrecisionRecall& pr) {
    for (double v : {pr.precision, pr.recall, pr.f1}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    const double f1 = pr.precision + pr.recall == 0.0 ? 0.0
                                                      : 2 * pr.precision * pr.recall / (pr.precision + pr.recall);
    CHECK(pr.f1 == f1);
}

void check_all_ones(const EvalReport& r) {
    for (const auto* pr : {&r.node, &r.link_strict, &r.link_lenient}) {
        CHECK(pr->precision == 1.0);
        CHECK(pr->recall == 1.0);
        CHECK(pr->f1 == 1.0);
    }
    CHECK(r.loops.loop_count_match);
    CHECK(r.loops.loop_kind_multiset_match);
}

} // namespace

TEST_CASE("edit distance agrees with the reference routine") {
    CHECK(edit_distance("kitten", "sitting") == 3);
    CHECK(edit_distance("", "abc") == 3);
    CHECK(edit_distance("abc", "abc") == 0);
    CHECK(edit_distance("qualité", "qualite") == 1);
    CHECK(edit_distance("日本", "日本語") == 1);

    std::mt19937 rng(1);
    const std::vector<std::string> alphabet{"a", "b", "c", " ", "é", "ß", "語"};
    for (int trial = 0; trial < 2000; ++trial) {
        std::string a, b;
        for (int i = rng() % 9; i > 0; --i) a += alphabet[rng() % alphabet.size()];
        for (int i = rng() % 9; i > 0; --i) b += alphabet[rng() % alphabet.size()];
        CAPTURE(a);
        CAPTURE(b);
        CHECK(edit_distance(a, b) == oracle::levenshtein(a, b));
        CHECK(name_similarity(a, b) == doctest::Approx(oracle::similarity(a, b)).epsilon(1e-15));
    }
}

TEST_CASE("name similarity examples") {
    CHECK(name_similarity("Market Price", "market price") == 1.0);
    CHECK(name_similarity("a", "b") == 0.0);
    CHECK(name_similarity("", "  ") == 1.0);
    // 26 insertions turn the 9-character name into the 35-character one.
    CHECK(oracle::levenshtein("inventory", "inventory of cars at the dealership") == 26);
    CHECK(name_similarity("inventory", "inventory of cars at the dealership") ==
          doctest::Approx(1.0 - 26.0 / 35.0).epsilon(1e-12));
    CHECK(name_similarity("inventory", "inventory of cars at the dealership") < kDefaultThreshold);
}

TEST_CASE("identical diagrams match every variable") {
    auto d = car_truth();
    auto m = match_nodes(d, d, kDefaultThreshold);
    CHECK(m.pairs.size() == 4);
    CHECK(m.unmatched_generated.empty());
    CHECK(m.unmatched_truth.empty());
    for (const auto& p : m.pairs) CHECK(p.similarity == 1.0);
}

TEST_CASE("a truncated name stays unmatched") {
    auto gen = build_diagram({lnk("inventory", "x")});
    auto truth = build_diagram({lnk("inventory of cars at the dealership", "x")});
    auto m = match_nodes(gen, truth, 0.8);
    CHECK(m.pairs.size() == 1);  // only "x"
    REQUIRE(m.unmatched_generated.size() == 1);
    CHECK(m.unmatched_generated[0].normalized() == "inventory");
    REQUIRE(m.unmatched_truth.size() == 1);
}

TEST_CASE("an exact match outscores a partial one") {
    auto gen = build_diagram({lnk("price", "market price")});
    auto truth = build_diagram({lnk("market price", "market price")});
    auto m = match_nodes(gen, truth, 0.3);
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0].generated.normalized() == "market price");
    CHECK(m.pairs[0].truth.normalized() == "market price");
    REQUIRE(m.unmatched_generated.size() == 1);
    CHECK(m.unmatched_generated[0].normalized() == "price");
    // Both assignments enumerated: exact pair 1.0 versus "price" pair below 1.0.
    CHECK(oracle::best_assignment({"price", "market price"}, {"market price"}, 0.3).total == 1.0);
}

TEST_CASE("ties prefer lexicographically smaller pairs") {
    // "ab" and "ac" are equally similar to "ax" and "ay".
    auto gen = build_diagram({lnk("ab", "ac")});
    auto truth = build_diagram({lnk("ay", "ax")});
    auto m = match_nodes(gen, truth, 0.5);
    REQUIRE(m.pairs.size() == 2);
    CHECK(m.pairs[0].generated.normalized() == "ab");
    CHECK(m.pairs[0].truth.normalized() == "ax");
    CHECK(m.pairs[1].generated.normalized() == "ac");
    CHECK(m.pairs[1].truth.normalized() == "ay");
}

TEST_CASE("matching total equals exhaustive assignment") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> threshold(0.2, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        auto gen = oracle::random_diagram(rng, {6, 8, true, true});
        auto truth = oracle::random_diagram(rng, {6, 8, true, true});
        const double t = threshold(rng);
        auto m = match_nodes(gen, truth, t);
        auto best = oracle::best_assignment(names(gen), names(truth), t);
        CAPTURE(trial);
        CHECK(m.total_similarity() == doctest::Approx(best.total).epsilon(1e-12));
        for (const auto& p : m.pairs) {
            CHECK(p.similarity >= t);
            CHECK(p.similarity == doctest::Approx(oracle::similarity(p.generated.raw(), p.truth.raw())));
        }
        CHECK(m.pairs.size() + m.unmatched_generated.size() == gen.variables().size());
        CHECK(m.pairs.size() + m.unmatched_truth.size() == truth.variables().size());
    }
}

TEST_CASE("raising the threshold never adds pairs") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        auto gen = oracle::random_diagram(rng, {6, 8, true, true});
        auto truth = oracle::random_diagram(rng, {6, 8, true, true});
        std::size_t previous = SIZE_MAX;
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 1.0}) {
            auto pairs = match_nodes(gen, truth, t).pairs.size();
            CHECK(pairs <= previous);
            previous = pairs;
        }
    }
}

TEST_CASE("precision_recall conventions") {
    auto pr = precision_recall(3, 4, 5);
    CHECK(pr.precision == 0.75);
    CHECK(pr.recall == 0.6);
    CHECK(pr.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(precision_recall(0, 0, 0) == PrecisionRecall{1.0, 1.0, 1.0});
    auto empty_generated = precision_recall(0, 0, 3);
    CHECK(empty_generated.precision == 1.0);
    CHECK(empty_generated.recall == 0.0);
    CHECK(empty_generated.f1 == doctest::Approx(0.0));
    CHECK(precision_recall(0, 2, 2).f1 == 0.0);
}

TEST_CASE("perturbed car diagram scores") {
    auto truth = car_truth();
    auto gen = car_variant();
    auto r = evaluate(gen, truth, 0.8);

    CHECK(r.node.f1 == 1.0);
    CHECK(r.link_strict.precision == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(r.link_strict.recall == doctest::Approx(0.60).epsilon(1e-9));
    CHECK(std::abs(r.link_strict.f1 - 2.0 / 3.0) < 1e-9);
    CHECK(r.link_lenient.precision == 1.0);
    CHECK(r.link_lenient.recall == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(std::abs(r.link_lenient.f1 - 0.889) < 1e-3);
    REQUIRE(r.polarity_accuracy.has_value());
    CHECK(*r.polarity_accuracy == 0.75);
    CHECK(r.strict_matches == 3);
    CHECK(r.lenient_matches == 4);

    // Exhaustive pairwise comparison under the oracle's node assignment.
    auto best = oracle::best_assignment(names(gen), names(truth), 0.8);
    auto counts = oracle::pairwise_link_counts(gen, truth, best.pairs);
    CHECK(counts.strict == 3);
    CHECK(counts.lenient == 4);
    CHECK(counts.generated == 4);
    CHECK(counts.truth == 5);
    CHECK(r.link_strict.precision == static_cast<double>(counts.strict) / counts.generated);
    CHECK(r.link_strict.recall == static_cast<double>(counts.strict) / counts.truth);
}

TEST_CASE("link metrics agree with pairwise counts on random pairs") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 300; ++trial) {
        auto truth = oracle::random_diagram(rng, {6, 12, true, false});
        // Derive a generated diagram by renaming, dropping and flipping links.
        std::vector<Link> links;
        for (auto l : truth.links()) {
            if (rng() % 5 == 0) continue;
            if (rng() % 4 == 0) l.polarity = l.polarity == Polarity::Positive ? Polarity::Negative : Polarity::Positive;
            if (rng() % 6 == 0) std::swap(l.source, l.target);
            links.push_back(l);
        }
        if (links.empty()) continue;
        DiagramBuilder builder;
        for (auto& l : links) builder.add(std::move(l));
        auto gen = std::move(builder).build();

        auto r = evaluate(gen, truth, 0.8);
        std::vector<std::pair<std::string, std::string>> mapping;
        for (const auto& p : r.matching.pairs) mapping.emplace_back(p.generated.normalized(), p.truth.normalized());
        auto counts = oracle::pairwise_link_counts(gen, truth, mapping);
        CHECK(r.strict_matches == counts.strict);
        CHECK(r.lenient_matches == counts.lenient);
        CHECK(r.link_strict == precision_recall(counts.strict, counts.generated, counts.truth));
        CHECK(r.link_lenient == precision_recall(counts.lenient, counts.generated, counts.truth));
        CHECK(r.link_strict.precision <= r.link_lenient.precision);
        CHECK(r.link_strict.recall <= r.link_lenient.recall);
        check_bounds(r.node);
        check_bounds(r.link_strict);
        check_bounds(r.link_lenient);
    }
}

TEST_CASE("reversed links are misses") {
    auto truth = build_diagram({lnk("a", "b")});
    auto gen = build_diagram({lnk("b", "a")});
    auto r = evaluate(gen, truth);
    CHECK(r.node.f1 == 1.0);
    CHECK(r.link_lenient.f1 == 0.0);
    CHECK_FALSE(r.polarity_accuracy.has_value());
}

TEST_CASE("self-evaluation is perfect") {
    auto corpus = bundled_goldens();
    for (const auto& item : corpus.items()) {
        auto r = evaluate(item.ground_truth, item.ground_truth, 0.8);
        check_all_ones(r);
        CHECK(r.polarity_accuracy == 1.0);
    }
    std::mt19937 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        auto d = oracle::random_diagram(rng, {8, 20, true, true});
        for (double t : {0.05, 0.8, 1.0}) check_all_ones(evaluate(d, d, t));
    }
}

TEST_CASE("empty generated diagram against a truth") {
    auto truth = bundled_goldens().items()[0].ground_truth;
    auto r = evaluate(CausalLoopDiagram{}, truth);
    CHECK(r.node.recall == 0.0);
    CHECK(r.link_strict.recall == 0.0);
    CHECK(r.node.precision == 1.0);
    CHECK(r.link_strict.precision == 1.0);
    CHECK(r.link_lenient.precision == 1.0);
    CHECK(r.node.f1 == 0.0);
    CHECK(r.link_strict.f1 == 0.0);
    CHECK_FALSE(r.polarity_accuracy.has_value());
    CHECK_FALSE(r.loops.loop_count_match);
    check_all_ones(evaluate(CausalLoopDiagram{}, CausalLoopDiagram{}));
}

TEST_CASE("loop comparison uses length and kind multisets") {
    auto truth = car_truth();
    auto r = evaluate(car_variant(), truth);
    // The variant keeps one 3-loop (production, inventory, price) and loses
    // the sales loop.
    CHECK(r.loops.truth.size() == 2);
    CHECK(r.loops.generated.size() == 1);
    CHECK_FALSE(r.loops.loop_count_match);
    CHECK_FALSE(r.loops.loop_kind_multiset_match);

    auto a = build_diagram({lnk("a", "b"), lnk("b", "a", Polarity::Negative)});
    auto b = build_diagram({lnk("x", "y", Polarity::Negative), lnk("y", "x")});
    auto same = evaluate(a, b);
    CHECK(same.loops.loop_count_match);
    CHECK(same.loops.loop_kind_multiset_match);
    auto c = build_diagram({lnk("x", "y"), lnk("y", "x")});
    auto kinds = evaluate(a, c);
    CHECK(kinds.loops.loop_count_match);
    CHECK_FALSE(kinds.loops.loop_kind_multiset_match);
}

TEST_CASE("evaluation is invariant under variable and link order") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 200; ++trial) {
        auto gen = oracle::random_diagram(rng, {6, 10, true, true});
        auto truth = oracle::random_diagram(rng, {6, 10, true, true});
        auto r = evaluate(gen, truth);
        CHECK(evaluate(oracle::shuffled(gen, rng), oracle::shuffled(truth, rng)) == r);
    }
}

namespace {

GenerationRecord perfect(const CorpusItem& item) {
    GenerationRecord r;
    r.item_id = item.id;
    r.dh = item.dh;
    r.diagram = item.ground_truth;
    return r;
}

} // namespace

TEST_CASE("batch report over perfect records") {
    auto corpus = bundled_goldens();
    std::vector<GenerationRecord> records;
    for (const auto& item : corpus.items()) records.push_back(perfect(item));
    auto report = batch_report(records, corpus);
    REQUIRE(report.items.size() == 4);
    CHECK(report.aggregate.node.f1 == 1.0);
    CHECK(report.aggregate.link_strict.f1 == 1.0);
    CHECK(report.aggregate.link_lenient.f1 == 1.0);
    CHECK(report.aggregate.polarity_accuracy == 1.0);
    CHECK(report.aggregate.loop_count_match_rate == 1.0);
    CHECK(report.aggregate.no_digraph_count == 0);
    CHECK(report.threshold == kDefaultThreshold);
}

TEST_CASE("batch report counts no-digraph records as zero recall") {
    auto corpus = bundled_goldens();
    std::vector<GenerationRecord> records;
    for (const auto& item : corpus.items()) records.push_back(perfect(item));
    records[1].diagram.reset();
    auto report = batch_report(records, corpus);
    CHECK(report.aggregate.no_digraph_count == 1);
    CHECK(report.aggregate.link_strict.recall == doctest::Approx(0.75));
    CHECK(report.items[1].no_digraph);
    CHECK(report.items[1].metrics.link_strict.recall == 0.0);
    CHECK(report.aggregate.polarity_accuracy == 1.0);

    records[2].diagram.reset();
    records[2].error_note = "timed out";
    report = batch_report(records, corpus);
    CHECK(report.aggregate.error_count == 1);
    CHECK(report.items[2].error == "timed out");
}

TEST_CASE("batch report rejects misaligned records") {
    auto corpus = bundled_goldens();
    std::vector<GenerationRecord> records;
    for (const auto& item : corpus.items()) records.push_back(perfect(item));
    auto shuffled = records;
    std::swap(shuffled[0], shuffled[3]);
    CHECK_THROWS_AS(batch_report(shuffled, corpus), AlignmentError);
    CHECK_THROWS_AS(batch_report_serial(shuffled, corpus), AlignmentError);
    records.pop_back();
    CHECK_THROWS_AS(batch_report(records, corpus), AlignmentError);
}

TEST_CASE("parallel batch report equals the serial reference") {
    std::mt19937 rng(41);
    std::vector<CorpusItem> items;
    std::vector<GenerationRecord> records;
    for (int i = 0; i < 40; ++i) {
        CorpusItem item;
        item.id = "item-" + std::to_string(i);
        item.dh = "hypothesis " + std::to_string(i);
        item.source = "random";
        item.ground_truth = oracle::random_diagram(rng, {8, 16, true, false});
        GenerationRecord r;
        r.item_id = item.id;
        if (i % 7 != 3) r.diagram = oracle::random_diagram(rng, {8, 16, true, true});
        items.push_back(std::move(item));
        records.push_back(std::move(r));
    }
    Corpus corpus(std::move(items));
    for (double t : {0.5, 0.8}) CHECK(batch_report(records, corpus, t) == batch_report_serial(records, corpus, t));
}

TEST_CASE("evaluation reports conform to the schema") {
    schema::Validator validator(testing::source_dir() / "schemas");
    auto corpus = bundled_goldens();
    auto r = evaluate(car_variant(), car_truth());
    CHECK(validator.errors("eval_report.schema.json", nlohmann::json::parse(to_json(r).dump())).empty());
    auto none = evaluate(build_diagram({lnk("a", "b")}), build_diagram({lnk("b", "a")}));
    CHECK(validator.errors("eval_report.schema.json", nlohmann::json::parse(to_json(none).dump())).empty());

    std::vector<GenerationRecord> records;
    for (const auto& item : corpus.items()) records.push_back(perfect(item));
    records[0].diagram.reset();
    auto report = batch_report(records, corpus);
    CHECK(validator.errors("aggregate_report.schema.json", nlohmann::json::parse(to_json(report).dump())).empty());
}
