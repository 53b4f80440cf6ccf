// Serial reference versus OpenMP kernels.

#include "cldforge/evaluator.hpp"
#include "cldforge/loops.hpp"
#include "cldforge/record.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace cldforge;

namespace {

// Dense random digraph over n variables with a fixed link probability.
CausalLoopDiagram dense_diagram(std::size_t n, double p, unsigned seed) {
    std::mt19937 rng(seed);
    std::bernoulli_distribution edge(p), negative(0.4);
    std::vector<Link> links;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && edge(rng))
                links.push_back({VariableName("v" + std::to_string(i)), VariableName("v" + std::to_string(j)),
                                 negative(rng) ? Polarity::Negative : Polarity::Positive});
    return build_diagram(std::move(links));
}

struct BatchInput {
    Corpus corpus;
    std::vector<GenerationRecord> records;
};

BatchInput batch_input(std::size_t items) {
    std::vector<CorpusItem> corpus_items;
    std::vector<GenerationRecord> records;
    for (std::size_t i = 0; i < items; ++i) {
        CorpusItem item;
        item.id = "item-" + std::to_string(i);
        item.dh = "hypothesis";
        item.source = "bench";
        item.ground_truth = dense_diagram(10, 0.25, static_cast<unsigned>(i));
        GenerationRecord record;
        record.item_id = item.id;
        record.diagram = dense_diagram(10, 0.25, static_cast<unsigned>(i + 1000));
        corpus_items.push_back(std::move(item));
        records.push_back(std::move(record));
    }
    return {Corpus(std::move(corpus_items)), std::move(records)};
}

void BM_LoopsSerial(benchmark::State& state) {
    const auto d = dense_diagram(static_cast<std::size_t>(state.range(0)), 0.3, 1);
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_loops_serial(d, 1'000'000));
}

void BM_LoopsParallel(benchmark::State& state) {
    const auto d = dense_diagram(static_cast<std::size_t>(state.range(0)), 0.3, 1);
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_loops(d, 1'000'000));
}

void BM_BatchReportSerial(benchmark::State& state) {
    const auto input = batch_input(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(batch_report_serial(input.records, input.corpus));
}

void BM_BatchReportParallel(benchmark::State& state) {
    const auto input = batch_input(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(batch_report(input.records, input.corpus));
}

} // namespace

BENCHMARK(BM_LoopsSerial)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LoopsParallel)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchReportSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchReportParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
