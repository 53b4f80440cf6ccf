#include "cldforge/llm.hpp"

#include <atomic>
#include <exception>
#include <thread>

namespace cldforge {

namespace {

ParseDiagnostic failure_diagnostic(const std::string& message) { return {1, 1, message, Severity::Error}; }

PromptBundle bundle_for(Strategy strategy, std::string_view dh, const Corpus& corpus, const PipelineOptions& options) {
    std::vector<Exemplar> exemplars;
    if (strategy != Strategy::Baseline) {
        std::optional<std::string_view> exclude;
        if (options.exclude_id) exclude = *options.exclude_id;
        exemplars = select_exemplars(corpus, exclude, options.shots);
    }
    return build_prompt(strategy, dh, exemplars, options.prompt);
}

// Fills `record` stage by stage so a transport failure part-way through
// still leaves every completion received so far in the transcript.
void run_stages(Provider& provider, Strategy strategy, std::string_view dh, const Corpus& corpus,
                const PipelineOptions& options, GenerationRecord& record) {
    const PromptBundle bundle = bundle_for(strategy, dh, corpus, options);

    std::vector<std::string> variables;
    for (const auto& stage : bundle.stages) {
        const StageRequest request = variables.empty() ? stage : fill_variable_slot(stage, variables);
        Completion completion = provider.complete(request);

        record.stage_transcripts.push_back({request.prompt_text(), completion.text});
        auto& meta = record.provider_meta;
        meta.latency += completion.latency;
        if (completion.prompt_tokens) meta.prompt_tokens = meta.prompt_tokens.value_or(0) + *completion.prompt_tokens;
        if (completion.completion_tokens)
            meta.completion_tokens = meta.completion_tokens.value_or(0) + *completion.completion_tokens;

        if (request.parse_plan == ParsePlan::ExpectVariableList) {
            try {
                variables = parse_variable_list(completion.text);
            } catch (const EmptyVariableList& e) {
                record.diagnostics.push_back(failure_diagnostic(e.what()));
                return;
            }
            continue;
        }

        std::string block;
        try {
            block = extract_digraph_block(completion.text);
        } catch (const NoDigraphFound& e) {
            record.diagnostics.push_back(failure_diagnostic(e.what()));
            return;
        }
        auto parsed = parse_digraph(block, ParseMode::Lenient);
        record.diagram = std::move(parsed.diagram);
        for (auto& d : parsed.diagnostics) record.diagnostics.push_back(std::move(d));
    }
}

GenerationRecord blank_record(const Provider& provider, Strategy strategy, std::string_view dh) {
    GenerationRecord record;
    record.strategy = strategy;
    record.dh = std::string(dh);
    record.provider_meta.model_id = provider.model_id();
    return record;
}

} // namespace

GenerationRecord run_pipeline(Provider& provider, Strategy strategy, std::string_view dh, const Corpus& corpus,
                              const PipelineOptions& options) {
    GenerationRecord record = blank_record(provider, strategy, dh);
    run_stages(provider, strategy, dh, corpus, options, record);
    return record;
}

std::vector<GenerationRecord> batch_generate(Provider& provider, Strategy strategy, const Corpus& corpus,
                                             std::size_t shots, std::size_t parallelism, PromptOptions prompt) {
    if (parallelism == 0) throw PreconditionViolation("parallelism must be at least 1");
    const auto& items = corpus.items();
    std::vector<GenerationRecord> records(items.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            const auto& item = items[i];
            GenerationRecord record = blank_record(provider, strategy, item.dh);
            record.item_id = item.id;
            try {
                run_stages(provider, strategy, item.dh, corpus, {shots, item.id, prompt}, record);
            } catch (const TransportError& e) {
                record.error_note = e.what();
            } catch (...) {
                std::lock_guard lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
            }
            records[i] = std::move(record);
        }
    };

    // Each worker has at most one provider call outstanding.
    std::vector<std::thread> pool;
    const std::size_t workers = std::min(parallelism, std::max<std::size_t>(items.size(), 1));
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (fatal) std::rethrow_exception(fatal);
    return records;
}

void write_reference_fixtures(const std::filesystem::path& dir, const Corpus& corpus, Strategy strategy,
                              std::size_t shots, PromptOptions prompt) {
    for (const auto& item : corpus.items()) {
        const PromptBundle bundle = bundle_for(strategy, item.dh, corpus, {shots, item.id, prompt});
        std::vector<std::string> variables;
        for (const auto& v : item.ground_truth.variables()) variables.push_back(v.raw());
        for (const auto& stage : bundle.stages) {
            if (stage.parse_plan == ParsePlan::ExpectVariableList) {
                std::string list;
                for (const auto& v : variables) list += "- " + v + "\n";
                write_mock_fixture(dir, stage.prompt_text(), list);
            } else {
                const StageRequest request =
                    bundle.stages.size() > 1 ? fill_variable_slot(stage, variables) : stage;
                write_mock_fixture(dir, request.prompt_text(), emit_digraph(item.ground_truth));
            }
        }
    }
}

} // namespace cldforge
