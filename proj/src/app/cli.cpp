#include "cldforge/cli.hpp"

#include "cldforge/corpus.hpp"
#include "cldforge/dot.hpp"
#include "cldforge/evaluator.hpp"
#include "cldforge/json_codec.hpp"
#include "cldforge/llm.hpp"
#include "cldforge/loops.hpp"
#include "cldforge/prompting.hpp"
#include "cldforge/service.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cldforge {

namespace {

struct ProviderFlags {
    std::string provider;  // "", "mock" or "live"
    std::string fixtures;
    std::string config;
    std::string record;
};

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw Error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

std::string read_input(const std::string& path, std::istream& in) {
    if (path != "-") return read_file(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

// Writes text to --out when given, stdout otherwise.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("cannot write '" + path + "'");
    file << text;
}

ServiceConfig base_config(const std::string& explicit_path) {
    if (!explicit_path.empty()) return load_service_config(explicit_path);
    if (const char* env = std::getenv("CLDFORGE_CONFIG"); env && *env) return load_service_config(env);
    return {};
}

void apply_provider_flags(const ProviderFlags& flags, ServiceConfig& config) {
    if (flags.provider == "live")
        config.provider_kind = ProviderKind::Live;
    else if (flags.provider == "mock")
        config.provider_kind = ProviderKind::Mock;
    else if (!flags.provider.empty())
        throw BadConfig("--provider must be live or mock");
    if (!flags.fixtures.empty()) config.mock_dir = flags.fixtures;
}

std::shared_ptr<Provider> provider_from(const ProviderFlags& flags, const ServiceConfig& config) {
    auto provider = make_provider(config.provider_kind, config.provider, config.mock_dir);
    if (!flags.record.empty()) provider = std::make_shared<RecordingProvider>(provider, flags.record);
    return provider;
}

Corpus corpus_from(const std::string& path, const ServiceConfig& config) {
    if (!path.empty()) return load_corpus(path);
    if (config.corpus_path) return load_corpus(*config.corpus_path);
    return bundled_goldens();
}

std::vector<Strategy> parse_strategies(const std::string& list) {
    std::vector<Strategy> out;
    std::stringstream ss(list);
    std::string slug;
    while (std::getline(ss, slug, ',')) {
        slug = trim(slug);
        auto s = strategy_from_slug(slug);
        if (!s) throw PreconditionViolation("unknown strategy '" + slug + "'");
        if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
    }
    if (out.empty()) throw PreconditionViolation("no strategies given");
    return out;
}

void add_provider_flags(CLI::App& cmd, ProviderFlags& flags) {
    cmd.add_option("--provider", flags.provider, "live or mock (default from config, else mock)");
    cmd.add_option("--fixtures", flags.fixtures, "Mock fixture directory");
    cmd.add_option("--config", flags.config, "Config file (defaults to $CLDFORGE_CONFIG)");
    cmd.add_option("--record", flags.record, "Also store each completion as a mock fixture in this directory");
}

std::string strategy_list() {
    std::string out;
    for (Strategy s : kAllStrategies) out += (out.empty() ? "" : ", ") + std::string(strategy_slug(s));
    return out;
}

std::string report_table(const EvalReport& r) {
    std::ostringstream t;
    auto row = [&](const char* name, const PrecisionRecall& pr) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-14s %9.3f %9.3f %9.3f\n", name, pr.precision, pr.recall, pr.f1);
        t << buf;
    };
    auto signature = [](const std::vector<ExpectedLoop>& loops) {
        std::string s;
        for (const auto& l : loops)
            s += (s.empty() ? "" : " ") + std::string(1, to_string(l.kind)[0]) + std::to_string(l.length);
        return s.empty() ? std::string("none") : s;
    };
    t << "metric         precision    recall        f1\n";
    row("node", r.node);
    row("link_strict", r.link_strict);
    row("link_lenient", r.link_lenient);
    t << "polarity_accuracy " << (r.polarity_accuracy ? fixed3(*r.polarity_accuracy) : std::string("n/a")) << "\n";
    t << "loops generated " << signature(r.loops.generated) << "; truth " << signature(r.loops.truth) << "\n";
    t << "loop_count_match " << (r.loops.loop_count_match ? "yes" : "no") << "; loop_kind_multiset_match "
      << (r.loops.loop_kind_multiset_match ? "yes" : "no") << (r.loops.overflow ? " (loop limit exceeded)" : "")
      << "\n";
    for (const auto& p : r.matching.pairs)
        t << "match " << p.generated.raw() << " = " << p.truth.raw() << " (" << fixed3(p.similarity) << ")\n";
    for (const auto& v : r.matching.unmatched_generated) t << "extra " << v.raw() << "\n";
    for (const auto& v : r.matching.unmatched_truth) t << "missing " << v.raw() << "\n";
    return t.str();
}

std::string render(const CausalLoopDiagram& diagram, std::ostream& err) {
    try {
        return emit_render_dot(diagram, true);
    } catch (const TooManyLoops& e) {
        err << "warning: " << e.what() << "; loop labels omitted\n";
        return emit_render_dot(diagram, false);
    }
}

// Strict parse with "file:line:column: error: message" on failure.
CausalLoopDiagram parse_file(const std::string& path, std::istream& in) {
    const std::string text = read_input(path, in);
    try {
        return parse_digraph(text, ParseMode::Strict).diagram;
    } catch (const SyntaxError& e) {
        throw Error(path + ":" + e.diagnostic().to_string());
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Causal loop diagram generation and evaluation", "cldforge"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a diagram from a dynamic hypothesis");
    std::string gen_dh, gen_strategy, gen_corpus, gen_out, gen_format = "digraph";
    std::size_t gen_shots = kDefaultShots;
    bool gen_system = false;
    ProviderFlags gen_flags;
    gen->add_option("--dh", gen_dh, "Hypothesis file, or - for stdin")->required();
    gen->add_option("--strategy", gen_strategy, strategy_list())->required();
    gen->add_option("--corpus", gen_corpus, "Exemplar corpus (default: bundled goldens)");
    gen->add_option("--shots", gen_shots, "Exemplars per prompt");
    gen->add_option("--out", gen_out, "Output file (default: stdout)");
    gen->add_option("--format", gen_format, "digraph, dot or json")
        ->check(CLI::IsMember({"digraph", "dot", "json"}));
    gen->add_flag("--system-instructions", gen_system, "Send instructions as a system message");
    add_provider_flags(*gen, gen_flags);

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Score a generated diagram against a ground truth");
    std::string ev_generated, ev_truth, ev_corpus, ev_format = "table", ev_out;
    double ev_threshold = kDefaultThreshold;
    ev->add_option("--generated", ev_generated, "Generated digraph file, or - for stdin")->required();
    ev->add_option("--truth", ev_truth, "Ground-truth digraph file or corpus item id")->required();
    ev->add_option("--threshold", ev_threshold, "Name similarity threshold in (0, 1]");
    ev->add_option("--format", ev_format, "table or json")->check(CLI::IsMember({"table", "json"}));
    ev->add_option("--corpus", ev_corpus, "Corpus for item ids (default: bundled goldens)");
    ev->add_option("--out", ev_out, "Output file (default: stdout)");

    // batch
    auto* batch = app.add_subcommand("batch", "Generate and score every corpus item per strategy");
    std::string batch_corpus, batch_strategies = "baseline,minimal,guided,two-stage", batch_out;
    std::size_t batch_parallelism = 4, batch_shots = kDefaultShots;
    double batch_threshold = kDefaultThreshold;
    ProviderFlags batch_flags;
    batch->add_option("--corpus", batch_corpus, "Corpus file (default: bundled goldens)");
    batch->add_option("--strategies", batch_strategies, "Comma-separated strategies");
    batch->add_option("--parallelism", batch_parallelism, "Concurrent provider calls");
    batch->add_option("--shots", batch_shots, "Exemplars per prompt");
    batch->add_option("--threshold", batch_threshold, "Name similarity threshold in (0, 1]");
    batch->add_option("--out", batch_out, "Report file (default: stdout)");
    add_provider_flags(*batch, batch_flags);

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP JSON service");
    std::string serve_listen, serve_corpus;
    ProviderFlags serve_flags;
    serve->add_option("--listen", serve_listen, "host:port (overrides config)");
    serve->add_option("--corpus", serve_corpus, "Corpus file (overrides config)");
    add_provider_flags(*serve, serve_flags);

    // render
    auto* ren = app.add_subcommand("render", "Convert a digraph to Graphviz DOT with loop labels");
    std::string ren_in = "-", ren_out;
    bool ren_plain = false;
    ren->add_option("--in", ren_in, "Digraph file, or - for stdin");
    ren->add_option("--out", ren_out, "Output file (default: stdout)");
    ren->add_flag("--no-loops", ren_plain, "Omit loop labels");

    // prompt
    auto* pr = app.add_subcommand("prompt", "Print the prompt text of each stage");
    std::string pr_dh, pr_strategy, pr_corpus;
    std::size_t pr_shots = kDefaultShots;
    bool pr_keys = false, pr_system = false;
    pr->add_option("--dh", pr_dh, "Hypothesis file, or - for stdin")->required();
    pr->add_option("--strategy", pr_strategy, strategy_list())->required();
    pr->add_option("--corpus", pr_corpus, "Exemplar corpus (default: bundled goldens)");
    pr->add_option("--shots", pr_shots, "Exemplars per prompt");
    pr->add_flag("--keys", pr_keys, "Print only the mock fixture key of each stage");
    pr->add_flag("--system-instructions", pr_system, "Send instructions as a system message");

    // fixtures
    auto* fx = app.add_subcommand("fixtures", "Write mock fixtures answering each corpus item with its ground truth");
    std::string fx_dir, fx_corpus, fx_strategies = "baseline,minimal,guided,two-stage";
    std::size_t fx_shots = kDefaultShots;
    fx->add_option("--dir", fx_dir, "Fixture directory")->required();
    fx->add_option("--corpus", fx_corpus, "Corpus file (default: bundled goldens)");
    fx->add_option("--strategies", fx_strategies, "Comma-separated strategies");
    fx->add_option("--shots", fx_shots, "Exemplars per prompt");

    // corpus
    auto* cor = app.add_subcommand("corpus", "Inspect or export corpora");
    cor->require_subcommand(1);
    auto* cor_export = cor->add_subcommand("export", "Write the bundled goldens as corpus JSON");
    std::string export_out;
    cor_export->add_option("--out", export_out, "Output file (default: stdout)");
    auto* cor_list = cor->add_subcommand("list", "List corpus items");
    std::string list_corpus;
    cor_list->add_option("--corpus", list_corpus, "Corpus file (default: bundled goldens)");
    auto* cor_validate = cor->add_subcommand("validate", "Check a corpus file");
    std::string validate_path;
    cor_validate->add_option("path", validate_path, "Corpus file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
    }

    try {
        if (*gen) {
            auto strategy = strategy_from_slug(gen_strategy);
            if (!strategy) {
                err << "error: unknown strategy '" << gen_strategy << "'\n" << gen->help();
                return kExitError;
            }
            ServiceConfig config = base_config(gen_flags.config);
            apply_provider_flags(gen_flags, config);
            const Corpus corpus = corpus_from(gen_corpus, config);
            const std::string dh = trim(read_input(gen_dh, in));
            if (dh.empty()) throw PreconditionViolation("dynamic hypothesis is empty");
            auto provider = provider_from(gen_flags, config);

            PipelineOptions options;
            options.shots = gen_shots;
            options.exclude_id = matching_item_id(corpus, dh);
            options.prompt.instructions_in_system = gen_system;
            const GenerationRecord record = run_pipeline(*provider, *strategy, dh, corpus, options);

            for (const auto& d : record.diagnostics)
                if (d.severity == Severity::Warning) err << d.to_string() << "\n";
            if (gen_format == "json") emit(gen_out, to_json(record).dump(2) + "\n", out);
            if (record.no_digraph()) {
                for (const auto& d : record.diagnostics)
                    if (d.severity == Severity::Error) err << d.message << "\n";
                return kExitNoDigraph;
            }
            if (gen_format == "digraph") emit(gen_out, emit_digraph(*record.diagram) + "\n", out);
            if (gen_format == "dot") emit(gen_out, render(*record.diagram, err), out);
            return kExitOk;
        }

        if (*ev) {
            if (!(ev_threshold > 0.0 && ev_threshold <= 1.0)) throw PreconditionViolation("--threshold must be in (0, 1]");
            const CausalLoopDiagram generated = parse_file(ev_generated, in);
            CausalLoopDiagram truth;
            if (std::ifstream(ev_truth).good()) {
                truth = parse_file(ev_truth, in);
            } else {
                const Corpus corpus = ev_corpus.empty() ? bundled_goldens() : load_corpus(ev_corpus);
                const auto* item = corpus.find(ev_truth);
                if (!item) throw Error("--truth '" + ev_truth + "' is neither a readable file nor a corpus item id");
                truth = item->ground_truth;
            }
            const EvalReport report = evaluate(generated, truth, ev_threshold);
            emit(ev_out, ev_format == "json" ? to_json(report).dump(2) + "\n" : report_table(report), out);
            return kExitOk;
        }

        if (*batch) {
            if (!(batch_threshold > 0.0 && batch_threshold <= 1.0))
                throw PreconditionViolation("--threshold must be in (0, 1]");
            const auto strategies = parse_strategies(batch_strategies);
            ServiceConfig config = base_config(batch_flags.config);
            apply_provider_flags(batch_flags, config);
            const Corpus corpus = corpus_from(batch_corpus, config);
            auto provider = provider_from(batch_flags, config);

            Json doc = Json::object();
            for (Strategy s : strategies) {
                const auto records = batch_generate(*provider, s, corpus, batch_shots, batch_parallelism);
                doc[std::string(strategy_slug(s))] = to_json(batch_report(records, corpus, batch_threshold));
            }
            emit(batch_out, doc.dump(2) + "\n", out);
            return kExitOk;
        }

        if (*serve) {
            ServiceConfig config = base_config(serve_flags.config);
            apply_provider_flags(serve_flags, config);
            if (!serve_listen.empty()) {
                auto overrides = parse_service_config(Json{{"listen", serve_listen}}.dump());
                config.host = overrides.host;
                config.port = overrides.port;
            }
            if (!serve_corpus.empty()) config.corpus_path = serve_corpus;
            validate_service_config(config);
            Service service(config, provider_from(serve_flags, config), corpus_from("", config));
            const int port = service.bind();
            err << "listening on " << config.host << ":" << port << "\n";
            service.run();
            return kExitOk;
        }

        if (*ren) {
            const CausalLoopDiagram diagram = parse_file(ren_in, in);
            emit(ren_out, ren_plain ? emit_render_dot(diagram, false) : render(diagram, err), out);
            return kExitOk;
        }

        if (*pr) {
            auto strategy = strategy_from_slug(pr_strategy);
            if (!strategy) {
                err << "error: unknown strategy '" << pr_strategy << "'\n" << pr->help();
                return kExitError;
            }
            const Corpus corpus = pr_corpus.empty() ? bundled_goldens() : load_corpus(pr_corpus);
            const std::string dh = trim(read_input(pr_dh, in));
            std::vector<Exemplar> exemplars;
            if (*strategy != Strategy::Baseline) {
                auto exclude = matching_item_id(corpus, dh);
                exemplars = select_exemplars(corpus, exclude ? std::optional<std::string_view>(*exclude) : std::nullopt,
                                             pr_shots);
            }
            const PromptBundle bundle = build_prompt(*strategy, dh, exemplars, {pr_system});
            for (std::size_t i = 0; i < bundle.stages.size(); ++i) {
                const std::string text = bundle.stages[i].prompt_text();
                if (pr_keys) {
                    out << prompt_key(text) << "\n";
                } else {
                    out << "=== stage " << i + 1 << " " << prompt_key(text) << " ===\n" << text << "\n";
                }
            }
            return kExitOk;
        }

        if (*fx) {
            const Corpus corpus = fx_corpus.empty() ? bundled_goldens() : load_corpus(fx_corpus);
            for (Strategy s : parse_strategies(fx_strategies)) write_reference_fixtures(fx_dir, corpus, s, fx_shots);
            return kExitOk;
        }

        if (*cor_export) {
            emit(export_out, corpus_to_json(bundled_goldens()), out);
            return kExitOk;
        }
        if (*cor_list) {
            const Corpus corpus = list_corpus.empty() ? bundled_goldens() : load_corpus(list_corpus);
            for (const auto& item : corpus.items()) {
                const auto loops = loop_signature(item.ground_truth);
                out << item.id << "\t" << item.ground_truth.variables().size() << " variables\t" << loops.size()
                    << " loops\t" << item.source << "\n";
            }
            return kExitOk;
        }
        if (*cor_validate) {
            const Corpus corpus = load_corpus(validate_path);
            out << "ok: " << corpus.items().size() << " items\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

} // namespace cldforge
