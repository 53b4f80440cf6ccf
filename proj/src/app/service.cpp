#include "cldforge/service.hpp"

#include "cldforge/dot.hpp"
#include "cldforge/json_codec.hpp"
#include "cldforge/loops.hpp"

#include <httplib.h>

#include <cstdio>
#include <list>
#include <variant>
#include <mutex>
#include <unordered_map>

namespace cldforge {

namespace {

ApiResponse json_response(int status, const Json& body) { return {status, body.dump()}; }

ApiResponse error_response(int status, const std::string& message, const Json& diagnostics = Json::array()) {
    return json_response(status, {{"error", message}, {"diagnostics", diagnostics}});
}

std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// Bounded least-recently-used store of generation records.
class TranscriptStore {
public:
    explicit TranscriptStore(std::size_t capacity) : capacity_(capacity) {}

    std::string put(GenerationRecord record) {
        std::lock_guard lock(mutex_);
        char id[32];
        std::snprintf(id, sizeof id, "t%08llu", static_cast<unsigned long long>(++counter_));
        order_.push_front(id);
        entries_[id] = {std::move(record), order_.begin()};
        if (entries_.size() > capacity_) {
            entries_.erase(order_.back());
            order_.pop_back();
        }
        return id;
    }

    std::optional<GenerationRecord> get(const std::string& id) {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(id);
        if (it == entries_.end()) return std::nullopt;
        order_.splice(order_.begin(), order_, it->second.position);
        return it->second.record;
    }

private:
    struct Entry {
        GenerationRecord record;
        std::list<std::string>::iterator position;
    };

    std::size_t capacity_;
    std::mutex mutex_;
    unsigned long long counter_ = 0;
    std::list<std::string> order_;
    std::unordered_map<std::string, Entry> entries_;
};

} // namespace

struct Service::Impl {
    ServiceConfig config;
    std::shared_ptr<Provider> provider;
    Corpus corpus;
    TranscriptStore transcripts;
    httplib::Server server;

    Impl(ServiceConfig c, std::shared_ptr<Provider> p, Corpus k)
        : config(std::move(c)), provider(std::move(p)), corpus(std::move(k)), transcripts(config.transcript_capacity) {}

    ApiResponse generate(std::string_view body);
    ApiResponse evaluate(std::string_view body);
    ApiResponse corpus_list() const;
    ApiResponse corpus_item(std::string_view id) const;
    ApiResponse transcript(std::string_view id);
    ApiResponse health() const;
};

ApiResponse Service::Impl::generate(std::string_view body) {
    Json request = Json::parse(body, nullptr, false);
    if (request.is_discarded() || !request.is_object()) return error_response(400, "request body must be a JSON object");
    if (!request.contains("dh") || !request["dh"].is_string()) return error_response(400, "\"dh\" must be a string");
    const std::string dh = trim(request["dh"].get<std::string>());
    if (dh.empty()) return error_response(400, "\"dh\" is empty");
    if (!request.contains("strategy") || !request["strategy"].is_string())
        return error_response(400, "\"strategy\" must be one of baseline, minimal, guided, two-stage");
    auto strategy = strategy_from_slug(request["strategy"].get<std::string>());
    if (!strategy) return error_response(400, "unknown strategy " + request["strategy"].dump());

    PipelineOptions options;
    options.shots = config.shots;
    if (request.contains("shots") && !request["shots"].is_null()) {
        if (!request["shots"].is_number_unsigned()) return error_response(400, "\"shots\" must be a non-negative integer");
        options.shots = request["shots"].get<std::size_t>();
    }
    options.exclude_id = matching_item_id(corpus, dh);

    GenerationRecord record;
    try {
        record = run_pipeline(*provider, *strategy, dh, corpus, options);
    } catch (const TransportError& e) {
        return error_response(502, e.what());
    } catch (const NotEnoughExemplars& e) {
        return error_response(400, e.what());
    } catch (const PreconditionViolation& e) {
        return error_response(400, e.what());
    }

    Json diagnostics = Json::array();
    for (const auto& d : record.diagnostics) diagnostics.push_back(d.to_string());

    Json out;
    out["digraph"] = nullptr;
    out["render_dot"] = nullptr;
    out["variables"] = Json::array();
    out["loops"] = Json::array();
    if (record.diagram) {
        out["digraph"] = emit_digraph(*record.diagram);
        for (const auto& v : record.diagram->variables()) out["variables"].push_back(v.raw());
        try {
            out["loops"] = loops_json(*record.diagram);
            out["render_dot"] = emit_render_dot(*record.diagram, true);
        } catch (const TooManyLoops& e) {
            out["render_dot"] = emit_render_dot(*record.diagram, false);
            diagnostics.push_back(std::string("warning: ") + e.what());
        }
    }
    out["diagnostics"] = diagnostics;
    out["completion"] = record.stage_transcripts.empty() ? Json(nullptr)
                                                         : Json(record.stage_transcripts.back().completion);
    out["transcripts_id"] = transcripts.put(std::move(record));
    return json_response(200, out);
}

ApiResponse Service::Impl::evaluate(std::string_view body) {
    Json request = Json::parse(body, nullptr, false);
    if (request.is_discarded() || !request.is_object()) return error_response(400, "request body must be a JSON object");
    if (!request.contains("generated_digraph") || !request["generated_digraph"].is_string())
        return error_response(400, "\"generated_digraph\" must be a string");
    const bool has_truth = request.contains("truth_digraph") && !request["truth_digraph"].is_null();
    const bool has_id = request.contains("truth_id") && !request["truth_id"].is_null();
    if (has_truth == has_id) return error_response(400, "provide exactly one of \"truth_digraph\" or \"truth_id\"");

    double threshold = config.threshold;
    if (request.contains("threshold") && !request["threshold"].is_null()) {
        if (!request["threshold"].is_number()) return error_response(400, "\"threshold\" must be a number");
        threshold = request["threshold"].get<double>();
        if (!(threshold > 0.0 && threshold <= 1.0)) return error_response(400, "\"threshold\" must be in (0, 1]");
    }

    auto parse_field = [](const Json& value, const char* field) -> std::variant<CausalLoopDiagram, ApiResponse> {
        try {
            return parse_digraph(value.get<std::string>(), ParseMode::Strict).diagram;
        } catch (const SyntaxError& e) {
            return error_response(400, std::string(field) + ": " + e.what(), Json::array({e.diagnostic().to_string()}));
        }
    };

    auto generated = parse_field(request["generated_digraph"], "generated_digraph");
    if (auto* err = std::get_if<ApiResponse>(&generated)) return *err;

    CausalLoopDiagram truth;
    if (has_truth) {
        if (!request["truth_digraph"].is_string()) return error_response(400, "\"truth_digraph\" must be a string");
        auto parsed = parse_field(request["truth_digraph"], "truth_digraph");
        if (auto* err = std::get_if<ApiResponse>(&parsed)) return *err;
        truth = std::get<CausalLoopDiagram>(std::move(parsed));
    } else {
        if (!request["truth_id"].is_string()) return error_response(400, "\"truth_id\" must be a string");
        const auto* item = corpus.find(request["truth_id"].get<std::string>());
        if (!item) return error_response(400, "unknown corpus item " + request["truth_id"].dump());
        truth = item->ground_truth;
    }
    return json_response(200, to_json(cldforge::evaluate(std::get<CausalLoopDiagram>(generated), truth, threshold)));
}

ApiResponse Service::Impl::corpus_list() const {
    Json items = Json::array();
    for (const auto& item : corpus.items()) items.push_back(corpus_summary_json(item));
    return json_response(200, {{"items", items}});
}

ApiResponse Service::Impl::corpus_item(std::string_view id) const {
    const auto* item = corpus.find(id);
    if (!item) return error_response(404, "unknown corpus item '" + std::string(id) + "'");
    return json_response(200, corpus_item_json(*item));
}

ApiResponse Service::Impl::transcript(std::string_view id) {
    auto record = transcripts.get(std::string(id));
    if (!record) return error_response(404, "unknown or expired transcripts id '" + std::string(id) + "'");
    return json_response(200, to_json(*record));
}

ApiResponse Service::Impl::health() const {
    Json strategies = Json::array();
    for (Strategy s : kAllStrategies) strategies.push_back(std::string(strategy_slug(s)));
    return json_response(200, {{"status", "ok"}, {"provider", std::string(provider->kind())}, {"strategies", strategies}});
}

Service::Service(ServiceConfig config, std::shared_ptr<Provider> provider, Corpus corpus)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(provider), std::move(corpus))) {
    validate_service_config(impl_->config);

    auto& server = impl_->server;
    server.set_payload_max_length(impl_->config.body_limit);
    // The library default adds SO_REUSEPORT, which lets a second server share a taken port.
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
        ApiResponse api = handle(req.method, req.path, req.body);
        res.status = api.status;
        res.set_content(api.body, "application/json");
    };
    server.Get(R"(/.*)", dispatch);
    server.Post(R"(/.*)", dispatch);
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        const char* message = res.status == 413 ? "request body exceeds the size limit" : "request failed";
        res.set_content(Json{{"error", message}, {"diagnostics", Json::array()}}.dump(), "application/json");
    });
}

Service::~Service() = default;

ApiResponse Service::handle(std::string_view method, std::string_view path, std::string_view body) {
    auto& impl = *impl_;
    if (body.size() > impl.config.body_limit) return error_response(413, "request body exceeds the size limit");

    constexpr std::string_view corpus_prefix = "/api/corpus/";
    constexpr std::string_view transcript_prefix = "/api/transcripts/";
    const bool get = method == "GET";
    const bool post = method == "POST";

    if (path == "/health") return get ? impl.health() : error_response(405, "method not allowed");
    if (path == "/api/generate") return post ? impl.generate(body) : error_response(405, "method not allowed");
    if (path == "/api/evaluate") return post ? impl.evaluate(body) : error_response(405, "method not allowed");
    if (path == "/api/corpus") return get ? impl.corpus_list() : error_response(405, "method not allowed");
    if (path.starts_with(corpus_prefix) && path.size() > corpus_prefix.size())
        return get ? impl.corpus_item(path.substr(corpus_prefix.size())) : error_response(405, "method not allowed");
    if (path.starts_with(transcript_prefix) && path.size() > transcript_prefix.size())
        return get ? impl.transcript(path.substr(transcript_prefix.size())) : error_response(405, "method not allowed");
    return error_response(404, "no route for " + std::string(method) + " " + std::string(path));
}

int Service::bind() {
    auto& impl = *impl_;
    int port = impl.config.port == 0 ? impl.server.bind_to_any_port(impl.config.host)
                                     : (impl.server.bind_to_port(impl.config.host, impl.config.port) ? impl.config.port
                                                                                                     : -1);
    if (port < 0)
        throw AddressInUse("cannot bind " + impl.config.host + ":" + std::to_string(impl.config.port));
    return port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

} // namespace cldforge
