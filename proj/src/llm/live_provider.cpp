#include "cldforge/llm.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <regex>
#include <thread>

namespace cldforge {

namespace {

using nlohmann::json;

class HttplibTransport : public HttpTransport {
public:
    HttpResponse post(const HttpRequest& request) override {
        static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
        std::smatch m;
        if (!std::regex_match(request.url, m, url_re))
            return {0, "", HttpResponse::Failure::Connection, "malformed endpoint URL '" + request.url + "'"};
        const std::string origin = m[1].str();
        const std::string path = m[2].matched ? m[2].str() : "/";

        httplib::Client client(origin);
        const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
        const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - seconds);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());

        httplib::Headers headers;
        for (const auto& [k, v] : request.headers) headers.emplace(k, v);
        auto result = client.Post(path, headers, request.body, "application/json");
        if (!result) {
            auto err = result.error();
            auto failure = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                               ? HttpResponse::Failure::Timeout
                               : HttpResponse::Failure::Connection;
            return {0, "", failure, httplib::to_string(err)};
        }
        return {result->status, result->body, HttpResponse::Failure::None, ""};
    }
};

std::string excerpt(const std::string& body) {
    constexpr std::size_t limit = 200;
    return body.size() <= limit ? body : body.substr(0, limit) + "...";
}

Completion parse_response(const ProviderConfig& config, const std::string& body) {
    try {
        auto doc = json::parse(body);
        const auto& choice = doc.at("choices").at(0);
        Completion out;
        out.text = config.api_style == ApiStyle::Chat ? choice.at("message").at("content").get<std::string>()
                                                      : choice.at("text").get<std::string>();
        if (doc.contains("usage") && doc["usage"].is_object()) {
            const auto& usage = doc["usage"];
            if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer())
                out.prompt_tokens = usage["prompt_tokens"].get<long>();
            if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number_integer())
                out.completion_tokens = usage["completion_tokens"].get<long>();
        }
        return out;
    } catch (const json::exception& e) {
        throw ProviderError(std::string("unexpected provider response: ") + e.what() + ": " + excerpt(body));
    }
}

} // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

std::string build_request_body(const ProviderConfig& config, const StageRequest& request) {
    json body;
    body["model"] = config.model_id;
    if (config.api_style == ApiStyle::Chat) {
        body["messages"] = json::array();
        if (!request.system_preamble.empty())
            body["messages"].push_back({{"role", "system"}, {"content", request.system_preamble}});
        body["messages"].push_back({{"role", "user"}, {"content", request.body}});
    } else {
        body["prompt"] = request.prompt_text();
    }
    // Greedy decoding: no temperature, no nucleus truncation, one candidate.
    body["temperature"] = 0;
    body["top_p"] = 1;
    body["n"] = 1;
    if (config.max_tokens) body["max_tokens"] = *config.max_tokens;
    return body.dump();
}

LiveProvider::LiveProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport, Sleeper sleeper,
                           EnvLookup env)
    : config_(std::move(config)), transport_(std::move(transport)), sleeper_(std::move(sleeper)), env_(std::move(env)) {
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    if (!env_)
        env_ = [](const std::string& name) -> std::optional<std::string> {
            const char* value = std::getenv(name.c_str());
            if (!value || !*value) return std::nullopt;
            return std::string(value);
        };
}

Completion LiveProvider::complete(const StageRequest& request) {
    auto key = env_(config_.api_key_env);
    if (!key) throw AuthError("environment variable " + config_.api_key_env + " is not set");

    HttpRequest http;
    http.url = config_.endpoint;
    http.headers = {{"Authorization", "Bearer " + *key}};
    http.body = build_request_body(config_, request);
    http.timeout = config_.timeout;

    for (int attempt = 0;; ++attempt) {
        const auto started = std::chrono::steady_clock::now();
        HttpResponse response = transport_->post(http);
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);

        const bool last = attempt >= config_.max_retries;
        auto retry_or = [&](auto&& error) {
            if (last) throw error;
            sleeper_(config_.initial_backoff * (1LL << attempt));
        };

        if (response.failure == HttpResponse::Failure::Timeout) {
            retry_or(Timeout("provider request timed out: " + response.error));
            continue;
        }
        if (response.failure == HttpResponse::Failure::Connection) {
            retry_or(ProviderError("provider connection failed: " + response.error));
            continue;
        }
        if (response.status == 401 || response.status == 403)
            throw AuthError("provider rejected credentials (HTTP " + std::to_string(response.status) +
                            "): " + excerpt(response.body));
        if (response.status == 429) {
            retry_or(RateLimited("provider rate limit (HTTP 429): " + excerpt(response.body)));
            continue;
        }
        if (response.status >= 500) {
            retry_or(ProviderError("provider error (HTTP " + std::to_string(response.status) +
                                   "): " + excerpt(response.body)));
            continue;
        }
        if (response.status < 200 || response.status >= 300)
            throw ProviderError("provider error (HTTP " + std::to_string(response.status) + "): " +
                                excerpt(response.body));

        Completion out = parse_response(config_, response.body);
        out.latency = elapsed;
        return out;
    }
}

} // namespace cldforge
