#pragma once

// Completion providers (live HTTP and deterministic mock) and the pipeline
// that turns a dynamic hypothesis into a GenerationRecord.

#include "cldforge/corpus.hpp"
#include "cldforge/error.hpp"
#include "cldforge/prompting.hpp"
#include "cldforge/record.hpp"

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cldforge {

// Transport-level failures; everything else in a run is recorded as data.
class TransportError : public Error {
public:
    using Error::Error;
};

class AuthError : public TransportError {
public:
    using TransportError::TransportError;
};

class Timeout : public TransportError {
public:
    using TransportError::TransportError;
};

class ProviderError : public TransportError {
public:
    using TransportError::TransportError;
};

class RateLimited : public TransportError {
public:
    using TransportError::TransportError;
};

// Sampling is never enabled: requests pin temperature 0.
enum class Decoding { Greedy };

// chat: {"messages": [...]} -> choices[0].message.content
// completions: {"prompt": "..."} -> choices[0].text
enum class ApiStyle { Chat, Completions };

struct ProviderConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model_id = "gpt-3.5-turbo";
    std::string api_key_env = "LLM_API_KEY";
    std::chrono::milliseconds timeout{60'000};
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{1'000};
    Decoding decoding = Decoding::Greedy;
    ApiStyle api_style = ApiStyle::Chat;
    std::optional<int> max_tokens;  // provider default when unset
};

struct Completion {
    std::string text;
    std::chrono::milliseconds latency{0};
    std::optional<long> prompt_tokens;
    std::optional<long> completion_tokens;
};

// complete() must be safe to call from several threads at once.
class Provider {
public:
    virtual ~Provider() = default;
    virtual Completion complete(const StageRequest& request) = 0;
    virtual std::string model_id() const = 0;
    virtual std::string_view kind() const = 0;  // "live" or "mock"
};

// ---- mock -------------------------------------------------------------------

// Lowercase hex SHA-256 of the prompt text; mock fixture files are named
// "<key>.txt" (completion) or "<key>.error" (failure kind to raise).
std::string prompt_key(std::string_view prompt_text);

void write_mock_fixture(const std::filesystem::path& dir, std::string_view prompt_text, std::string_view completion);

enum class MockFailure { Timeout, RateLimited, Auth, Provider };

// Replays stored completions keyed by exact prompt text. Unknown prompts
// raise ProviderError("no fixture ...").
class MockProvider : public Provider {
public:
    MockProvider() = default;
    // Reads fixtures lazily from dir on each call.
    explicit MockProvider(std::filesystem::path fixture_dir);

    void add(std::string_view prompt_text, std::string completion);
    void add_failure(std::string_view prompt_text, MockFailure failure);
    // Simulated latency per prompt: the provider sleeps for it and reports it.
    void set_latency(std::function<std::chrono::milliseconds(std::string_view prompt_text)> latency);

    Completion complete(const StageRequest& request) override;
    std::string model_id() const override { return "mock"; }
    std::string_view kind() const override { return "mock"; }

    std::size_t calls() const;
    std::size_t max_in_flight() const;

private:
    std::optional<std::filesystem::path> dir_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> completions_;
    std::map<std::string, MockFailure> failures_;
    std::function<std::chrono::milliseconds(std::string_view)> latency_;
    std::size_t calls_ = 0;
    std::size_t in_flight_ = 0;
    std::size_t max_in_flight_ = 0;
};

// Forwards to another provider and stores each successful completion as a
// mock fixture, for later offline replay.
class RecordingProvider : public Provider {
public:
    RecordingProvider(std::shared_ptr<Provider> inner, std::filesystem::path fixture_dir);

    Completion complete(const StageRequest& request) override;
    std::string model_id() const override { return inner_->model_id(); }
    std::string_view kind() const override { return inner_->kind(); }

private:
    std::shared_ptr<Provider> inner_;
    std::filesystem::path dir_;
    std::mutex mutex_;
};

// ---- live -------------------------------------------------------------------

struct HttpRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::chrono::milliseconds timeout{0};
};

struct HttpResponse {
    enum class Failure { None, Timeout, Connection };

    int status = 0;
    std::string body;
    Failure failure = Failure::None;
    std::string error;  // transport error text when failure != None
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const HttpRequest& request) = 0;
};

// cpp-httplib client, one connection per request.
std::shared_ptr<HttpTransport> make_http_transport();

// Request JSON for one stage, including the greedy-decoding parameters.
std::string build_request_body(const ProviderConfig& config, const StageRequest& request);

// OpenAI-compatible JSON-over-HTTP adapter. Retries timeouts, connection
// failures, 429 and 5xx up to max_retries times with exponential backoff.
class LiveProvider : public Provider {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;
    using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

    explicit LiveProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport = make_http_transport(),
                          Sleeper sleeper = {}, EnvLookup env = {});

    Completion complete(const StageRequest& request) override;
    std::string model_id() const override { return config_.model_id; }
    std::string_view kind() const override { return "live"; }

private:
    ProviderConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    Sleeper sleeper_;
    EnvLookup env_;
};

// ---- pipeline ---------------------------------------------------------------

struct PipelineOptions {
    std::size_t shots = kDefaultShots;
    std::optional<std::string> exclude_id;  // leave-one-out exemplar exclusion
    PromptOptions prompt;
};

// Runs every stage of the strategy's prompt. Parse failures (no digraph,
// empty variable list) are recorded in the result; only TransportError and
// prompt-assembly errors propagate.
GenerationRecord run_pipeline(Provider& provider, Strategy strategy, std::string_view dh, const Corpus& corpus,
                              const PipelineOptions& options = {});

// One record per corpus item in corpus order, each excluding its own item
// from the exemplars. At most `parallelism` provider calls run at once;
// per-item failures land in that record's error_note.
std::vector<GenerationRecord> batch_generate(Provider& provider, Strategy strategy, const Corpus& corpus,
                                             std::size_t shots, std::size_t parallelism,
                                             PromptOptions prompt = {});

// Writes mock fixtures under which batch_generate answers every corpus item
// with its own ground truth: the canonical digraph for digraph stages and a
// "- name" list of its variables for the TwoStage variable stage.
void write_reference_fixtures(const std::filesystem::path& dir, const Corpus& corpus, Strategy strategy,
                              std::size_t shots, PromptOptions prompt = {});

} // namespace cldforge
