#pragma once

#include "cldforge/corpus.hpp"
#include "cldforge/error.hpp"
#include "cldforge/evaluator.hpp"
#include "cldforge/llm.hpp"

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace cldforge {

class BadConfig : public Error {
public:
    using Error::Error;
};

class AddressInUse : public Error {
public:
    using Error::Error;
};

enum class ProviderKind { Mock, Live };

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    ProviderKind provider_kind = ProviderKind::Mock;
    ProviderConfig provider;
    std::filesystem::path mock_dir;                 // fixture directory for the mock provider
    std::optional<std::filesystem::path> corpus_path;  // bundled goldens when unset
    double threshold = kDefaultThreshold;
    std::size_t shots = kDefaultShots;
    std::size_t body_limit = 1 << 20;
    std::size_t transcript_capacity = 256;
};

// JSON mirror of ServiceConfig:
// {"listen": "host:port", "provider": {"kind": "mock", "fixtures": dir} |
//  {"kind": "live", "endpoint", "model", "api_key_env", "timeout_ms",
//   "max_retries", "api_style": "chat"|"completions", "max_tokens"},
//  "corpus", "threshold", "shots", "body_limit", "transcript_capacity"}
// Every key is optional; unknown keys and invalid values throw BadConfig.
ServiceConfig parse_service_config(std::string_view json_text);
ServiceConfig load_service_config(const std::filesystem::path& path);
void validate_service_config(const ServiceConfig& config);

std::shared_ptr<Provider> make_provider(ProviderKind kind, const ProviderConfig& live,
                                        const std::filesystem::path& mock_dir);

// Corpus item whose hypothesis is exactly dh; excluded from exemplars so a
// known answer never appears in its own prompt.
std::optional<std::string> matching_item_id(const Corpus& corpus, std::string_view dh);

struct ApiResponse {
    int status = 200;
    std::string body;  // JSON
};

// HTTP JSON API:
//   POST /api/generate, POST /api/evaluate, GET /api/corpus,
//   GET /api/corpus/{id}, GET /api/transcripts/{id}, GET /health
class Service {
public:
    Service(ServiceConfig config, std::shared_ptr<Provider> provider, Corpus corpus);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Routing without a socket; the HTTP server delegates here.
    ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);

    // Binds config.host:config.port (port 0 picks a free port) and returns
    // the bound port. Throws AddressInUse.
    int bind();
    // Serves until stop(); call after bind().
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace cldforge
