#include "cldforge/service.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace cldforge {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.contains(key)) throw BadConfig("unknown config key '" + where + key + "'");
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw BadConfig("config key '" + where + key + "' has the wrong type");
    }
}

void parse_listen(const std::string& listen, ServiceConfig& config) {
    auto colon = listen.rfind(':');
    if (colon == std::string::npos || colon == 0) throw BadConfig("listen must be host:port, got '" + listen + "'");
    config.host = listen.substr(0, colon);
    try {
        std::size_t used = 0;
        config.port = std::stoi(listen.substr(colon + 1), &used);
        if (used != listen.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw BadConfig("invalid port in listen address '" + listen + "'");
    }
}

void parse_provider(const json& p, ServiceConfig& config) {
    if (!p.is_object()) throw BadConfig("provider must be an object");
    const auto kind = p.contains("kind") ? get<std::string>(p, "kind", "provider.") : "mock";
    if (kind == "mock") {
        reject_unknown(p, {"kind", "fixtures"}, "provider.");
        config.provider_kind = ProviderKind::Mock;
        if (p.contains("fixtures")) config.mock_dir = get<std::string>(p, "fixtures", "provider.");
        return;
    }
    if (kind != "live") throw BadConfig("provider.kind must be \"mock\" or \"live\"");
    reject_unknown(p, {"kind", "endpoint", "model", "api_key_env", "timeout_ms", "max_retries", "api_style", "max_tokens"},
                   "provider.");
    config.provider_kind = ProviderKind::Live;
    auto& live = config.provider;
    if (p.contains("endpoint")) live.endpoint = get<std::string>(p, "endpoint", "provider.");
    if (p.contains("model")) live.model_id = get<std::string>(p, "model", "provider.");
    if (p.contains("api_key_env")) live.api_key_env = get<std::string>(p, "api_key_env", "provider.");
    if (p.contains("timeout_ms")) live.timeout = std::chrono::milliseconds(get<long>(p, "timeout_ms", "provider."));
    if (p.contains("max_retries")) live.max_retries = get<int>(p, "max_retries", "provider.");
    if (p.contains("max_tokens")) live.max_tokens = get<int>(p, "max_tokens", "provider.");
    if (p.contains("api_style")) {
        auto style = get<std::string>(p, "api_style", "provider.");
        if (style == "chat")
            live.api_style = ApiStyle::Chat;
        else if (style == "completions")
            live.api_style = ApiStyle::Completions;
        else
            throw BadConfig("provider.api_style must be \"chat\" or \"completions\"");
    }
}

} // namespace

void validate_service_config(const ServiceConfig& config) {
    if (!(config.threshold > 0.0 && config.threshold <= 1.0)) throw BadConfig("threshold must be in (0, 1]");
    if (config.port < 0 || config.port > 65535) throw BadConfig("port out of range");
    if (config.body_limit == 0) throw BadConfig("body_limit must be positive");
    if (config.transcript_capacity == 0) throw BadConfig("transcript_capacity must be positive");
    if (config.provider_kind == ProviderKind::Live) {
        if (config.provider.max_retries < 0) throw BadConfig("provider.max_retries must be >= 0");
        if (config.provider.timeout.count() <= 0) throw BadConfig("provider.timeout_ms must be positive");
        if (config.provider.api_key_env.empty()) throw BadConfig("provider.api_key_env is empty");
    }
}

ServiceConfig parse_service_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw BadConfig(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw BadConfig("config must be a JSON object");
    reject_unknown(doc, {"listen", "provider", "corpus", "threshold", "shots", "body_limit", "transcript_capacity"}, "");

    ServiceConfig config;
    if (doc.contains("listen")) parse_listen(get<std::string>(doc, "listen", ""), config);
    if (doc.contains("provider")) parse_provider(doc["provider"], config);
    if (doc.contains("corpus")) config.corpus_path = get<std::string>(doc, "corpus", "");
    if (doc.contains("threshold")) config.threshold = get<double>(doc, "threshold", "");
    if (doc.contains("shots")) {
        auto shots = get<long>(doc, "shots", "");
        if (shots < 0) throw BadConfig("shots must be >= 0");
        config.shots = static_cast<std::size_t>(shots);
    }
    if (doc.contains("body_limit")) config.body_limit = get<std::size_t>(doc, "body_limit", "");
    if (doc.contains("transcript_capacity"))
        config.transcript_capacity = get<std::size_t>(doc, "transcript_capacity", "");
    validate_service_config(config);
    return config;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BadConfig("cannot open config file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_service_config(buffer.str());
}

std::shared_ptr<Provider> make_provider(ProviderKind kind, const ProviderConfig& live,
                                        const std::filesystem::path& mock_dir) {
    if (kind == ProviderKind::Live) return std::make_shared<LiveProvider>(live);
    if (mock_dir.empty()) throw BadConfig("mock provider needs a fixture directory");
    if (!std::filesystem::is_directory(mock_dir))
        throw BadConfig("mock fixture directory '" + mock_dir.string() + "' does not exist");
    return std::make_shared<MockProvider>(mock_dir);
}

std::optional<std::string> matching_item_id(const Corpus& corpus, std::string_view dh) {
    for (const auto& item : corpus.items())
        if (item.dh == dh) return item.id;
    return std::nullopt;
}

} // namespace cldforge
