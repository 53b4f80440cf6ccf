#include "cldforge/llm.hpp"

#include <fstream>
#include <sstream>
#include <thread>

namespace cldforge {

namespace {

std::optional<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::optional<MockFailure> failure_from_text(std::string text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) text.pop_back();
    if (text == "timeout") return MockFailure::Timeout;
    if (text == "rate-limited") return MockFailure::RateLimited;
    if (text == "auth") return MockFailure::Auth;
    if (text == "provider") return MockFailure::Provider;
    return std::nullopt;
}

[[noreturn]] void raise(MockFailure failure) {
    switch (failure) {
    case MockFailure::Timeout: throw Timeout("mock provider: simulated timeout");
    case MockFailure::RateLimited: throw RateLimited("mock provider: simulated rate limit");
    case MockFailure::Auth: throw AuthError("mock provider: simulated authentication failure");
    case MockFailure::Provider: break;
    }
    throw ProviderError("mock provider: simulated provider failure");
}

} // namespace

MockProvider::MockProvider(std::filesystem::path fixture_dir) : dir_(std::move(fixture_dir)) {}

void MockProvider::add(std::string_view prompt_text, std::string completion) {
    std::lock_guard lock(mutex_);
    completions_[prompt_key(prompt_text)] = std::move(completion);
}

void MockProvider::add_failure(std::string_view prompt_text, MockFailure failure) {
    std::lock_guard lock(mutex_);
    failures_[prompt_key(prompt_text)] = failure;
}

void MockProvider::set_latency(std::function<std::chrono::milliseconds(std::string_view)> latency) {
    std::lock_guard lock(mutex_);
    latency_ = std::move(latency);
}

std::size_t MockProvider::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::size_t MockProvider::max_in_flight() const {
    std::lock_guard lock(mutex_);
    return max_in_flight_;
}

Completion MockProvider::complete(const StageRequest& request) {
    const std::string text = request.prompt_text();
    const std::string key = prompt_key(text);

    std::function<std::chrono::milliseconds(std::string_view)> latency;
    {
        std::lock_guard lock(mutex_);
        ++calls_;
        max_in_flight_ = std::max(max_in_flight_, ++in_flight_);
        latency = latency_;
    }
    struct Leave {
        MockProvider* self;
        ~Leave() {
            std::lock_guard lock(self->mutex_);
            --self->in_flight_;
        }
    } leave{this};

    Completion out;
    if (latency) {
        out.latency = latency(text);
        std::this_thread::sleep_for(out.latency);
    }

    std::optional<MockFailure> failure;
    std::optional<std::string> completion;
    {
        std::lock_guard lock(mutex_);
        if (auto it = failures_.find(key); it != failures_.end()) failure = it->second;
        if (auto it = completions_.find(key); it != completions_.end()) completion = it->second;
    }
    if (!failure && !completion && dir_) {
        if (auto error_text = read_file(*dir_ / (key + ".error"))) {
            failure = failure_from_text(*error_text);
            if (!failure) throw ProviderError("mock fixture " + key + ".error names an unknown failure");
        } else {
            completion = read_file(*dir_ / (key + ".txt"));
        }
    }
    if (failure) raise(*failure);
    if (!completion) throw ProviderError("no fixture for prompt " + key);
    out.text = std::move(*completion);
    return out;
}

} // namespace cldforge
