#include "cldforge/llm.hpp"

#include <openssl/evp.h>

#include <fstream>

namespace cldforge {

std::string prompt_key(std::string_view prompt_text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(prompt_text.data(), prompt_text.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

void write_mock_fixture(const std::filesystem::path& dir, std::string_view prompt_text, std::string_view completion) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    auto path = dir / (prompt_key(prompt_text) + ".txt");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(completion.data(), static_cast<std::streamsize>(completion.size()));
    if (!out) throw IoError("cannot write mock fixture '" + path.string() + "'");
}

RecordingProvider::RecordingProvider(std::shared_ptr<Provider> inner, std::filesystem::path fixture_dir)
    : inner_(std::move(inner)), dir_(std::move(fixture_dir)) {}

Completion RecordingProvider::complete(const StageRequest& request) {
    Completion completion = inner_->complete(request);
    std::lock_guard lock(mutex_);
    write_mock_fixture(dir_, request.prompt_text(), completion.text);
    return completion;
}

} // namespace cldforge
