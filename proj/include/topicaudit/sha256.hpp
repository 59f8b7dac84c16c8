#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace topicaudit {

// Streaming SHA-256 (FIPS 180-4). Used for content hashes that bind
// models, vocabularies, and corpora together.
class Sha256 {
public:
    Sha256();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::array<std::uint8_t, 32> digest();  // finalizes; call once

private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 8> h_;
    std::array<std::uint8_t, 64> buf_;
    std::size_t buf_len_ = 0;
    std::uint64_t total_len_ = 0;
};

std::string to_hex(const std::array<std::uint8_t, 32>& digest);
std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::string& path);

}  // namespace topicaudit
