#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace emrsim {

/// Incremental SHA-256 (FIPS 180-4), used for config and output digests.
class Sha256 {
  public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }

    /// Finalizes and returns the digest as 64 lowercase hex characters.
    std::string hex_digest();

    static std::string of_string(std::string_view s);
    /// Digest of a file's bytes; throws on open/read failure.
    static std::string of_file(const std::string& path);

  private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint64_t total_len_ = 0;
    std::uint8_t buffer_[64];
    std::size_t buffer_len_ = 0;
};

}  // namespace emrsim
