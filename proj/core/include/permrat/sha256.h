#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace permrat {

// Minimal SHA-256 (FIPS 180-4).  Used to fingerprint cached artifacts so a
// torn write or manual edit is detected on reload.  Not a performance path.
class Sha256 {
public:
    Sha256();
    void update(const void* data, std::size_t len);
    void update(const std::string& s) { update(s.data(), s.size()); }
    // Finalize and return the digest as 64 lowercase hex characters.  The
    // object must not be reused afterwards.
    std::string hex_digest();

private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint64_t bitlen_ = 0;
    std::uint8_t buf_[64];
    std::size_t buflen_ = 0;
};

std::string sha256_hex(const std::string& data);
std::string sha256_file_hex(const std::string& path);

}  // namespace permrat
