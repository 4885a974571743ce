#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace qcnn {

// Streaming SHA-256 (FIPS 180-4); used for dataset integrity manifests.
class Sha256 {
  public:
    Sha256();
    void update(std::span<const std::uint8_t> bytes);
    std::string hex_digest(); // finalizes; call once

  private:
    void process_block(const std::uint8_t* block);

    std::uint32_t h_[8];
    std::uint8_t buf_[64];
    std::size_t buf_len_ = 0;
    std::uint64_t total_ = 0;
};

std::string sha256_hex(std::span<const std::uint8_t> bytes);

} // namespace qcnn
