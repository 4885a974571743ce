#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>

#include "qcnn/mnist.hpp"

namespace qcnn {

struct FetchOptions {
    std::string base_url = "https://ossci-datasets.s3.amazonaws.com/mnist/";
    std::filesystem::path dest_dir = "data/mnist";
    int attempts = 3;             // network attempts per download
    int backoff_initial_ms = 500; // doubles per retry
    int timeout_ms = 30000;
};

// Plain-text digest manifest, one "<sha256>  <filename>" line per file.
std::map<std::string, std::string> read_digest_manifest(const std::filesystem::path& path);
void write_digest_manifest(const std::filesystem::path& path,
                           const std::map<std::string, std::string>& entries);

// Downloads the four MNIST .gz files (kMnistFileNames) into dest_dir,
// skipping cached files whose SHA-256 matches the manifest at
// dest_dir/SHA256SUMS. A corrupted cached file triggers one redownload; a
// digest mismatch after that is an integrity error. When no manifest exists,
// digests of the downloaded files are recorded into a fresh manifest
// (trust-on-first-use; upstream publishes no official SHA-256 values).
// Returns the four file paths in kMnistFileNames order.
std::array<std::filesystem::path, 4> fetch(const FetchOptions& opts);

} // namespace qcnn
