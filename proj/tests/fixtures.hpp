#pragma once

// Synthetic MNIST-shaped fixtures for offline tests: valid IDX files with
// digit-dependent, block-separable patterns for the 0-vs-7 task.

#include <cstdint>
#include <filesystem>
#include <utility>

#include "qcnn/mnist.hpp"

namespace qcnn::testing {

// `count` images cycling through digits 0..9. Digit 0 is bright on the left
// half, digit 7 on the top band; per-pixel noise keeps features non-constant.
std::pair<IdxImages, IdxLabels> make_synthetic_mnist(int count, std::uint64_t seed);

// Writes the four canonical files (gzipped) into dir.
void write_synthetic_mnist_dir(const std::filesystem::path& dir, int train_count, int test_count,
                               std::uint64_t seed);

// Fresh unique directory under the system temp dir.
std::filesystem::path fresh_temp_dir(const std::string& tag);

} // namespace qcnn::testing
