#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qcnn/dataset.hpp"

namespace qcnn {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

inline constexpr std::array<const char*, 4> kMnistFileNames = {
    "train-images-idx3-ubyte.gz",
    "train-labels-idx1-ubyte.gz",
    "t10k-images-idx3-ubyte.gz",
    "t10k-labels-idx1-ubyte.gz",
};

struct IdxImages {
    std::uint32_t count = 0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::uint8_t> pixels; // count * rows * cols
};

struct IdxLabels {
    std::uint32_t count = 0;
    std::vector<std::uint8_t> labels;
};

bool is_gzip(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> bytes);

// Big-endian IDX parsing; gzip input is decompressed transparently. Parse
// failures carry the offending byte offset.
IdxImages parse_idx_images(std::span<const std::uint8_t> bytes);
IdxLabels parse_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images);
std::vector<std::uint8_t> serialize_idx_labels(const IdxLabels& labels);

// One MNIST split: images + labels with matching counts.
struct RawMnist {
    IdxImages images;
    IdxLabels labels;
};

RawMnist load_raw_split(const std::filesystem::path& images_file,
                        const std::filesystem::path& labels_file);

struct PreprocessOptions {
    int train_size = 1000;
    int test_size = 500;
    int digit_label0 = 0;
    int digit_label1 = 7;
    std::uint64_t seed = 42;
};

// Filters the two digits, draws a class-balanced seeded subsample of each
// split (label-0 digit gets the extra element when the size is odd), and
// builds both feature views:
//   classical: pixel / 255 in [0, 1]
//   quantum:   mean over a 4x2 grid of 7x14-pixel blocks (feature index =
//              block_row * 2 + block_col), then per-feature affine rescale to
//              [0, pi] with min/max taken on the train split only (test
//              clamped). A constant feature maps to 0 and is recorded as a
//              warning.
// Rng stream order: shuffle train digit0 candidates, shuffle train digit1,
// shuffle the combined train selection; then the same three draws for test.
Dataset preprocess(const RawMnist& train_raw, const RawMnist& test_raw,
                   const PreprocessOptions& opts);

// Block averages of a 28x28 image (raw 0..255 scale, before rescaling).
std::array<double, 8> block_average_features(std::span<const std::uint8_t> image);

} // namespace qcnn
