#include "fixtures.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>

#include "qcnn/metrics.hpp"
#include "qcnn/rng.hpp"

namespace qcnn::testing {

std::pair<IdxImages, IdxLabels> make_synthetic_mnist(int count, std::uint64_t seed) {
    IdxImages images;
    images.count = static_cast<std::uint32_t>(count);
    images.rows = 28;
    images.cols = 28;
    images.pixels.resize(static_cast<std::size_t>(count) * 784);
    IdxLabels labels;
    labels.count = static_cast<std::uint32_t>(count);
    labels.labels.resize(static_cast<std::size_t>(count));

    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        const int digit = i % 10;
        labels.labels[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(digit);
        std::uint8_t* px = images.pixels.data() + static_cast<std::size_t>(i) * 784;
        for (int r = 0; r < 28; ++r) {
            for (int c = 0; c < 28; ++c) {
                int base;
                if (digit == 0) {
                    base = c < 14 ? 190 : 15;
                } else if (digit == 7) {
                    base = r < 7 ? 190 : 15;
                } else {
                    base = (digit * 31 + r * 7 + c * 13) % 60;
                }
                const int noise = static_cast<int>(rng.bounded(41));
                px[r * 28 + c] = static_cast<std::uint8_t>(std::min(255, base + noise));
            }
        }
    }
    return {std::move(images), std::move(labels)};
}

void write_synthetic_mnist_dir(const std::filesystem::path& dir, int train_count, int test_count,
                               std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    const auto [train_images, train_labels] = make_synthetic_mnist(train_count, seed);
    const auto [test_images, test_labels] = make_synthetic_mnist(test_count, seed + 1);
    write_file_atomic(dir / kMnistFileNames[0], gzip_compress(serialize_idx_images(train_images)));
    write_file_atomic(dir / kMnistFileNames[1], gzip_compress(serialize_idx_labels(train_labels)));
    write_file_atomic(dir / kMnistFileNames[2], gzip_compress(serialize_idx_images(test_images)));
    write_file_atomic(dir / kMnistFileNames[3], gzip_compress(serialize_idx_labels(test_labels)));
}

std::filesystem::path fresh_temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto dir = std::filesystem::temp_directory_path() /
                     ("qcnn_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace qcnn::testing
