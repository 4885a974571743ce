#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qcnn {

struct RunMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double test_loss = 0.0;
    double test_accuracy = 0.0;
    std::int64_t wall_time_ms = 0; // cumulative since training start
};

inline constexpr const char* kMetricsCsvHeader =
    "epoch,train_loss,train_accuracy,test_loss,test_accuracy,wall_time_ms";

// Shortest round-trippable decimal form; identical inputs print identically,
// which is what the byte-level CSV determinism contract relies on.
std::string format_double(double v);

std::string metrics_to_csv(std::span<const RunMetrics> rows);
std::vector<RunMetrics> parse_metrics_csv(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);

// Write-temp-then-rename in the destination directory.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

} // namespace qcnn
