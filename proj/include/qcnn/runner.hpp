#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qcnn/config.hpp"
#include "qcnn/dataset.hpp"
#include "qcnn/metrics.hpp"

namespace qcnn {

struct RunSummary {
    std::string run_id;
    std::string model;
    int epochs = 0;
    double final_train_loss = 0.0;
    double final_train_accuracy = 0.0;
    double final_test_loss = 0.0;
    double final_test_accuracy = 0.0;
    double initial_train_loss = 0.0;
    double initial_test_loss = 0.0;
    std::int64_t wall_time_ms = 0;
    KvMap config; // fully resolved echo; a run is re-executable from it
};

// Locates the MNIST files in dataset.data_dir (plain or .gz names), fetching
// from the configured mirror when absent, then parses and preprocesses.
Dataset load_dataset(const ExperimentConfig& cfg);

// prepare -> train -> evaluate for the configured model. Writes
// <output_dir>/<run_id>/metrics.csv and summary.txt (single-line JSON).
// Rerunning the same run_id overwrites atomically.
RunSummary run(const ExperimentConfig& cfg);

RunSummary read_summary(const std::filesystem::path& output_dir, const std::string& run_id);

std::string summary_to_json_line(const RunSummary& s);

struct SweepRow {
    std::string axis;
    int value = 0;
    bool ok = false;
    std::string error;
    RunSummary summary; // valid when ok
};

struct SweepOutcome {
    std::vector<SweepRow> rows;
    bool any_failed = false;
    std::filesystem::path csv_path;
};

// axis is "batch_size" or "train_size"; one seeded run per value, run_id
// suffixed "<base>-<axis><value>". Row failures are recorded and the sweep
// continues.
SweepOutcome sweep(const ExperimentConfig& base, const std::string& axis,
                   const std::vector<int>& values);

struct CompareResult {
    std::string text;                  // fixed-width table
    std::filesystem::path csv_path;    // written CSV
    std::vector<std::string> warnings; // duplicate ids etc.
};

// Rows sorted by final test accuracy, descending; duplicate ids are
// deduplicated with a warning; a missing summary is a data error naming the id.
CompareResult compare(const std::filesystem::path& output_dir,
                      const std::vector<std::string>& run_ids);

// Loss/accuracy curves as a dependency-free SVG.
std::string metrics_svg(const std::vector<RunMetrics>& rows, const std::string& title);
std::filesystem::path plot_run(const std::filesystem::path& output_dir, const std::string& run_id);

} // namespace qcnn
