#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "qcnn/feature_map.hpp"
#include "qcnn/training.hpp"

namespace qcnn {

enum class ModelKind { QCNN, QNN, CNN, NN };

ModelKind model_kind_from_string(const std::string& s);
std::string to_string(ModelKind m);

struct DatasetOptions {
    int train_size = 1000;
    int test_size = 500;
    int digit_label0 = 0;
    int digit_label1 = 7;
    std::uint64_t seed = 42; // defaults to the master seed
    std::filesystem::path data_dir = "data/mnist";
    std::string mirror = "https://ossci-datasets.s3.amazonaws.com/mnist/";
};

struct ExperimentConfig {
    ModelKind model = ModelKind::QCNN;
    std::string run_id; // default "<model>-s<seed>"
    std::filesystem::path output_dir = "runs";
    std::uint64_t seed = 42;
    DatasetOptions dataset;
    FeatureMapSpec feature_map;
    TrainingConfig training;
    int qnn_depth = 2;
};

// Flat `key = value` config text with '#' comments. Duplicate keys are an
// error; unknown keys are rejected at config_from_kv.
using KvMap = std::map<std::string, std::string>;

KvMap parse_config_text(const std::string& text);

// Builds a validated config. Per-model training defaults when the keys are
// absent: learning_rate 0.1 (QCNN/QNN) or 0.5 (CNN/NN); epochs 20 (QCNN/QNN),
// 10 (CNN), 20 (NN); batch_size 16. dataset.seed and training.seed default to
// the master `seed`.
ExperimentConfig config_from_kv(const KvMap& kv);

// Fully resolved echo; config_from_kv(config_to_kv(c)) reproduces c.
KvMap config_to_kv(const ExperimentConfig& cfg);

} // namespace qcnn
