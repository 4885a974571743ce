#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qcnn/ansatz.hpp"
#include "qcnn/dataset.hpp"
#include "qcnn/metrics.hpp"
#include "qcnn/rng.hpp"

namespace qcnn {

enum class GradientMethod { FiniteDifference, ParameterShift };

GradientMethod gradient_method_from_string(const std::string& s);
std::string to_string(GradientMethod m);

struct TrainingConfig {
    double learning_rate = 0.1; // in [0, 10]; 0 means evaluate-only epochs
    int epochs = 1;
    int batch_size = 16;
    GradientMethod gradient_method = GradientMethod::FiniteDifference;
    double fd_epsilon = 1e-4;
    std::uint64_t seed = 42;
    int threads = 0; // 0 = hardware concurrency
};

void validate(const TrainingConfig& cfg, std::size_t dataset_size);

struct LossReport {
    double loss = 0.0;
    double accuracy = 0.0;
    int n = 0;
};

// MSE loss (1/n) sum (y_i - yhat_i)^2 plus the 0.5-threshold accuracy
// (a prediction of exactly 0.5 counts as label 0). Per-sample terms are
// summed in sorted order so the result is bit-exact under any sample
// permutation.
LossReport mse_loss(std::span<const double> predictions, std::span<const int> labels);

// Mean gradient of the MSE loss over the batch.
//   FiniteDifference: central difference per coordinate with fd_epsilon.
//   ParameterShift:   d yhat/d theta_j from the per-parameter shift rule,
//                     chained through d L/d yhat_i = 2 (yhat_i - y_i)/n.
std::vector<double> gradient(const QuantumModel& model, std::span<const double> theta,
                             std::span<const Sample* const> batch, const TrainingConfig& cfg);

// Anything the epoch driver can train: quantum circuits and the classical
// baselines both reduce to this.
struct TrainableModel {
    std::string name;
    int parameter_count = 0;
    // Draws initial parameters from the stream (documented per model).
    std::function<void(Rng&, std::span<double>)> init;
    std::function<std::vector<double>(std::span<const double>, std::span<const Sample* const>)>
        batch_gradient;
    std::function<double(std::span<const double>, const Sample&)> predict;
};

// Wraps a quantum model: init is Uniform(-pi, pi) per coordinate in index
// order; batch_gradient is gradient() above with cfg's method.
TrainableModel make_trainable(const QuantumModel& model, const TrainingConfig& cfg);

struct TrainResult {
    std::vector<double> theta;
    std::vector<RunMetrics> trail;     // one row per epoch, epochs from 1
    LossReport initial_train;          // evaluated at theta_0 before any update
    LossReport initial_test;
};

// Seeded epoch driver. Per epoch: Fisher-Yates shuffle of the train split,
// consecutive batches (last partial batch kept), theta <- theta - alpha * grad
// per batch, then full train/test evaluation. The rng stream order is:
// init draws first, then each epoch's shuffle.
TrainResult train(const TrainableModel& model, const Dataset& data, const TrainingConfig& cfg);

// Full-split evaluation (deterministic parallel map, ordered reduction).
LossReport evaluate(const TrainableModel& model, std::span<const double> theta,
                    std::span<const Sample> samples, int threads);

} // namespace qcnn
