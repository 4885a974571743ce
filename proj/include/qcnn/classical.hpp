#pragma once

#include <span>
#include <vector>

#include "qcnn/rng.hpp"
#include "qcnn/training.hpp"

namespace qcnn {

// Fully connected baseline: input -> hidden RELU -> 1 SIGMOID, MSE loss.
// Flat parameter layout: W1 (hidden x input, row-major), b1, W2 (1 x hidden), b2.
// Init: He-uniform for W1 (draws in layout order), zero biases, Xavier-uniform
// for W2.
struct NnModel {
    int input = 784;
    int hidden = 128;

    int parameter_count() const { return hidden * input + hidden + hidden + 1; }
    void init(Rng& rng, std::span<double> params) const;
    double predict(std::span<const double> params, std::span<const double> x) const;
    // Adds the gradient of (yhat - y)^2 for one sample into grad.
    void accumulate_gradient(std::span<const double> params, std::span<const double> x,
                             int label, std::span<double> grad) const;
};

// Small convolutional baseline:
//   in_h x in_w -> Conv(filters, 3x3, stride 1, valid) RELU
//               -> MaxPool 2x2 stride 2 -> flatten
//               -> hidden RELU -> 1 SIGMOID
// Flat layout: kernels (filters x 3 x 3), conv biases, W1 (hidden x flat),
// b1, W2 (1 x hidden), b2. Feature maps are filter-major.
// Max-pool ties route the gradient to the first maximum in scan order.
struct CnnModel {
    static constexpr int kKernel = 3;
    static constexpr int kPool = 2;

    int in_h = 28;
    int in_w = 28;
    int filters = 8;
    int hidden = 64;

    CnnModel() = default;
    CnnModel(int h, int w, int f, int hid);

    int conv_h() const { return in_h - kKernel + 1; }
    int conv_w() const { return in_w - kKernel + 1; }
    int pooled_h() const { return conv_h() / kPool; }
    int pooled_w() const { return conv_w() / kPool; }
    int flat() const { return pooled_h() * pooled_w() * filters; }
    int parameter_count() const {
        return filters * kKernel * kKernel + filters + hidden * flat() + hidden + hidden + 1;
    }

    void init(Rng& rng, std::span<double> params) const;
    double predict(std::span<const double> params, std::span<const double> x) const;
    void accumulate_gradient(std::span<const double> params, std::span<const double> x,
                             int label, std::span<double> grad) const;
};

// 2x2 stride-2 max pooling over a filter-major stack of maps; ties go to the
// first maximum in scan order. backward routes gradients only to the argmax
// cells.
void maxpool_forward(std::span<const double> maps, int n_maps, int h, int w,
                     std::span<double> pooled, std::span<int> argmax);
void maxpool_backward(std::span<const double> dpooled, std::span<const int> argmax,
                      std::span<double> dmaps);

// Epoch-driver adapters; per-sample gradients are computed into private
// buffers and reduced in sample order, so results do not depend on the
// thread count.
TrainableModel make_trainable(const NnModel& model, int threads);
TrainableModel make_trainable(const CnnModel& model, int threads);

} // namespace qcnn
