#include "qcnn/classical.hpp"

#include <cmath>
#include <thread>

#include "qcnn/errors.hpp"

namespace qcnn {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double he_limit(int fan_in) { return std::sqrt(6.0 / fan_in); }
double xavier_limit(int fan_in, int fan_out) { return std::sqrt(6.0 / (fan_in + fan_out)); }

void check_input(std::size_t got, std::size_t want, const char* model) {
    if (got != want) {
        throw config_error(std::string(model) + ": input length " + std::to_string(got) +
                           ", expected " + std::to_string(want));
    }
}

// Shared by both adapters: mean of per-sample gradients, reduced in sample
// order regardless of how many threads computed them.
template <typename Model>
std::vector<double> batch_gradient(const Model& model, std::span<const double> params,
                                   std::span<const Sample* const> batch, int threads) {
    if (batch.empty()) throw config_error("batch_gradient: empty batch");
    const int p = model.parameter_count();
    const int n = static_cast<int>(batch.size());
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));

    std::vector<std::vector<double>> per_sample(
        static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(p), 0.0));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) {
            model.accumulate_gradient(params, batch[i]->image, batch[i]->label,
                                      per_sample[static_cast<std::size_t>(i)]);
        }
    } else {
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t]() {
                try {
                    for (int i = t; i < n; i += threads) {
                        model.accumulate_gradient(params, batch[i]->image, batch[i]->label,
                                                  per_sample[static_cast<std::size_t>(i)]);
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    std::vector<double> grad(static_cast<std::size_t>(p), 0.0);
    for (int i = 0; i < n; ++i) {
        const auto& g = per_sample[static_cast<std::size_t>(i)];
        for (int j = 0; j < p; ++j) grad[static_cast<std::size_t>(j)] += g[static_cast<std::size_t>(j)];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& v : grad) v *= inv_n;
    return grad;
}

} // namespace

void NnModel::init(Rng& rng, std::span<double> params) const {
    if (static_cast<int>(params.size()) != parameter_count()) {
        throw config_error("NnModel::init: parameter vector size mismatch");
    }
    const double l1 = he_limit(input);
    const double l2 = xavier_limit(hidden, 1);
    std::size_t k = 0;
    for (int i = 0; i < hidden * input; ++i) params[k++] = rng.uniform(-l1, l1);
    for (int i = 0; i < hidden; ++i) params[k++] = 0.0;
    for (int i = 0; i < hidden; ++i) params[k++] = rng.uniform(-l2, l2);
    params[k++] = 0.0;
}

double NnModel::predict(std::span<const double> params, std::span<const double> x) const {
    check_input(x.size(), static_cast<std::size_t>(input), "NnModel");
    const double* w1 = params.data();
    const double* b1 = w1 + hidden * input;
    const double* w2 = b1 + hidden;
    const double b2 = w2[hidden];

    double z2 = b2;
    for (int h = 0; h < hidden; ++h) {
        const double* row = w1 + static_cast<std::size_t>(h) * input;
        double z = b1[h];
        for (int i = 0; i < input; ++i) z += row[i] * x[i];
        if (z > 0.0) z2 += w2[h] * z; // relu
    }
    return sigmoid(z2);
}

void NnModel::accumulate_gradient(std::span<const double> params, std::span<const double> x,
                                  int label, std::span<double> grad) const {
    check_input(x.size(), static_cast<std::size_t>(input), "NnModel");
    const double* w1 = params.data();
    const double* b1 = w1 + hidden * input;
    const double* w2 = b1 + hidden;
    const double b2 = w2[hidden];

    std::vector<double> a1(static_cast<std::size_t>(hidden));
    double z2 = b2;
    for (int h = 0; h < hidden; ++h) {
        const double* row = w1 + static_cast<std::size_t>(h) * input;
        double z = b1[h];
        for (int i = 0; i < input; ++i) z += row[i] * x[i];
        a1[static_cast<std::size_t>(h)] = z > 0.0 ? z : 0.0;
        z2 += w2[h] * a1[static_cast<std::size_t>(h)];
    }
    const double yhat = sigmoid(z2);
    const double dz2 = 2.0 * (yhat - label) * yhat * (1.0 - yhat);

    double* gw1 = grad.data();
    double* gb1 = gw1 + hidden * input;
    double* gw2 = gb1 + hidden;
    double* gb2 = gw2 + hidden;

    *gb2 += dz2;
    for (int h = 0; h < hidden; ++h) {
        gw2[h] += dz2 * a1[static_cast<std::size_t>(h)];
        if (a1[static_cast<std::size_t>(h)] <= 0.0) continue;
        const double dz1 = dz2 * w2[h];
        gb1[h] += dz1;
        double* grow = gw1 + static_cast<std::size_t>(h) * input;
        for (int i = 0; i < input; ++i) grow[i] += dz1 * x[i];
    }
}

CnnModel::CnnModel(int h, int w, int f, int hid) : in_h(h), in_w(w), filters(f), hidden(hid) {
    if (in_h < kKernel || in_w < kKernel || filters < 1 || hidden < 1) {
        throw config_error("CnnModel: degenerate architecture");
    }
    if (conv_h() % kPool != 0 || conv_w() % kPool != 0) {
        throw config_error("CnnModel: conv output " + std::to_string(conv_h()) + "x" +
                           std::to_string(conv_w()) + " not divisible by the pooling window");
    }
}

void CnnModel::init(Rng& rng, std::span<double> params) const {
    if (static_cast<int>(params.size()) != parameter_count()) {
        throw config_error("CnnModel::init: parameter vector size mismatch");
    }
    const double lk = he_limit(kKernel * kKernel);
    const double l1 = he_limit(flat());
    const double l2 = xavier_limit(hidden, 1);
    std::size_t k = 0;
    for (int i = 0; i < filters * kKernel * kKernel; ++i) params[k++] = rng.uniform(-lk, lk);
    for (int i = 0; i < filters; ++i) params[k++] = 0.0;
    for (int i = 0; i < hidden * flat(); ++i) params[k++] = rng.uniform(-l1, l1);
    for (int i = 0; i < hidden; ++i) params[k++] = 0.0;
    for (int i = 0; i < hidden; ++i) params[k++] = rng.uniform(-l2, l2);
    params[k++] = 0.0;
}

namespace {

struct CnnForward {
    std::vector<double> conv;   // relu(conv), filter-major
    std::vector<double> pooled; // flat
    std::vector<int> argmax;    // index into conv per pooled cell
    std::vector<double> a1;     // hidden activations
    double yhat = 0.0;
};

CnnForward cnn_forward_pass(const CnnModel& m, std::span<const double> params,
                            std::span<const double> x) {
    const int ch = m.conv_h(), cw = m.conv_w();
    const double* kern = params.data();
    const double* kb = kern + m.filters * CnnModel::kKernel * CnnModel::kKernel;
    const double* w1 = kb + m.filters;
    const double* b1 = w1 + static_cast<std::size_t>(m.hidden) * m.flat();
    const double* w2 = b1 + m.hidden;
    const double b2 = w2[m.hidden];

    CnnForward f;
    f.conv.assign(static_cast<std::size_t>(m.filters) * ch * cw, 0.0);
    for (int fi = 0; fi < m.filters; ++fi) {
        const double* kf = kern + static_cast<std::size_t>(fi) * 9;
        for (int y = 0; y < ch; ++y) {
            for (int xx = 0; xx < cw; ++xx) {
                double z = kb[fi];
                for (int u = 0; u < 3; ++u)
                    for (int v = 0; v < 3; ++v)
                        z += kf[u * 3 + v] * x[static_cast<std::size_t>(y + u) * m.in_w + (xx + v)];
                f.conv[(static_cast<std::size_t>(fi) * ch + y) * cw + xx] = z > 0.0 ? z : 0.0;
            }
        }
    }

    f.pooled.assign(static_cast<std::size_t>(m.flat()), 0.0);
    f.argmax.assign(static_cast<std::size_t>(m.flat()), 0);
    maxpool_forward(f.conv, m.filters, ch, cw, f.pooled, f.argmax);

    f.a1.assign(static_cast<std::size_t>(m.hidden), 0.0);
    double z2 = b2;
    for (int h = 0; h < m.hidden; ++h) {
        const double* row = w1 + static_cast<std::size_t>(h) * m.flat();
        double z = b1[h];
        for (int i = 0; i < m.flat(); ++i) z += row[i] * f.pooled[static_cast<std::size_t>(i)];
        f.a1[static_cast<std::size_t>(h)] = z > 0.0 ? z : 0.0;
        z2 += w2[h] * f.a1[static_cast<std::size_t>(h)];
    }
    f.yhat = sigmoid(z2);
    return f;
}

} // namespace

double CnnModel::predict(std::span<const double> params, std::span<const double> x) const {
    check_input(x.size(), static_cast<std::size_t>(in_h) * in_w, "CnnModel");
    return cnn_forward_pass(*this, params, x).yhat;
}

void CnnModel::accumulate_gradient(std::span<const double> params, std::span<const double> x,
                                   int label, std::span<double> grad) const {
    check_input(x.size(), static_cast<std::size_t>(in_h) * in_w, "CnnModel");
    const CnnForward f = cnn_forward_pass(*this, params, x);
    const int ch = conv_h(), cw = conv_w();

    const double* w1 = params.data() + filters * 9 + filters;
    const double* w2 = w1 + static_cast<std::size_t>(hidden) * flat() + hidden;

    double* gk = grad.data();
    double* gkb = gk + filters * 9;
    double* gw1 = gkb + filters;
    double* gb1 = gw1 + static_cast<std::size_t>(hidden) * flat();
    double* gw2 = gb1 + hidden;
    double* gb2 = gw2 + hidden;

    const double dz2 = 2.0 * (f.yhat - label) * f.yhat * (1.0 - f.yhat);
    *gb2 += dz2;

    std::vector<double> dpooled(static_cast<std::size_t>(flat()), 0.0);
    for (int h = 0; h < hidden; ++h) {
        gw2[h] += dz2 * f.a1[static_cast<std::size_t>(h)];
        if (f.a1[static_cast<std::size_t>(h)] <= 0.0) continue;
        const double dz1 = dz2 * w2[h];
        gb1[h] += dz1;
        double* grow = gw1 + static_cast<std::size_t>(h) * flat();
        const double* row = w1 + static_cast<std::size_t>(h) * flat();
        for (int i = 0; i < flat(); ++i) {
            grow[i] += dz1 * f.pooled[static_cast<std::size_t>(i)];
            dpooled[static_cast<std::size_t>(i)] += dz1 * row[i];
        }
    }

    // Route pooled gradients to the argmax cells, then gate by the conv relu.
    std::vector<double> dconv(f.conv.size(), 0.0);
    maxpool_backward(dpooled, f.argmax, dconv);
    for (std::size_t i = 0; i < dconv.size(); ++i) {
        if (f.conv[i] <= 0.0) dconv[i] = 0.0;
    }

    for (int fi = 0; fi < filters; ++fi) {
        double* gkf = gk + static_cast<std::size_t>(fi) * 9;
        for (int y = 0; y < ch; ++y) {
            for (int xx = 0; xx < cw; ++xx) {
                const double d = dconv[(static_cast<std::size_t>(fi) * ch + y) * cw + xx];
                if (d == 0.0) continue;
                gkb[fi] += d;
                for (int u = 0; u < 3; ++u)
                    for (int v = 0; v < 3; ++v)
                        gkf[u * 3 + v] +=
                            d * x[static_cast<std::size_t>(y + u) * in_w + (xx + v)];
            }
        }
    }
}

void maxpool_forward(std::span<const double> maps, int n_maps, int h, int w,
                     std::span<double> pooled, std::span<int> argmax) {
    if (h % 2 != 0 || w % 2 != 0) {
        throw config_error("maxpool_forward: input dims must be even, got " + std::to_string(h) +
                           "x" + std::to_string(w));
    }
    const int ph = h / 2, pw = w / 2;
    if (maps.size() != static_cast<std::size_t>(n_maps) * h * w ||
        pooled.size() != static_cast<std::size_t>(n_maps) * ph * pw ||
        argmax.size() != pooled.size()) {
        throw config_error("maxpool_forward: buffer size mismatch");
    }
    for (int fi = 0; fi < n_maps; ++fi) {
        for (int py = 0; py < ph; ++py) {
            for (int px = 0; px < pw; ++px) {
                int best_idx = static_cast<int>((static_cast<std::size_t>(fi) * h + 2 * py) * w + 2 * px);
                double best = maps[static_cast<std::size_t>(best_idx)];
                for (int dy = 0; dy < 2; ++dy) {
                    for (int dx = 0; dx < 2; ++dx) {
                        const int idx = static_cast<int>(
                            (static_cast<std::size_t>(fi) * h + (2 * py + dy)) * w + (2 * px + dx));
                        if (maps[static_cast<std::size_t>(idx)] > best) {
                            best = maps[static_cast<std::size_t>(idx)];
                            best_idx = idx;
                        }
                    }
                }
                const std::size_t pidx = (static_cast<std::size_t>(fi) * ph + py) * pw + px;
                pooled[pidx] = best;
                argmax[pidx] = best_idx;
            }
        }
    }
}

void maxpool_backward(std::span<const double> dpooled, std::span<const int> argmax,
                      std::span<double> dmaps) {
    if (dpooled.size() != argmax.size()) {
        throw config_error("maxpool_backward: buffer size mismatch");
    }
    for (std::size_t i = 0; i < dpooled.size(); ++i) {
        if (dpooled[i] == 0.0) continue;
        dmaps[static_cast<std::size_t>(argmax[i])] += dpooled[i];
    }
}

TrainableModel make_trainable(const NnModel& model, int threads) {
    TrainableModel t;
    t.name = "nn";
    t.parameter_count = model.parameter_count();
    t.init = [model](Rng& rng, std::span<double> p) { model.init(rng, p); };
    t.batch_gradient = [model, threads](std::span<const double> p,
                                        std::span<const Sample* const> batch) {
        return batch_gradient(model, p, batch, threads);
    };
    t.predict = [model](std::span<const double> p, const Sample& s) {
        return model.predict(p, s.image);
    };
    return t;
}

TrainableModel make_trainable(const CnnModel& model, int threads) {
    TrainableModel t;
    t.name = "cnn";
    t.parameter_count = model.parameter_count();
    t.init = [model](Rng& rng, std::span<double> p) { model.init(rng, p); };
    t.batch_gradient = [model, threads](std::span<const double> p,
                                        std::span<const Sample* const> batch) {
        return batch_gradient(model, p, batch, threads);
    };
    t.predict = [model](std::span<const double> p, const Sample& s) {
        return model.predict(p, s.image);
    };
    return t;
}

} // namespace qcnn
