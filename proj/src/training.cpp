#include "qcnn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

#include "qcnn/errors.hpp"

namespace qcnn {

namespace {

// Static chunking over [0, n); deterministic regardless of scheduling since
// every index writes only its own slot.
void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (int i = t; i < n; i += threads) body(i);
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

// Permutation-invariant sum: sort the terms, then accumulate.
double sorted_mean(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += t;
    return acc / static_cast<double>(terms.size());
}

// Encodings are theta-independent; computing them once per batch removes the
// encoding cost from every gradient probe.
struct EncodedBatch {
    std::vector<StateVector> states; // empty when the model has no split path
    const QuantumModel* model;
    std::span<const Sample* const> batch;

    EncodedBatch(const QuantumModel& m, std::span<const Sample* const> b) : model(&m), batch(b) {
        if (m.encode_features && m.run_encoded) {
            states.reserve(b.size());
            for (const Sample* s : b) states.push_back(m.encode_features(s->features));
        }
    }

    double predict(std::span<const double> theta, std::size_t i) const {
        if (!states.empty()) return model->run_encoded(theta, states[i]);
        return model->predict(theta, batch[i]->features);
    }
};

double batch_loss(const EncodedBatch& encoded, std::span<const double> theta) {
    std::vector<double> terms(encoded.batch.size());
    for (std::size_t i = 0; i < encoded.batch.size(); ++i) {
        const double yhat = encoded.predict(theta, i);
        const double r = static_cast<double>(encoded.batch[i]->label) - yhat;
        terms[i] = r * r;
    }
    return sorted_mean(std::move(terms));
}

} // namespace

GradientMethod gradient_method_from_string(const std::string& s) {
    if (s == "finite_difference" || s == "fd") return GradientMethod::FiniteDifference;
    if (s == "parameter_shift" || s == "ps") return GradientMethod::ParameterShift;
    throw config_error("unknown gradient method: " + s +
                       " (expected finite_difference or parameter_shift)");
}

std::string to_string(GradientMethod m) {
    return m == GradientMethod::FiniteDifference ? "finite_difference" : "parameter_shift";
}

void validate(const TrainingConfig& cfg, std::size_t dataset_size) {
    // 0 is admitted so that the zero-step contract (theta unchanged) is testable.
    if (!(cfg.learning_rate >= 0.0) || cfg.learning_rate > 10.0) {
        throw config_error("learning rate must be in [0, 10], got " +
                           std::to_string(cfg.learning_rate));
    }
    if (cfg.epochs < 1) throw config_error("epochs must be >= 1");
    if (cfg.batch_size < 1) throw config_error("batch size must be >= 1");
    if (dataset_size > 0 && static_cast<std::size_t>(cfg.batch_size) > dataset_size) {
        throw config_error("batch size " + std::to_string(cfg.batch_size) +
                           " exceeds dataset size " + std::to_string(dataset_size));
    }
    if (!(cfg.fd_epsilon > 0.0)) throw config_error("fd_epsilon must be positive");
}

LossReport mse_loss(std::span<const double> predictions, std::span<const int> labels) {
    if (predictions.empty()) throw config_error("mse_loss: empty batch");
    if (predictions.size() != labels.size()) {
        throw config_error("mse_loss: " + std::to_string(predictions.size()) +
                           " predictions vs " + std::to_string(labels.size()) + " labels");
    }
    std::vector<double> terms(predictions.size());
    int correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double yhat = predictions[i];
        const int y = labels[i];
        if (!std::isfinite(yhat)) {
            throw numerical_error("mse_loss: non-finite prediction at index " + std::to_string(i));
        }
        if (y != 0 && y != 1) {
            throw config_error("mse_loss: label must be 0 or 1, got " + std::to_string(y));
        }
        const double r = static_cast<double>(y) - yhat;
        terms[i] = r * r;
        const int predicted = yhat > 0.5 ? 1 : 0;
        if (predicted == y) ++correct;
    }
    LossReport rep;
    rep.n = static_cast<int>(predictions.size());
    rep.loss = sorted_mean(std::move(terms));
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(rep.n);
    return rep;
}

std::vector<double> gradient(const QuantumModel& model, std::span<const double> theta,
                             std::span<const Sample* const> batch, const TrainingConfig& cfg) {
    if (batch.empty()) throw config_error("gradient: empty batch");
    if (static_cast<int>(theta.size()) != model.parameter_count) {
        throw config_error("gradient: theta length mismatch");
    }
    const int p = model.parameter_count;
    std::vector<double> grad(static_cast<std::size_t>(p), 0.0);
    const EncodedBatch encoded(model, batch);

    if (cfg.gradient_method == GradientMethod::FiniteDifference) {
        const double eps = cfg.fd_epsilon;
        parallel_for(p, cfg.threads, [&](int j) {
            std::vector<double> probe(theta.begin(), theta.end());
            probe[static_cast<std::size_t>(j)] = theta[j] + eps;
            const double lp = batch_loss(encoded, probe);
            probe[static_cast<std::size_t>(j)] = theta[j] - eps;
            const double lm = batch_loss(encoded, probe);
            if (!std::isfinite(lp) || !std::isfinite(lm)) {
                throw numerical_error("gradient: non-finite loss probing coordinate " +
                                      std::to_string(j));
            }
            grad[static_cast<std::size_t>(j)] = (lp - lm) / (2.0 * eps);
        });
        return grad;
    }

    // Parameter shift. Base predictions once, then two shifted evaluations
    // per coordinate; the per-sample terms are reduced with the same
    // permutation-invariant sum the loss uses.
    if (model.shift_rules.size() != static_cast<std::size_t>(p)) {
        throw config_error("gradient: model has no shift rule table");
    }
    const std::size_t n = batch.size();
    std::vector<double> base(n);
    for (std::size_t i = 0; i < n; ++i) {
        base[i] = encoded.predict(theta, i);
    }
    parallel_for(p, cfg.threads, [&](int j) {
        const ShiftRule rule = model.shift_rules[static_cast<std::size_t>(j)];
        const double s = shift_amount(rule);
        const double c = shift_coefficient(rule);
        std::vector<double> probe(theta.begin(), theta.end());
        std::vector<double> terms(n);
        for (std::size_t i = 0; i < n; ++i) {
            probe[static_cast<std::size_t>(j)] = theta[j] + s;
            const double up = encoded.predict(probe, i);
            probe[static_cast<std::size_t>(j)] = theta[j] - s;
            const double down = encoded.predict(probe, i);
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw numerical_error("gradient: non-finite prediction probing coordinate " +
                                      std::to_string(j));
            }
            const double dyhat = c * (up - down);
            terms[i] = 2.0 * (base[i] - static_cast<double>(batch[i]->label)) * dyhat;
        }
        probe[static_cast<std::size_t>(j)] = theta[j];
        grad[static_cast<std::size_t>(j)] = sorted_mean(std::move(terms));
    });
    return grad;
}

TrainableModel make_trainable(const QuantumModel& model, const TrainingConfig& cfg) {
    TrainableModel t;
    t.name = model.name;
    t.parameter_count = model.parameter_count;
    t.init = [](Rng& rng, std::span<double> theta) {
        constexpr double pi = std::numbers::pi;
        for (double& v : theta) v = rng.uniform(-pi, pi);
    };
    t.batch_gradient = [model, cfg](std::span<const double> theta,
                                    std::span<const Sample* const> batch) {
        return gradient(model, theta, batch, cfg);
    };
    t.predict = [model](std::span<const double> theta, const Sample& sample) {
        return model.predict(theta, sample.features);
    };
    return t;
}

LossReport evaluate(const TrainableModel& model, std::span<const double> theta,
                    std::span<const Sample> samples, int threads) {
    std::vector<double> predictions(samples.size());
    std::vector<int> labels(samples.size());
    parallel_for(static_cast<int>(samples.size()), threads, [&](int i) {
        predictions[static_cast<std::size_t>(i)] =
            model.predict(theta, samples[static_cast<std::size_t>(i)]);
        labels[static_cast<std::size_t>(i)] = samples[static_cast<std::size_t>(i)].label;
    });
    return mse_loss(predictions, labels);
}

TrainResult train(const TrainableModel& model, const Dataset& data, const TrainingConfig& cfg) {
    if (data.train.empty()) throw config_error("train: empty training split");
    if (data.test.empty()) throw config_error("train: empty test split");
    validate(cfg, data.train.size());

    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(cfg.seed);

    TrainResult result;
    result.theta.assign(static_cast<std::size_t>(model.parameter_count), 0.0);
    model.init(rng, result.theta);

    result.initial_train = evaluate(model, result.theta, data.train, cfg.threads);
    result.initial_test = evaluate(model, result.theta, data.test, cfg.threads);

    std::vector<int> order(data.train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            std::vector<const Sample*> batch;
            batch.reserve(end - start);
            for (std::size_t k = start; k < end; ++k) {
                batch.push_back(&data.train[static_cast<std::size_t>(order[k])]);
            }
            const std::vector<double> grad = model.batch_gradient(result.theta, batch);
            for (std::size_t j = 0; j < result.theta.size(); ++j) {
                result.theta[j] -= cfg.learning_rate * grad[j];
                if (!std::isfinite(result.theta[j])) {
                    throw numerical_error("train: parameter " + std::to_string(j) +
                                          " became non-finite in epoch " + std::to_string(epoch) +
                                          " (batch at sample offset " + std::to_string(start) + ")");
                }
            }
        }
        const LossReport train_rep = evaluate(model, result.theta, data.train, cfg.threads);
        const LossReport test_rep = evaluate(model, result.theta, data.test, cfg.threads);
        const auto now = std::chrono::steady_clock::now();
        RunMetrics row;
        row.epoch = epoch;
        row.train_loss = train_rep.loss;
        row.train_accuracy = train_rep.accuracy;
        row.test_loss = test_rep.loss;
        row.test_accuracy = test_rep.accuracy;
        row.wall_time_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(now - t0).count();
        result.trail.push_back(row);
    }
    return result;
}

} // namespace qcnn
