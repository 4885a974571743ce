#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "qcnn/ansatz.hpp"
#include "qcnn/errors.hpp"
#include "qcnn/training.hpp"

using namespace qcnn;

namespace {
constexpr double kPi = std::numbers::pi;

Sample quantum_sample(std::vector<double> features, int label) {
    Sample s;
    s.features = std::move(features);
    s.label = label;
    return s;
}

std::vector<const Sample*> pointers(const std::vector<Sample>& samples) {
    std::vector<const Sample*> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) out.push_back(&s);
    return out;
}

std::vector<Sample> random_quantum_batch(Rng& rng, int n, int num_qubits) {
    std::vector<Sample> out;
    for (int i = 0; i < n; ++i) {
        std::vector<double> x(static_cast<std::size_t>(num_qubits));
        for (double& v : x) v = rng.uniform(0.0, kPi);
        out.push_back(quantum_sample(std::move(x), static_cast<int>(rng.bounded(2))));
    }
    return out;
}

// Synthetic linearly separable quantum dataset: label = 1 iff x0 > pi/2.
Dataset separable_dataset(Rng& rng, int train_n, int test_n, int num_qubits) {
    Dataset ds;
    const auto draw = [&](int n, std::vector<Sample>& into) {
        for (int i = 0; i < n; ++i) {
            std::vector<double> x(static_cast<std::size_t>(num_qubits));
            for (double& v : x) v = rng.uniform(0.0, kPi);
            const int label = x[0] > kPi / 2 ? 1 : 0;
            into.push_back(quantum_sample(std::move(x), label));
        }
    };
    draw(train_n, ds.train);
    draw(test_n, ds.test);
    return ds;
}

TrainingConfig fast_config() {
    TrainingConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.epochs = 1;
    cfg.batch_size = 4;
    cfg.threads = 2;
    return cfg;
}

} // namespace

TEST_CASE("mse_loss worked examples") {
    {
        const double yhat[3] = {1.0, 0.0, 1.0};
        const int y[3] = {1, 0, 1};
        const LossReport r = mse_loss(std::span<const double>(yhat, 3), std::span<const int>(y, 3));
        CHECK(r.loss == 0.0);
        CHECK(r.accuracy == 1.0);
        CHECK(r.n == 3);
    }
    {
        const double yhat[2] = {0.5, 0.5};
        const int y[2] = {1, 0};
        const LossReport r = mse_loss(std::span<const double>(yhat, 2), std::span<const int>(y, 2));
        CHECK(r.loss == 0.25);
        // ties at exactly 0.5 predict label 0: first sample wrong, second right
        CHECK(r.accuracy == 0.5);
    }
    {
        const double yhat[1] = {1.0};
        const int y[1] = {0};
        const LossReport r = mse_loss(std::span<const double>(yhat, 1), std::span<const int>(y, 1));
        CHECK(r.loss == 1.0);
        CHECK(r.accuracy == 0.0);
    }
}

TEST_CASE("mse_loss input validation") {
    const double yhat[2] = {0.1, 0.2};
    const int y[1] = {0};
    CHECK_THROWS_AS(mse_loss(std::span<const double>(yhat, 2), std::span<const int>(y, 1)),
                    config_error);
    CHECK_THROWS_AS(mse_loss({}, {}), config_error);
    const double bad[1] = {std::nan("")};
    const int y1[1] = {0};
    CHECK_THROWS_AS(mse_loss(std::span<const double>(bad, 1), std::span<const int>(y1, 1)),
                    numerical_error);
    const double ok[1] = {0.5};
    const int y2[1] = {2};
    CHECK_THROWS_AS(mse_loss(std::span<const double>(ok, 1), std::span<const int>(y2, 1)),
                    config_error);
}

TEST_CASE("mse_loss is bit-exact under permutation and zero iff perfect") {
    Rng rng(17);
    std::vector<double> yhat(31);
    std::vector<int> y(31);
    for (std::size_t i = 0; i < yhat.size(); ++i) {
        yhat[i] = rng.uniform01();
        y[i] = static_cast<int>(rng.bounded(2));
    }
    const double base = mse_loss(yhat, y).loss;
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<std::size_t> perm(yhat.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        rng.shuffle(perm);
        std::vector<double> py(yhat.size());
        std::vector<int> pl(yhat.size());
        for (std::size_t i = 0; i < perm.size(); ++i) {
            py[i] = yhat[perm[i]];
            pl[i] = y[perm[i]];
        }
        CHECK(mse_loss(py, pl).loss == base); // bitwise
    }
    std::vector<double> exact(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) exact[i] = y[i];
    CHECK(mse_loss(exact, y).loss == 0.0);
}

TEST_CASE("gradient of a constant model is zero for both methods") {
    QuantumModel constant;
    constant.name = "constant";
    constant.parameter_count = 7;
    constant.shift_rules.assign(7, ShiftRule::HalfPi);
    constant.predict = [](std::span<const double>, std::span<const double>) { return 0.7; };

    Rng rng(3);
    const std::vector<Sample> batch = random_quantum_batch(rng, 5, 2);
    const std::vector<double> theta(7, 0.3);

    for (GradientMethod m : {GradientMethod::FiniteDifference, GradientMethod::ParameterShift}) {
        TrainingConfig cfg = fast_config();
        cfg.gradient_method = m;
        const std::vector<double> g = gradient(constant, theta, pointers(batch), cfg);
        for (double v : g) CHECK(v == 0.0);
    }
}

TEST_CASE("parameter-shift and finite-difference gradients agree on a 2-qubit qcnn") {
    const QcnnArchitecture arch = build_qcnn(2);
    const QuantumModel model = make_model(arch, FeatureMapSpec{});
    Rng rng(23);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> theta(static_cast<std::size_t>(arch.parameter_count));
        for (double& v : theta) v = rng.uniform(-kPi, kPi);
        const std::vector<Sample> batch = random_quantum_batch(rng, 4, 2);

        TrainingConfig fd = fast_config();
        fd.gradient_method = GradientMethod::FiniteDifference;
        TrainingConfig ps = fast_config();
        ps.gradient_method = GradientMethod::ParameterShift;

        const std::vector<double> gf = gradient(model, theta, pointers(batch), fd);
        const std::vector<double> gp = gradient(model, theta, pointers(batch), ps);
        for (std::size_t j = 0; j < gf.size(); ++j) {
            CHECK(std::abs(gf[j] - gp[j]) < 1e-5);
        }
    }
}

TEST_CASE("gradient matches the closed-form sinusoid on a single coordinate") {
    // Single conv block; vary one B-rotation angle. The response of any
    // rotation-generated coordinate is yhat(t) = a + b cos(t + c); fit a, b, c
    // from three probes and compare both gradient methods to the derivative.
    const QcnnArchitecture arch = build_qcnn(2);
    const QuantumModel model = make_model(arch, FeatureMapSpec{});
    Rng rng(29);
    std::vector<double> theta(static_cast<std::size_t>(arch.parameter_count));
    for (double& v : theta) v = rng.uniform(-kPi, kPi);
    const std::vector<Sample> batch{quantum_sample({0.3, 2.1}, 1)};
    const int coord = 1; // RY angle of the B rotation on qubit 0

    const auto yhat_at = [&](double t) {
        std::vector<double> probe = theta;
        probe[coord] = t;
        return model.predict(probe, batch[0].features);
    };
    const double t0 = theta[coord];
    const double f0 = yhat_at(0.0);
    const double f_half = yhat_at(kPi / 2);
    const double f_pi = yhat_at(kPi);
    const double a = (f0 + f_pi) / 2.0;
    const double b_cos_c = f0 - a;
    const double b_sin_c = a - f_half;
    // yhat(t) = a + b cos(t + c); d yhat/dt at t0 = -b sin(t0 + c)
    const double dyhat = -(b_cos_c * std::sin(t0) + b_sin_c * std::cos(t0));
    // chain through the squared error of the single sample
    const double y0 = yhat_at(t0);
    const double dloss = 2.0 * (y0 - 1.0) * dyhat;

    for (GradientMethod m : {GradientMethod::FiniteDifference, GradientMethod::ParameterShift}) {
        TrainingConfig cfg = fast_config();
        cfg.gradient_method = m;
        const std::vector<double> g = gradient(model, theta, pointers(batch), cfg);
        CHECK(std::abs(g[coord] - dloss) < 1e-6);
    }
}

TEST_CASE("full-batch gradient is invariant under sample permutation") {
    const QcnnArchitecture arch = build_qcnn(2);
    const QuantumModel model = make_model(arch, FeatureMapSpec{});
    Rng rng(37);
    std::vector<double> theta(static_cast<std::size_t>(arch.parameter_count));
    for (double& v : theta) v = rng.uniform(-kPi, kPi);
    const std::vector<Sample> batch = random_quantum_batch(rng, 7, 2);

    std::vector<const Sample*> fwd = pointers(batch);
    std::vector<const Sample*> rev = fwd;
    std::reverse(rev.begin(), rev.end());
    std::vector<const Sample*> shuffled = fwd;
    rng.shuffle(shuffled);

    for (GradientMethod m : {GradientMethod::FiniteDifference, GradientMethod::ParameterShift}) {
        TrainingConfig cfg = fast_config();
        cfg.gradient_method = m;
        const std::vector<double> g1 = gradient(model, theta, fwd, cfg);
        const std::vector<double> g2 = gradient(model, theta, rev, cfg);
        const std::vector<double> g3 = gradient(model, theta, shuffled, cfg);
        CHECK(g1 == g2); // bitwise
        CHECK(g1 == g3);
    }
}

TEST_CASE("gradient propagates non-finite predictions as numerical errors") {
    QuantumModel broken;
    broken.name = "broken";
    broken.parameter_count = 2;
    broken.shift_rules.assign(2, ShiftRule::HalfPi);
    broken.predict = [](std::span<const double> theta, std::span<const double>) {
        return theta[0] > 0.15 ? std::nan("") : 0.5;
    };
    const std::vector<Sample> batch{quantum_sample({0.1, 0.1}, 0)};
    const std::vector<double> theta(2, 0.1);
    TrainingConfig cfg = fast_config();
    cfg.gradient_method = GradientMethod::FiniteDifference;
    cfg.fd_epsilon = 0.1; // pushes the probe over the NaN ledge
    CHECK_THROWS_AS(gradient(broken, theta, pointers(batch), cfg), numerical_error);
}

TEST_CASE("zero learning rate leaves theta unchanged with constant metrics") {
    const QcnnArchitecture arch = build_qcnn(2);
    Rng rng(43);
    Dataset ds = separable_dataset(rng, 12, 6, 2);
    TrainingConfig cfg = fast_config();
    cfg.learning_rate = 0.0;
    cfg.epochs = 3;
    cfg.gradient_method = GradientMethod::ParameterShift;

    const TrainableModel trainable = make_trainable(make_model(arch, FeatureMapSpec{}), cfg);
    const TrainResult r1 = train(trainable, ds, cfg);
    Rng ref_rng(cfg.seed);
    std::vector<double> expected(static_cast<std::size_t>(arch.parameter_count));
    for (double& v : expected) v = ref_rng.uniform(-kPi, kPi);
    CHECK(r1.theta == expected); // bitwise: theta_0 from the documented stream, never moved
    CHECK(r1.initial_train.loss == r1.trail.front().train_loss);
    for (const RunMetrics& row : r1.trail) {
        CHECK(row.train_loss == r1.trail.front().train_loss);
        CHECK(row.test_loss == r1.trail.front().test_loss);
        CHECK(row.train_accuracy == r1.trail.front().train_accuracy);
    }
}

TEST_CASE("training is bitwise deterministic under a fixed seed") {
    const QcnnArchitecture arch = build_qcnn(2);
    Rng rng(47);
    Dataset ds = separable_dataset(rng, 20, 8, 2);
    TrainingConfig cfg = fast_config();
    cfg.epochs = 5;
    cfg.batch_size = 8;
    cfg.seed = 1234;

    const QuantumModel model = make_model(arch, FeatureMapSpec{});
    const TrainableModel trainable = make_trainable(model, cfg);
    const TrainResult a = train(trainable, ds, cfg);
    const TrainResult b = train(trainable, ds, cfg);
    CHECK(a.theta == b.theta);
    REQUIRE(a.trail.size() == b.trail.size());
    for (std::size_t i = 0; i < a.trail.size(); ++i) {
        CHECK(a.trail[i].train_loss == b.trail[i].train_loss);
        CHECK(a.trail[i].train_accuracy == b.trail[i].train_accuracy);
        CHECK(a.trail[i].test_loss == b.trail[i].test_loss);
        CHECK(a.trail[i].test_accuracy == b.trail[i].test_accuracy);
        CHECK(a.trail[i].epoch == static_cast<int>(i) + 1);
    }

    // thread count must not change the numbers
    TrainingConfig serial = cfg;
    serial.threads = 1;
    const TrainResult c = train(trainable, ds, serial);
    CHECK(a.theta == c.theta);
    CHECK(a.trail.back().train_loss == c.trail.back().train_loss);
}

TEST_CASE("4-qubit qcnn training reduces loss on separable synthetic data") {
    const QcnnArchitecture arch = build_qcnn(4);
    Rng rng(53);
    Dataset ds = separable_dataset(rng, 200, 50, 4);
    TrainingConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.epochs = 30;
    cfg.batch_size = 16;
    cfg.seed = 7;
    cfg.threads = 2;
    cfg.gradient_method = GradientMethod::ParameterShift;

    const TrainableModel trainable = make_trainable(make_model(arch, FeatureMapSpec{}), cfg);
    const TrainResult r = train(trainable, ds, cfg);
    CHECK(r.trail.back().train_loss < 0.8 * r.initial_train.loss);
}

TEST_CASE("train aborts with a diagnostic when theta becomes non-finite") {
    TrainableModel exploding;
    exploding.name = "exploding";
    exploding.parameter_count = 3;
    exploding.init = [](Rng&, std::span<double> theta) {
        for (double& v : theta) v = 0.0;
    };
    exploding.batch_gradient = [](std::span<const double>, std::span<const Sample* const>) {
        return std::vector<double>{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    };
    exploding.predict = [](std::span<const double>, const Sample&) { return 0.5; };

    Rng rng(67);
    Dataset ds = separable_dataset(rng, 8, 4, 2);
    TrainingConfig cfg = fast_config();
    cfg.epochs = 1;
    CHECK_THROWS_WITH_AS(train(exploding, ds, cfg), doctest::Contains("non-finite"),
                         numerical_error);
}

TEST_CASE("train validates its configuration") {
    Rng rng(59);
    Dataset ds = separable_dataset(rng, 10, 5, 2);
    const QuantumModel model = make_model(build_qcnn(2), FeatureMapSpec{});
    TrainingConfig cfg = fast_config();
    const TrainableModel trainable = make_trainable(model, cfg);

    TrainingConfig bad = cfg;
    bad.learning_rate = -0.1;
    CHECK_THROWS_AS(train(trainable, ds, bad), config_error);
    bad = cfg;
    bad.learning_rate = 11.0;
    CHECK_THROWS_AS(train(trainable, ds, bad), config_error);
    bad = cfg;
    bad.batch_size = 11;
    CHECK_THROWS_AS(train(trainable, ds, bad), config_error);
    bad = cfg;
    bad.epochs = 0;
    CHECK_THROWS_AS(train(trainable, ds, bad), config_error);
}
