#include "qcnn/feature_map.hpp"

#include <cmath>
#include <numbers>

#include "qcnn/errors.hpp"

namespace qcnn {

FeatureMapKind feature_map_kind_from_string(const std::string& s) {
    if (s == "Z" || s == "z" || s == "ZFeatureMap") return FeatureMapKind::ZFeatureMap;
    if (s == "ZZ" || s == "zz" || s == "ZZFeatureMap") return FeatureMapKind::ZZFeatureMap;
    throw config_error("unknown feature map kind: " + s + " (expected Z or ZZ)");
}

std::string to_string(FeatureMapKind kind) {
    return kind == FeatureMapKind::ZFeatureMap ? "Z" : "ZZ";
}

StateVector encode(std::span<const double> features, const FeatureMapSpec& spec) {
    constexpr double pi = std::numbers::pi;
    const int n = static_cast<int>(features.size());
    if (n < 1) throw config_error("encoding error: empty feature vector");
    if (spec.kind == FeatureMapKind::ZZFeatureMap && n < 2) {
        throw config_error("encoding error: ZZ feature map needs at least 2 features");
    }
    if (spec.repetitions < 1 || spec.repetitions > 4) {
        throw config_error("feature map repetitions must be in [1, 4], got " +
                           std::to_string(spec.repetitions));
    }
    for (int i = 0; i < n; ++i) {
        const double x = features[i];
        if (!std::isfinite(x) || x < 0.0 || x > pi) {
            throw config_error("preprocessing contract violated: feature " + std::to_string(i) +
                               " = " + std::to_string(x) + " outside [0, pi]");
        }
    }

    StateVector state = StateVector::zero_state(n);
    const GateMatrix h = gates::hadamard();
    const GateMatrix cx = gates::cnot();
    for (int rep = 0; rep < spec.repetitions; ++rep) {
        for (int q = 0; q < n; ++q) state.apply(h, {q});
        for (int q = 0; q < n; ++q) state.apply(gates::phase(2.0 * features[q]), {q});
        if (spec.kind == FeatureMapKind::ZZFeatureMap) {
            for (int q = 0; q + 1 < n; ++q) {
                const double angle = 2.0 * (pi - features[q]) * (pi - features[q + 1]);
                state.apply(cx, {q, q + 1});
                state.apply(gates::phase(angle), {q + 1});
                state.apply(cx, {q, q + 1});
            }
        }
    }
    return state;
}

} // namespace qcnn
