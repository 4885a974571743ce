#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qcnn/feature_map.hpp"
#include "qcnn/state_vector.hpp"

namespace qcnn {

struct ParamSlice {
    int offset = 0;
    int length = 0;
};

// Exact two-point derivative rule attached to each parameter:
//   HalfPi    d/dt f = (f(t + pi/2) - f(t - pi/2)) / 2     (RZ/RY-generated,
//             including pool params: the control qubit is never reused, so the
//             response stays single-frequency)
//   QuarterPi d/dt f =  f(t + pi/4) - f(t - pi/4)          (exp(i t P⊗P)-generated;
//             the Pauli product has eigenvalues ±1, doubling the frequency)
enum class ShiftRule { HalfPi, QuarterPi };

double shift_amount(ShiftRule rule);
double shift_coefficient(ShiftRule rule);

// Two-qubit convolution unitary on (qubit_a, qubit_b); 15 parameters.
struct ConvBlockSpec {
    int qubit_a = 0;
    int qubit_b = 0;
    ParamSlice params; // length 15
};

// Pooling: controlled RZ(p1)·RY(p2)·RZ(p3) with control = discarded_qubit,
// target = kept_qubit; the discarded qubit is retired afterwards. This is the
// deferred-measurement form of "measure, then rotate on outcome 1".
struct PoolBlockSpec {
    int discarded_qubit = 0;
    int kept_qubit = 0;
    ParamSlice params; // length 3
};

struct QcnnStep {
    enum class Kind { Conv, Pool, FullyConnected };
    Kind kind;
    ConvBlockSpec conv; // Conv / FullyConnected
    PoolBlockSpec pool; // Pool
};

struct QcnnArchitecture {
    int num_qubits = 0;
    std::vector<QcnnStep> steps; // application order
    int readout_qubit = 0;
    int parameter_count = 0;
    std::vector<ShiftRule> shift_rules; // one per parameter

    // Block-by-block tiling table (qubit pairs, parameter slices).
    std::string summary() const;
};

// Fixed tiling (see summary() for the table): while more than two qubits are
// active — convolutions on adjacent active pairs, convolutions on the
// circularly shifted pairs, pooling of odd-position qubits into their even
// neighbors; on the final active pair — a fully connected block and a last
// pool. num_qubits = 2 degenerates to conv(0,1) + pool(1->0) with no
// fully-connected block. Parameter counts: 18, 84, 216, 480 for 2/4/8/16.
QcnnArchitecture build_qcnn(int num_qubits);

// Structural audit: slices tile [0, parameter_count) exactly, retired qubits
// are never referenced again, pooling halves the active set down to the
// readout qubit. Throws config_error on violation.
void validate(const QcnnArchitecture& arch);

// Hardware-efficient layered baseline: per layer, RZ·RY·RZ on every qubit
// followed by a ring of CNOTs; readout on qubit 0.
struct QnnArchitecture {
    int num_qubits = 0;
    int depth = 2;
    int readout_qubit = 0;
    int parameter_count = 0; // 3 * num_qubits * depth

    std::string summary() const;
};

QnnArchitecture build_qnn(int num_qubits, int depth);

// 15-parameter two-qubit unitary
//   U = (A_a ⊗ A_b) · exp(i(tx X⊗X + ty Y⊗Y + tz Z⊗Z)) · (B_a ⊗ B_b)
// with A/B = RZ(a)RY(b)RZ(c). Layout: p[0..2] B on qubit_a, p[3..5] B on
// qubit_b, p[6..8] = (tx, ty, tz), p[9..11] A on qubit_a, p[12..14] A on
// qubit_b. Gate bit 0 corresponds to qubit_a.
GateMatrix conv_block_matrix(std::span<const double> params);

void pool_block_apply(StateVector& state, const PoolBlockSpec& spec,
                      std::span<const double> params);

// Full forward pass: encode -> blocks -> P(readout = 1).
double forward(const QcnnArchitecture& arch, std::span<const double> theta,
               std::span<const double> features, const FeatureMapSpec& fm);
double forward(const QnnArchitecture& arch, std::span<const double> theta,
               std::span<const double> features, const FeatureMapSpec& fm);

// What the trainer consumes: a parameter count, per-parameter shift rules and
// a pure (theta, features) -> prediction function. encode_features/run_encoded
// split the evaluation at the theta-independent encoding so gradient probes
// can reuse one encoded state per sample; predict == run_encoded ∘ encode.
struct QuantumModel {
    std::string name;
    int parameter_count = 0;
    std::vector<ShiftRule> shift_rules;
    std::function<double(std::span<const double>, std::span<const double>)> predict;
    std::function<StateVector(std::span<const double>)> encode_features;
    std::function<double(std::span<const double>, const StateVector&)> run_encoded;
};

QuantumModel make_model(const QcnnArchitecture& arch, const FeatureMapSpec& fm);
QuantumModel make_model(const QnnArchitecture& arch, const FeatureMapSpec& fm);

} // namespace qcnn
