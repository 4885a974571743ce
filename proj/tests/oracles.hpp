#pragma once

// Independent reference implementations used only by tests: dense
// full-dimension matrix construction (vs the strided production kernels) and
// explicit measure-and-branch pooling (vs deferred measurement).

#include <span>
#include <vector>

#include "qcnn/ansatz.hpp"
#include "qcnn/rng.hpp"
#include "qcnn/state_vector.hpp"

namespace qcnn::testing {

using Dense = std::vector<std::vector<cd>>; // row-major full matrix

Dense dense_identity(std::size_t dim);
Dense dense_multiply(const Dense& a, const Dense& b);
std::vector<cd> dense_apply(const Dense& m, std::span<const cd> v);

// Full 2^n x 2^n embedding of a 1- or 2-qubit gate by explicit index
// construction (no strides shared with the production path).
Dense embed_gate(int num_qubits, const GateMatrix& gate, std::span<const int> targets);

double max_amp_diff(std::span<const cd> a, std::span<const cd> b);
double max_amp_diff_global_phase(std::span<const cd> a, std::span<const cd> b);

StateVector random_state(Rng& rng, int num_qubits);
GateMatrix random_single_qubit_gate(Rng& rng);
GateMatrix random_two_qubit_gate(Rng& rng); // Gram-Schmidt orthonormalization

struct CircuitOp {
    GateMatrix gate;
    std::vector<int> targets;
};

std::vector<CircuitOp> random_circuit(Rng& rng, int num_qubits, int depth);

// Production path: strided application to |0...0>.
StateVector apply_circuit(int num_qubits, std::span<const CircuitOp> ops);
// Oracle path: dense matrices applied to the initial vector.
std::vector<cd> apply_circuit_dense(int num_qubits, std::span<const CircuitOp> ops);

// Dense-matrix reimplementation of the whole QCNN forward pipeline,
// including the probability readout (direct bit-mask sum).
double dense_forward_probability(const QcnnArchitecture& arch, std::span<const double> theta,
                                 std::span<const double> features, const FeatureMapSpec& fm);

// Explicit measure-and-branch pooling: every pool measures the discarded
// qubit via collapse(), applies the rotation only on outcome 1, and the
// readout distribution is the probability-weighted average over branches.
double branch_enumeration_readout(const QcnnArchitecture& arch, std::span<const double> theta,
                                  std::span<const double> features, const FeatureMapSpec& fm);

// Dense encoding circuit for feature-map oracle checks.
Dense dense_encoding(int num_qubits, std::span<const double> features, const FeatureMapSpec& fm);

} // namespace qcnn::testing
