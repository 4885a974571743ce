#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qcnn/gates.hpp"

namespace qcnn {

inline constexpr int kMaxQubits = 24; // 2^24 complex doubles ≈ 256 MB

struct MeasurementOutcome {
    int qubit;
    double probability_zero;
    double probability_one;
};

// Dense statevector over n qubits. Qubit 0 is the least-significant bit of
// the amplitude index. A StateVector is a plain value: copy it to branch,
// mutate it in place to evolve it.
class StateVector {
  public:
    static StateVector zero_state(int num_qubits);

    // Takes ownership of an explicit amplitude vector; must already be
    // normalized (1e-10) and of length 2^num_qubits.
    StateVector(int num_qubits, std::vector<cd> amplitudes);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const cd> amplitudes() const { return amps_; }
    cd amplitude(std::size_t basis_index) const { return amps_[basis_index]; }

    double norm() const;

    // Applies the gate to the target qubits, identity elsewhere. Strided
    // in-place update; no full matrix is formed.
    void apply(const GateMatrix& gate, std::span<const int> targets);
    void apply(const GateMatrix& gate, std::initializer_list<int> targets) {
        apply(gate, std::span<const int>(targets.begin(), targets.size()));
    }

    // <Z_qubit> = sum over basis states of |amp|^2 * (+1 if bit is 0 else -1)
    double z_expectation(int qubit) const;

    // probability_one = (1 - <Z>)/2
    MeasurementOutcome measurement_distribution(int qubit) const;

    // Projects onto the given outcome of the qubit and renormalizes.
    // Throws numerical_error if the branch probability is <= 1e-12.
    void collapse(int qubit, int outcome);

  private:
    void check_qubit(int qubit) const;

    int num_qubits_;
    std::vector<cd> amps_;
};

} // namespace qcnn
