#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace qcnn {

using cd = std::complex<double>;

// Unitary matrix over one or two qubits. Construction checks unitarity
// (‖U†U − I‖∞ < 1e-10) and rejects anything else, so a GateMatrix held
// anywhere in the program is guaranteed norm-preserving.
//
// Two-qubit index convention: the matrix acts on gate-space index
// g = (b1 << 1) | b0 where b0 is the state of targets[0] and b1 the state
// of targets[1] at application time.
class GateMatrix {
  public:
    GateMatrix(int arity, std::vector<cd> row_major_entries);

    int arity() const { return arity_; }
    int dim() const { return 1 << arity_; }
    cd at(int row, int col) const { return m_[static_cast<std::size_t>(row) * dim() + col]; }
    std::span<const cd> entries() const { return m_; }

    GateMatrix dagger() const;

  private:
    int arity_;
    std::vector<cd> m_;
};

namespace gates {

GateMatrix identity(int arity);
GateMatrix hadamard();
GateMatrix pauli_x();
GateMatrix pauli_y();
GateMatrix pauli_z();
// P(lambda) = diag(1, e^{i lambda})
GateMatrix phase(double lambda);
// RZ(theta) = diag(e^{-i theta/2}, e^{+i theta/2})
GateMatrix rz(double theta);
// RY(theta) = [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]
GateMatrix ry(double theta);
// RZ(a)·RY(b)·RZ(c), the general single-qubit rotation used by the ansatz
GateMatrix rotation_zyz(double a, double b, double c);

// Control on gate bit 0 (targets[0]), X on gate bit 1. Matches the
// convention "apply(cnot(), {control, target})".
GateMatrix cnot();
// Control on gate bit 0, arbitrary single-qubit u on gate bit 1.
GateMatrix controlled(const GateMatrix& u);

// kron(high, low): two-qubit matrix equal to `high` acting on gate bit 1
// and `low` on gate bit 0.
GateMatrix kron(const GateMatrix& high, const GateMatrix& low);

// Matrix product a·b of equal-arity gates (b applied first).
GateMatrix multiply(const GateMatrix& a, const GateMatrix& b);

} // namespace gates

} // namespace qcnn
