#include "qcnn/state_vector.hpp"

#include <cmath>
#include <string>

#include "qcnn/errors.hpp"

namespace qcnn {

StateVector StateVector::zero_state(int num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw config_error("num_qubits must be in [1, " + std::to_string(kMaxQubits) +
                           "], got " + std::to_string(num_qubits));
    }
    std::vector<cd> amps(std::size_t{1} << num_qubits, 0.0);
    amps[0] = 1.0;
    return StateVector(num_qubits, std::move(amps));
}

StateVector::StateVector(int num_qubits, std::vector<cd> amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    if (num_qubits_ < 1 || num_qubits_ > kMaxQubits) {
        throw config_error("num_qubits must be in [1, " + std::to_string(kMaxQubits) +
                           "], got " + std::to_string(num_qubits_));
    }
    if (amps_.size() != (std::size_t{1} << num_qubits_)) {
        throw config_error("amplitude vector length " + std::to_string(amps_.size()) +
                           " does not match 2^" + std::to_string(num_qubits_));
    }
    if (std::abs(norm() - 1.0) > 1e-10) {
        throw config_error("amplitude vector is not normalized");
    }
}

double StateVector::norm() const {
    double s = 0.0;
    for (const cd& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= num_qubits_) {
        throw config_error("qubit index " + std::to_string(qubit) + " out of range for " +
                           std::to_string(num_qubits_) + "-qubit state");
    }
}

void StateVector::apply(const GateMatrix& gate, std::span<const int> targets) {
    if (static_cast<int>(targets.size()) != gate.arity()) {
        throw config_error("invalid target: gate arity " + std::to_string(gate.arity()) +
                           " but " + std::to_string(targets.size()) + " targets given");
    }
    for (int t : targets) check_qubit(t);

    if (gate.arity() == 1) {
        const std::size_t mask = std::size_t{1} << targets[0];
        const cd u00 = gate.at(0, 0), u01 = gate.at(0, 1);
        const cd u10 = gate.at(1, 0), u11 = gate.at(1, 1);
        const std::size_t half = amps_.size() >> 1;
        const std::size_t lo_mask = mask - 1;
        for (std::size_t j = 0; j < half; ++j) {
            const std::size_t i0 = ((j & ~lo_mask) << 1) | (j & lo_mask);
            const std::size_t i1 = i0 | mask;
            const cd a = amps_[i0], b = amps_[i1];
            amps_[i0] = u00 * a + u01 * b;
            amps_[i1] = u10 * a + u11 * b;
        }
        return;
    }

    if (targets[0] == targets[1]) {
        throw config_error("invalid target: duplicate qubit " + std::to_string(targets[0]));
    }
    // Gate-space index g = (b1 << 1) | b0 with b0 = targets[0] bit.
    const std::size_t m0 = std::size_t{1} << targets[0];
    const std::size_t m1 = std::size_t{1} << targets[1];
    const std::size_t lo = std::min(m0, m1), hi = std::max(m0, m1);
    const std::size_t lo_mask = lo - 1;
    const std::size_t mid_mask = ((hi >> 1) - 1) & ~lo_mask; // bits between the two targets, compacted
    const std::size_t quarter = amps_.size() >> 2;
    cd u[4][4];
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) u[r][c] = gate.at(r, c);

    for (std::size_t j = 0; j < quarter; ++j) {
        // expand j by inserting zero bits at the two target positions
        std::size_t i = (j & lo_mask) | ((j & mid_mask) << 1) |
                        ((j & ~(lo_mask | mid_mask)) << 2);
        std::size_t idx[4];
        for (int g = 0; g < 4; ++g) {
            idx[g] = i | ((g & 1) ? m0 : 0) | ((g & 2) ? m1 : 0);
        }
        cd in[4];
        for (int g = 0; g < 4; ++g) in[g] = amps_[idx[g]];
        for (int g = 0; g < 4; ++g) {
            amps_[idx[g]] = u[g][0] * in[0] + u[g][1] * in[1] + u[g][2] * in[2] + u[g][3] * in[3];
        }
    }
}

double StateVector::z_expectation(int qubit) const {
    check_qubit(qubit);
    const std::size_t mask = std::size_t{1} << qubit;
    double acc = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const double p = std::norm(amps_[i]);
        acc += (i & mask) ? -p : p;
    }
    return acc;
}

MeasurementOutcome StateVector::measurement_distribution(int qubit) const {
    const double z = z_expectation(qubit);
    const double p1 = (1.0 - z) / 2.0;
    return MeasurementOutcome{qubit, 1.0 - p1, p1};
}

void StateVector::collapse(int qubit, int outcome) {
    check_qubit(qubit);
    if (outcome != 0 && outcome != 1) {
        throw config_error("collapse outcome must be 0 or 1");
    }
    const std::size_t mask = std::size_t{1} << qubit;
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (((i & mask) != 0) == (outcome == 1)) p += std::norm(amps_[i]);
    }
    if (p <= 1e-12) {
        throw numerical_error("impossible outcome: qubit " + std::to_string(qubit) +
                              " has probability " + std::to_string(p) + " for outcome " +
                              std::to_string(outcome));
    }
    const double scale = 1.0 / std::sqrt(p);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (((i & mask) != 0) == (outcome == 1)) {
            amps_[i] *= scale;
        } else {
            amps_[i] = 0.0;
        }
    }
}

} // namespace qcnn
