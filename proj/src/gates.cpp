#include "qcnn/gates.hpp"

#include <cmath>
#include <sstream>

#include "qcnn/errors.hpp"

namespace qcnn {

namespace {

double unitarity_defect(int dim, const std::vector<cd>& m) {
    // ‖U†U − I‖∞ over entries
    double worst = 0.0;
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            cd acc = 0.0;
            for (int k = 0; k < dim; ++k) {
                acc += std::conj(m[static_cast<std::size_t>(k) * dim + r]) *
                       m[static_cast<std::size_t>(k) * dim + c];
            }
            if (r == c) acc -= 1.0;
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

} // namespace

GateMatrix::GateMatrix(int arity, std::vector<cd> row_major_entries)
    : arity_(arity), m_(std::move(row_major_entries)) {
    if (arity_ != 1 && arity_ != 2) {
        throw config_error("invalid gate: arity must be 1 or 2, got " + std::to_string(arity_));
    }
    const std::size_t want = static_cast<std::size_t>(dim()) * dim();
    if (m_.size() != want) {
        throw config_error("invalid gate: expected " + std::to_string(want) +
                           " entries, got " + std::to_string(m_.size()));
    }
    const double defect = unitarity_defect(dim(), m_);
    if (!(defect < 1e-10)) {
        std::ostringstream os;
        os << "invalid gate: matrix is not unitary (defect " << defect << ")";
        throw config_error(os.str());
    }
}

GateMatrix GateMatrix::dagger() const {
    std::vector<cd> out(m_.size());
    const int d = dim();
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            out[static_cast<std::size_t>(c) * d + r] = std::conj(at(r, c));
    return GateMatrix(arity_, std::move(out));
}

namespace gates {

GateMatrix identity(int arity) {
    const int d = 1 << arity;
    std::vector<cd> m(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i) * d + i] = 1.0;
    return GateMatrix(arity, std::move(m));
}

GateMatrix hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    return GateMatrix(1, {s, s, s, -s});
}

GateMatrix pauli_x() { return GateMatrix(1, {0.0, 1.0, 1.0, 0.0}); }

GateMatrix pauli_y() {
    return GateMatrix(1, {0.0, cd(0.0, -1.0), cd(0.0, 1.0), 0.0});
}

GateMatrix pauli_z() { return GateMatrix(1, {1.0, 0.0, 0.0, -1.0}); }

GateMatrix phase(double lambda) {
    return GateMatrix(1, {1.0, 0.0, 0.0, std::polar(1.0, lambda)});
}

GateMatrix rz(double theta) {
    return GateMatrix(1, {std::polar(1.0, -theta / 2), 0.0, 0.0, std::polar(1.0, theta / 2)});
}

GateMatrix ry(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return GateMatrix(1, {c, -s, s, c});
}

GateMatrix rotation_zyz(double a, double b, double c) {
    return multiply(rz(a), multiply(ry(b), rz(c)));
}

GateMatrix cnot() { return controlled(pauli_x()); }

GateMatrix controlled(const GateMatrix& u) {
    if (u.arity() != 1) throw config_error("controlled() expects a single-qubit gate");
    // g = (b_target << 1) | b_control; control fires on b_control = 1,
    // mixing gate rows/cols 1 and 3.
    std::vector<cd> m(16, 0.0);
    m[0 * 4 + 0] = 1.0;
    m[2 * 4 + 2] = 1.0;
    m[1 * 4 + 1] = u.at(0, 0);
    m[1 * 4 + 3] = u.at(0, 1);
    m[3 * 4 + 1] = u.at(1, 0);
    m[3 * 4 + 3] = u.at(1, 1);
    return GateMatrix(2, std::move(m));
}

GateMatrix kron(const GateMatrix& high, const GateMatrix& low) {
    if (high.arity() != 1 || low.arity() != 1) {
        throw config_error("kron() expects single-qubit gates");
    }
    std::vector<cd> m(16, 0.0);
    for (int rh = 0; rh < 2; ++rh)
        for (int rl = 0; rl < 2; ++rl)
            for (int ch = 0; ch < 2; ++ch)
                for (int cl = 0; cl < 2; ++cl)
                    m[static_cast<std::size_t>((rh << 1) | rl) * 4 + ((ch << 1) | cl)] =
                        high.at(rh, ch) * low.at(rl, cl);
    return GateMatrix(2, std::move(m));
}

GateMatrix multiply(const GateMatrix& a, const GateMatrix& b) {
    if (a.arity() != b.arity()) throw config_error("multiply() arity mismatch");
    const int d = a.dim();
    std::vector<cd> m(static_cast<std::size_t>(d) * d, 0.0);
    for (int r = 0; r < d; ++r)
        for (int k = 0; k < d; ++k) {
            const cd arx = a.at(r, k);
            if (arx == cd(0.0, 0.0)) continue;
            for (int c = 0; c < d; ++c)
                m[static_cast<std::size_t>(r) * d + c] += arx * b.at(k, c);
        }
    return GateMatrix(a.arity(), std::move(m));
}

} // namespace gates

} // namespace qcnn
