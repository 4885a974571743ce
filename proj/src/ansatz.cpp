#include "qcnn/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "qcnn/errors.hpp"

namespace qcnn {

namespace {

constexpr double kPi = std::numbers::pi;

// Stack-allocated 2x2 / 4x4 complex matrices for the hot path: block
// matrices are rebuilt for every forward evaluation, so no heap temporaries.
using M2 = std::array<cd, 4>;
using M4 = std::array<cd, 16>;

M4 mul4(const M4& a, const M4& b) {
    M4 out{};
    for (int r = 0; r < 4; ++r)
        for (int k = 0; k < 4; ++k) {
            const cd v = a[static_cast<std::size_t>(r) * 4 + k];
            if (v == cd(0.0, 0.0)) continue;
            for (int c = 0; c < 4; ++c)
                out[static_cast<std::size_t>(r) * 4 + c] += v * b[static_cast<std::size_t>(k) * 4 + c];
        }
    return out;
}

// kron(high, low): high on gate bit 1, low on gate bit 0.
M4 kron22(const M2& high, const M2& low) {
    M4 out{};
    for (int rh = 0; rh < 2; ++rh)
        for (int rl = 0; rl < 2; ++rl)
            for (int ch = 0; ch < 2; ++ch)
                for (int cl = 0; cl < 2; ++cl)
                    out[static_cast<std::size_t>((rh << 1) | rl) * 4 + ((ch << 1) | cl)] =
                        high[static_cast<std::size_t>(rh) * 2 + ch] *
                        low[static_cast<std::size_t>(rl) * 2 + cl];
    return out;
}

cd phased(double mag, double ang) { return cd(mag * std::cos(ang), mag * std::sin(ang)); }

// RZ(a)·RY(b)·RZ(c) in closed form.
M2 rot_zyz2(double a, double b, double c) {
    const double cb = std::cos(b / 2), sb = std::sin(b / 2);
    return {phased(cb, -(a + c) / 2), phased(-sb, -(a - c) / 2),
            phased(sb, (a - c) / 2), phased(cb, (a + c) / 2)};
}

// exp(i(tx XX + ty YY + tz ZZ)): the three factors commute; on the {00,11}
// subspace the generator acts as tz·I + (tx - ty)·sigma_x, on {01,10} as
// -tz·I + (tx + ty)·sigma_x.
M4 entangler4(double tx, double ty, double tz) {
    M4 out{};
    const cd outer_phase = std::polar(1.0, tz);
    const cd inner_phase = std::polar(1.0, -tz);
    const double dm = tx - ty;
    const double dp = tx + ty;
    out[0 * 4 + 0] = outer_phase * std::cos(dm);
    out[3 * 4 + 3] = outer_phase * std::cos(dm);
    out[0 * 4 + 3] = outer_phase * cd(0.0, std::sin(dm));
    out[3 * 4 + 0] = outer_phase * cd(0.0, std::sin(dm));
    out[1 * 4 + 1] = inner_phase * std::cos(dp);
    out[2 * 4 + 2] = inner_phase * std::cos(dp);
    out[1 * 4 + 2] = inner_phase * cd(0.0, std::sin(dp));
    out[2 * 4 + 1] = inner_phase * cd(0.0, std::sin(dp));
    return out;
}

void check_finite(std::span<const double> params, const char* what) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!std::isfinite(params[i])) {
            throw numerical_error(std::string(what) + ": non-finite parameter at index " +
                                  std::to_string(i));
        }
    }
}

std::span<const double> slice(std::span<const double> theta, const ParamSlice& s) {
    if (s.offset < 0 || s.length < 0 ||
        static_cast<std::size_t>(s.offset) + s.length > theta.size()) {
        throw config_error("parameter slice [" + std::to_string(s.offset) + ", " +
                           std::to_string(s.offset + s.length) + ") out of bounds for " +
                           std::to_string(theta.size()) + " parameters");
    }
    return theta.subspan(static_cast<std::size_t>(s.offset), static_cast<std::size_t>(s.length));
}

} // namespace

double shift_amount(ShiftRule rule) {
    return rule == ShiftRule::HalfPi ? kPi / 2 : kPi / 4;
}

double shift_coefficient(ShiftRule rule) {
    return rule == ShiftRule::HalfPi ? 0.5 : 1.0;
}

GateMatrix conv_block_matrix(std::span<const double> params) {
    if (params.size() != 15) {
        throw config_error("conv block expects 15 parameters, got " +
                           std::to_string(params.size()));
    }
    check_finite(params, "conv block");
    const M4 b = kron22(rot_zyz2(params[3], params[4], params[5]),
                        rot_zyz2(params[0], params[1], params[2]));
    const M4 n = entangler4(params[6], params[7], params[8]);
    const M4 a = kron22(rot_zyz2(params[12], params[13], params[14]),
                        rot_zyz2(params[9], params[10], params[11]));
    const M4 u = mul4(a, mul4(n, b));
    return GateMatrix(2, std::vector<cd>(u.begin(), u.end()));
}

void pool_block_apply(StateVector& state, const PoolBlockSpec& spec,
                      std::span<const double> params) {
    if (params.size() != 3) {
        throw config_error("pool block expects 3 parameters, got " + std::to_string(params.size()));
    }
    check_finite(params, "pool block");
    const M2 rot = rot_zyz2(params[0], params[1], params[2]);
    M4 c{};
    c[0 * 4 + 0] = 1.0;
    c[2 * 4 + 2] = 1.0;
    c[1 * 4 + 1] = rot[0];
    c[1 * 4 + 3] = rot[1];
    c[3 * 4 + 1] = rot[2];
    c[3 * 4 + 3] = rot[3];
    const int targets[2] = {spec.discarded_qubit, spec.kept_qubit}; // control = gate bit 0
    state.apply(GateMatrix(2, std::vector<cd>(c.begin(), c.end())),
                std::span<const int>(targets, 2));
}

namespace {

struct TilingBuilder {
    std::vector<QcnnStep> steps;
    std::vector<ShiftRule> rules;
    int next_offset = 0;

    ParamSlice take_conv_slice() {
        ParamSlice s{next_offset, 15};
        next_offset += 15;
        for (int i = 0; i < 15; ++i) {
            rules.push_back(i >= 6 && i <= 8 ? ShiftRule::QuarterPi : ShiftRule::HalfPi);
        }
        return s;
    }

    ParamSlice take_pool_slice() {
        ParamSlice s{next_offset, 3};
        next_offset += 3;
        rules.insert(rules.end(), 3, ShiftRule::HalfPi);
        return s;
    }

    void conv(int a, int b, QcnnStep::Kind kind = QcnnStep::Kind::Conv) {
        steps.push_back(QcnnStep{kind, ConvBlockSpec{a, b, take_conv_slice()}, {}});
    }

    void pool(int discarded, int kept) {
        steps.push_back(QcnnStep{QcnnStep::Kind::Pool, {}, PoolBlockSpec{discarded, kept, take_pool_slice()}});
    }
};

} // namespace

QcnnArchitecture build_qcnn(int num_qubits) {
    if (num_qubits != 2 && num_qubits != 4 && num_qubits != 8 && num_qubits != 16) {
        throw config_error("QCNN qubit count must be one of {2, 4, 8, 16}, got " +
                           std::to_string(num_qubits));
    }

    TilingBuilder tb;
    if (num_qubits == 2) {
        tb.conv(0, 1);
        tb.pool(1, 0);
    } else {
        std::vector<int> active(num_qubits);
        for (int q = 0; q < num_qubits; ++q) active[q] = q;

        while (active.size() > 2) {
            const std::size_t m = active.size();
            for (std::size_t k = 0; k + 1 < m; k += 2) tb.conv(active[k], active[k + 1]);
            for (std::size_t k = 1; k < m; k += 2) tb.conv(active[k], active[(k + 1) % m]);
            std::vector<int> survivors;
            for (std::size_t k = 0; k + 1 < m; k += 2) {
                tb.pool(active[k + 1], active[k]);
                survivors.push_back(active[k]);
            }
            active = std::move(survivors);
        }
        tb.conv(active[0], active[1], QcnnStep::Kind::FullyConnected);
        tb.pool(active[1], active[0]);
    }

    QcnnArchitecture arch;
    arch.num_qubits = num_qubits;
    arch.steps = std::move(tb.steps);
    arch.readout_qubit = 0;
    arch.parameter_count = tb.next_offset;
    arch.shift_rules = std::move(tb.rules);
    validate(arch);
    return arch;
}

void validate(const QcnnArchitecture& arch) {
    if (arch.num_qubits < 2) throw config_error("architecture error: needs at least 2 qubits");
    std::set<int> retired;
    std::set<int> active;
    for (int q = 0; q < arch.num_qubits; ++q) active.insert(q);

    const auto require_active = [&](int q, const char* role) {
        if (q < 0 || q >= arch.num_qubits) {
            throw config_error("architecture error: " + std::string(role) + " qubit " +
                               std::to_string(q) + " out of range");
        }
        if (retired.count(q)) {
            throw config_error("architecture error: " + std::string(role) + " qubit " +
                               std::to_string(q) + " already retired");
        }
    };

    std::vector<char> covered(static_cast<std::size_t>(arch.parameter_count), 0);
    const auto mark = [&](const ParamSlice& s, int want_len) {
        if (s.length != want_len) {
            throw config_error("architecture error: slice length " + std::to_string(s.length) +
                               ", expected " + std::to_string(want_len));
        }
        for (int i = s.offset; i < s.offset + s.length; ++i) {
            if (i < 0 || i >= arch.parameter_count || covered[static_cast<std::size_t>(i)]) {
                throw config_error("architecture error: parameter slices overlap or overflow at " +
                                   std::to_string(i));
            }
            covered[static_cast<std::size_t>(i)] = 1;
        }
    };

    for (const QcnnStep& step : arch.steps) {
        if (step.kind == QcnnStep::Kind::Pool) {
            require_active(step.pool.discarded_qubit, "pool discarded");
            require_active(step.pool.kept_qubit, "pool kept");
            if (step.pool.discarded_qubit == step.pool.kept_qubit) {
                throw config_error("architecture error: pool discards its own kept qubit");
            }
            mark(step.pool.params, 3);
            retired.insert(step.pool.discarded_qubit);
            active.erase(step.pool.discarded_qubit);
        } else {
            require_active(step.conv.qubit_a, "conv");
            require_active(step.conv.qubit_b, "conv");
            if (step.conv.qubit_a == step.conv.qubit_b) {
                throw config_error("architecture error: conv block on a single qubit");
            }
            mark(step.conv.params, 15);
        }
    }
    if (active.size() != 1) {
        throw config_error("architecture error: " + std::to_string(active.size()) +
                           " active qubits remain after the final pool, expected 1");
    }
    if (*active.begin() != arch.readout_qubit) {
        throw config_error("architecture error: readout qubit " +
                           std::to_string(arch.readout_qubit) + " is not the surviving qubit");
    }
    for (std::size_t i = 0; i < covered.size(); ++i) {
        if (!covered[i]) {
            throw config_error("architecture error: parameter " + std::to_string(i) +
                               " not covered by any slice");
        }
    }
    if (arch.shift_rules.size() != static_cast<std::size_t>(arch.parameter_count)) {
        throw config_error("architecture error: shift rule table size mismatch");
    }
}

std::string QcnnArchitecture::summary() const {
    std::ostringstream os;
    os << "qcnn qubits=" << num_qubits << " params=" << parameter_count
       << " readout=" << readout_qubit << "\n";
    for (const QcnnStep& step : steps) {
        switch (step.kind) {
        case QcnnStep::Kind::Conv:
            os << "  conv (" << step.conv.qubit_a << "," << step.conv.qubit_b << ")  theta["
               << step.conv.params.offset << ".." << step.conv.params.offset + 14 << "]\n";
            break;
        case QcnnStep::Kind::FullyConnected:
            os << "  fc   (" << step.conv.qubit_a << "," << step.conv.qubit_b << ")  theta["
               << step.conv.params.offset << ".." << step.conv.params.offset + 14 << "]\n";
            break;
        case QcnnStep::Kind::Pool:
            os << "  pool " << step.pool.discarded_qubit << "->" << step.pool.kept_qubit
               << "      theta[" << step.pool.params.offset << ".."
               << step.pool.params.offset + 2 << "]\n";
            break;
        }
    }
    return os.str();
}

QnnArchitecture build_qnn(int num_qubits, int depth) {
    if (num_qubits < 2) {
        throw config_error("QNN needs at least 2 qubits, got " + std::to_string(num_qubits));
    }
    if (depth < 1) throw config_error("QNN depth must be >= 1, got " + std::to_string(depth));
    QnnArchitecture arch;
    arch.num_qubits = num_qubits;
    arch.depth = depth;
    arch.readout_qubit = 0;
    arch.parameter_count = 3 * num_qubits * depth;
    return arch;
}

std::string QnnArchitecture::summary() const {
    std::ostringstream os;
    os << "qnn qubits=" << num_qubits << " depth=" << depth << " params=" << parameter_count
       << " readout=" << readout_qubit << "\n";
    for (int layer = 0; layer < depth; ++layer) {
        const int base = 3 * num_qubits * layer;
        os << "  layer " << layer << ": RZ·RY·RZ per qubit, theta[" << base << ".."
           << base + 3 * num_qubits - 1 << "], then CNOT ring\n";
    }
    return os.str();
}

namespace {

double run_qcnn_blocks(const QcnnArchitecture& arch, std::span<const double> theta,
                       StateVector state) {
    if (static_cast<int>(theta.size()) != arch.parameter_count) {
        throw config_error("parameter vector length " + std::to_string(theta.size()) +
                           " does not match architecture parameter count " +
                           std::to_string(arch.parameter_count));
    }
    for (const QcnnStep& step : arch.steps) {
        if (step.kind == QcnnStep::Kind::Pool) {
            pool_block_apply(state, step.pool, slice(theta, step.pool.params));
        } else {
            const int targets[2] = {step.conv.qubit_a, step.conv.qubit_b};
            state.apply(conv_block_matrix(slice(theta, step.conv.params)),
                        std::span<const int>(targets, 2));
        }
    }
    return state.measurement_distribution(arch.readout_qubit).probability_one;
}

StateVector encode_for(int num_qubits, std::span<const double> features,
                       const FeatureMapSpec& fm) {
    if (static_cast<int>(features.size()) != num_qubits) {
        throw config_error("encoding error: " + std::to_string(features.size()) +
                           " features for a " + std::to_string(num_qubits) + "-qubit register");
    }
    return encode(features, fm);
}

} // namespace

double forward(const QcnnArchitecture& arch, std::span<const double> theta,
               std::span<const double> features, const FeatureMapSpec& fm) {
    return run_qcnn_blocks(arch, theta, encode_for(arch.num_qubits, features, fm));
}

namespace {

double run_qnn_blocks(const QnnArchitecture& arch, std::span<const double> theta,
                      StateVector state) {
    if (static_cast<int>(theta.size()) != arch.parameter_count) {
        throw config_error("parameter vector length " + std::to_string(theta.size()) +
                           " does not match architecture parameter count " +
                           std::to_string(arch.parameter_count));
    }
    check_finite(theta, "qnn");
    const GateMatrix cx = gates::cnot();
    for (int layer = 0; layer < arch.depth; ++layer) {
        const int base = 3 * arch.num_qubits * layer;
        for (int q = 0; q < arch.num_qubits; ++q) {
            const M2 rot = rot_zyz2(theta[base + 3 * q], theta[base + 3 * q + 1],
                                    theta[base + 3 * q + 2]);
            state.apply(GateMatrix(1, std::vector<cd>(rot.begin(), rot.end())), {q});
        }
        for (int q = 0; q < arch.num_qubits; ++q) {
            state.apply(cx, {q, (q + 1) % arch.num_qubits});
        }
    }
    return state.measurement_distribution(arch.readout_qubit).probability_one;
}

} // namespace

double forward(const QnnArchitecture& arch, std::span<const double> theta,
               std::span<const double> features, const FeatureMapSpec& fm) {
    return run_qnn_blocks(arch, theta, encode_for(arch.num_qubits, features, fm));
}

QuantumModel make_model(const QcnnArchitecture& arch, const FeatureMapSpec& fm) {
    QuantumModel m;
    m.name = "qcnn";
    m.parameter_count = arch.parameter_count;
    m.shift_rules = arch.shift_rules;
    m.predict = [arch, fm](std::span<const double> theta, std::span<const double> features) {
        return forward(arch, theta, features, fm);
    };
    m.encode_features = [arch, fm](std::span<const double> features) {
        return encode_for(arch.num_qubits, features, fm);
    };
    m.run_encoded = [arch](std::span<const double> theta, const StateVector& state) {
        return run_qcnn_blocks(arch, theta, state);
    };
    return m;
}

QuantumModel make_model(const QnnArchitecture& arch, const FeatureMapSpec& fm) {
    QuantumModel m;
    m.name = "qnn";
    m.parameter_count = arch.parameter_count;
    m.shift_rules.assign(static_cast<std::size_t>(arch.parameter_count), ShiftRule::HalfPi);
    m.predict = [arch, fm](std::span<const double> theta, std::span<const double> features) {
        return forward(arch, theta, features, fm);
    };
    m.encode_features = [arch, fm](std::span<const double> features) {
        return encode_for(arch.num_qubits, features, fm);
    };
    m.run_encoded = [arch](std::span<const double> theta, const StateVector& state) {
        return run_qnn_blocks(arch, theta, state);
    };
    return m;
}

} // namespace qcnn
