#pragma once

#include <span>
#include <string>

#include "qcnn/state_vector.hpp"

namespace qcnn {

enum class FeatureMapKind { ZFeatureMap, ZZFeatureMap };

struct FeatureMapSpec {
    FeatureMapKind kind = FeatureMapKind::ZFeatureMap;
    int repetitions = 1; // in [1, 4]
};

FeatureMapKind feature_map_kind_from_string(const std::string& s);
std::string to_string(FeatureMapKind kind);

// Encodes a classical feature vector (each value in [0, pi], one per qubit)
// into a statevector, starting from |0...0>.
//
// Per repetition:
//   Z map:  H on every qubit, then P(2*x_i) on qubit i.
//   ZZ map: the Z-map layer, then for each adjacent pair (i, i+1) of the
//           linear chain: CNOT(i -> i+1), P(2*(pi - x_i)*(pi - x_{i+1}))
//           on i+1, CNOT(i -> i+1).
StateVector encode(std::span<const double> features, const FeatureMapSpec& spec);

} // namespace qcnn
