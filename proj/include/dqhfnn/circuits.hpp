#pragma once

#include <string>
#include <vector>

#include "dqhfnn/qsim.hpp"

namespace dqhfnn::circuits {

using qsim::GateKind;
using qsim::GateSpec;
using qsim::StateVector;
using qsim::UsageError;

/// Source range of raw feature values for angle normalization.
struct FeatureRange {
    double lo = 0.0;
    double hi = 1.0;

    FeatureRange() = default;
    FeatureRange(double lo_, double hi_);
};

/// Linear map [lo, hi] -> [0, pi], clamped when raw falls outside the range.
double normalize_feature(double raw, const FeatureRange &range);

/// Angle encoding: RY(x_i) (x) RY(x_j) |00>.
StateVector encode(double x_i, double x_j);

/// Trainable dual-qubit block U_q. Parameter slots index into a vector of
/// length param_count.
struct CircuitArchitecture {
    std::string name;
    std::vector<GateSpec> gates;
    int param_count = 0;
    bool declared_symmetric = false;
    bool declared_entangling = false;
    bool excluded_from_training = false;

    /// Gates with every slot replaced by theta[slot].
    std::vector<GateSpec> bind(std::span<const double> theta) const;
};

/// Full circuit of the model: U_q(theta) U_enc(x_i, x_j) |00>.
StateVector run_circuit(const CircuitArchitecture &arch, std::span<const double> theta, double x_i,
                        double x_j);

/// Canonical architectures A..G.
const CircuitArchitecture &registry_lookup(const std::string &name);
std::vector<std::string> registry_names();

/// Textual dump `name;P;gate,gate,...` and its inverse.
std::string dump_architecture(const CircuitArchitecture &arch);
CircuitArchitecture parse_architecture(const std::string &text);

} // namespace dqhfnn::circuits
