#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dqhfnn/circuits.hpp"

namespace dqhfnn::fuzzy {

using circuits::CircuitArchitecture;
using qsim::UsageError;

/// Joint membership of a feature pair, one component per qubit.
struct MembershipVector {
    double mu0 = 0.0;
    double mu1 = 0.0;
};

/// mu_k = (<Z_k> + 1) / 2 on the final circuit state.
MembershipVector membership(const CircuitArchitecture &arch, std::span<const double> theta,
                            double x_i, double x_j);

/// Log-geometric mean: (1/N_p) sum_p ln(max(mu0,eps) * max(mu1,eps)).
double aggregate(std::span<const MembershipVector> memberships, double clamp_eps);

/// One dual-qubit circuit per class, sharing a single architecture.
struct QuantumFuzzyLayer {
    CircuitArchitecture arch;
    std::vector<std::vector<double>> thetas; // C vectors of length arch.param_count
    double clamp_eps = 1e-12;

    int n_classes() const { return static_cast<int>(thetas.size()); }
    void validate() const;
};

using PairValues = std::vector<std::pair<double, double>>; // normalized angles

/// h[c] = aggregate of all pairs through the class-c circuit.
std::vector<double> forward(const QuantumFuzzyLayer &layer, const PairValues &pair_values);

/// Gradient of sum_c upstream_grad[c] * h[c] over all C*P quantum parameters,
/// laid out class-major. Uses the parameter-shift rule for d<Z>/dtheta and
/// the analytic chain rule through the logarithm (zero on clamped branches).
std::vector<double> backward_parameter_shift(const QuantumFuzzyLayer &layer,
                                             const PairValues &pair_values,
                                             std::span<const double> upstream_grad);

} // namespace dqhfnn::fuzzy
