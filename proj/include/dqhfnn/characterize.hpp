#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dqhfnn/circuits.hpp"

namespace dqhfnn::characterize {

using circuits::CircuitArchitecture;
using qsim::StateVector;
using qsim::UsageError;

/// Haar fidelity density (dim-1)(1-f)^(dim-2); 3(1-f)^2 for two qubits.
double haar_fidelity_pdf(double f, int dim);

/// Sum p ln(p/q) in nats, with 0 ln 0 = 0. q entries must be positive.
double kl_divergence(std::span<const double> p, std::span<const double> q);

struct ExpressibilityReport {
    std::string arch;
    int n_pairs = 0;
    int n_bins = 0;
    double kl_value = 0.0; // log base 2, as reported in the reference table
    uint64_t seed = 0;
};

struct EntanglementReport {
    std::string arch;
    int n_samples = 0;
    double mean_q = 0.0;
    uint64_t seed = 0;
};

inline constexpr int kDefaultBins = 75;
inline constexpr int kDefaultPairs = 5000;
inline constexpr int kDefaultEntSamples = 2000;
inline constexpr double kHistSmoothing = 1e-9;

/// Samples n_pairs state pairs with theta ~ U(0,2pi)^P (and, when
/// sample_inputs is set, inputs ~ U(0,pi)^2 per state), histograms the
/// pairwise fidelities into n_bins equal-width bins on [0,1], and reports the
/// KL divergence to the Haar bin masses in log base 2.
ExpressibilityReport expressibility(const CircuitArchitecture &arch, int n_pairs, int n_bins,
                                    uint64_t seed, bool sample_inputs = true, int n_workers = 1);

/// Meyer-Wallach measure Q = 2 (1 - (tr rho0^2 + tr rho1^2) / 2).
double meyer_wallach(const StateVector &state);

/// Mean Meyer-Wallach Q over theta ~ U(0,2pi)^P and inputs ~ U(0,pi)^2.
EntanglementReport entangling_capability(const CircuitArchitecture &arch, int n_samples,
                                         uint64_t seed, bool sample_inputs = true,
                                         int n_workers = 1);

/// Serial reference paths; bit-identical to the parallel kernels, kept for
/// the equivalence tests and the benchmark.
namespace reference {
ExpressibilityReport expressibility(const CircuitArchitecture &arch, int n_pairs, int n_bins,
                                    uint64_t seed, bool sample_inputs = true);
EntanglementReport entangling_capability(const CircuitArchitecture &arch, int n_samples,
                                         uint64_t seed, bool sample_inputs = true);
} // namespace reference

/// CSV rows `arch,metric,value,n,seed`, values at 3 decimal places.
std::string report_csv_row(const std::string &arch, const std::string &metric, double value, int n,
                           uint64_t seed);

} // namespace dqhfnn::characterize
