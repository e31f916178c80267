#pragma once

#include <array>
#include <string>
#include <vector>

#include "dqhfnn/circuits.hpp"
#include "dqhfnn/qsim.hpp"

namespace dqhfnn::noise {

using qsim::cplx;
using qsim::DensityMatrix;
using qsim::StateVector;
using qsim::UsageError;

enum class ChannelKind { AD, DP, BF, PF };

ChannelKind channel_from_string(const std::string &name);
std::string channel_name(ChannelKind kind);

/// Single-qubit channel in operator-sum form: rho -> sum_k E_k rho E_k^+.
struct NoiseChannel {
    ChannelKind kind;
    double gamma;
    std::vector<std::array<cplx, 4>> kraus; // row-major 2x2 operators
};

/// Kraus operators for a channel at strength gamma in [0, 1].
///   AD: {[[1,0],[0,sqrt(1-g)]], [[0,sqrt(g)],[0,0]]}
///   BF: {sqrt(1-g) I, sqrt(g) X}
///   PF: {sqrt(1-g) I, sqrt(g) Z}
///   DP: {sqrt(1-3g/4) I, sqrt(g/4) X, sqrt(g/4) Y, sqrt(g/4) Z}
NoiseChannel make_channel(ChannelKind kind, double gamma);

/// Applies the single-qubit channel to one qubit of a two-qubit state.
DensityMatrix apply_channel(const DensityMatrix &rho, const NoiseChannel &channel, int qubit);

/// How raw sweep inputs in [-1, 1] become rotation angles.
enum class SweepInputMode {
    raw,       // used directly as angles (reproduces the reference fidelity table)
    normalized // mapped to [0, pi] via FeatureRange(-1, 1)
};

struct FidelitySweepRow {
    ChannelKind kind;
    double gamma;
    double mean_fidelity;
};

struct FidelitySweepReport {
    std::string arch;
    std::vector<FidelitySweepRow> rows; // gamma ascending within each channel
    int n_inputs = 0;
    uint64_t seed = 0;
};

/// For each (kind, gamma): draws n_inputs input pairs uniformly from [-1,1]^2,
/// runs the noiseless circuit to get |psi>, then the density-matrix path with
/// the channel applied once per qubit after the full unitary, and records the
/// mean fidelity <psi|rho|psi>.
FidelitySweepReport fidelity_sweep(const circuits::CircuitArchitecture &arch,
                                   std::span<const double> theta,
                                   const std::vector<ChannelKind> &kinds,
                                   const std::vector<double> &gammas, int n_inputs, uint64_t seed,
                                   SweepInputMode mode = SweepInputMode::raw, int n_workers = 1);

/// CSV with header `channel,gamma,mean_fidelity,n_inputs,seed`, 4 decimals.
std::string sweep_to_csv(const FidelitySweepReport &report, const std::string &comment = "");

} // namespace dqhfnn::noise
