#include "dqhfnn/noise.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dqhfnn/rng.hpp"

namespace dqhfnn::noise {

ChannelKind channel_from_string(const std::string &name) {
    if (name == "AD") {
        return ChannelKind::AD;
    }
    if (name == "DP") {
        return ChannelKind::DP;
    }
    if (name == "BF") {
        return ChannelKind::BF;
    }
    if (name == "PF") {
        return ChannelKind::PF;
    }
    throw UsageError("unknown noise channel: " + name);
}

std::string channel_name(ChannelKind kind) {
    switch (kind) {
    case ChannelKind::AD:
        return "AD";
    case ChannelKind::DP:
        return "DP";
    case ChannelKind::BF:
        return "BF";
    case ChannelKind::PF:
        return "PF";
    }
    return "?";
}

NoiseChannel make_channel(ChannelKind kind, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw UsageError("gamma must be in [0, 1]");
    }
    NoiseChannel ch{kind, gamma, {}};
    const double g = gamma;
    const cplx i{0.0, 1.0};
    switch (kind) {
    case ChannelKind::AD:
        ch.kraus.push_back({cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{std::sqrt(1 - g), 0}});
        ch.kraus.push_back({cplx{0, 0}, cplx{std::sqrt(g), 0}, cplx{0, 0}, cplx{0, 0}});
        break;
    case ChannelKind::BF:
        ch.kraus.push_back({std::sqrt(1 - g), 0, 0, std::sqrt(1 - g)});
        ch.kraus.push_back({0, std::sqrt(g), std::sqrt(g), 0});
        break;
    case ChannelKind::PF:
        ch.kraus.push_back({std::sqrt(1 - g), 0, 0, std::sqrt(1 - g)});
        ch.kraus.push_back({std::sqrt(g), 0, 0, -std::sqrt(g)});
        break;
    case ChannelKind::DP:
        ch.kraus.push_back(
            {std::sqrt(1 - 3 * g / 4), 0, 0, std::sqrt(1 - 3 * g / 4)}); // I
        ch.kraus.push_back({0, std::sqrt(g / 4), std::sqrt(g / 4), 0});  // X
        ch.kraus.push_back({0, -i * std::sqrt(g / 4), i * std::sqrt(g / 4), 0}); // Y
        ch.kraus.push_back({std::sqrt(g / 4), 0, 0, -std::sqrt(g / 4)});         // Z
        break;
    }
    return ch;
}

DensityMatrix apply_channel(const DensityMatrix &rho, const NoiseChannel &channel, int qubit) {
    if (qubit != 0 && qubit != 1) {
        throw UsageError("qubit index must be 0 or 1");
    }
    DensityMatrix out; // zero-initialized
    for (const auto &e : channel.kraus) {
        // Embed E on the chosen qubit: q0 is the MSB of the amplitude index.
        std::array<cplx, 16> full{};
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                const int r_hi = r >> 1, r_lo = r & 1;
                const int c_hi = c >> 1, c_lo = c & 1;
                cplx v;
                if (qubit == 0) {
                    v = (r_lo == c_lo) ? e[static_cast<size_t>(2 * r_hi + c_hi)] : cplx{0, 0};
                } else {
                    v = (r_hi == c_hi) ? e[static_cast<size_t>(2 * r_lo + c_lo)] : cplx{0, 0};
                }
                full[static_cast<size_t>(4 * r + c)] = v;
            }
        }
        // out += full * rho * full^dagger
        std::array<cplx, 16> tmp{};
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                cplx s = 0.0;
                for (int k = 0; k < 4; ++k) {
                    s += full[static_cast<size_t>(4 * r + k)] * rho.at(k, c);
                }
                tmp[static_cast<size_t>(4 * r + c)] = s;
            }
        }
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                cplx s = 0.0;
                for (int k = 0; k < 4; ++k) {
                    s += tmp[static_cast<size_t>(4 * r + k)] *
                         std::conj(full[static_cast<size_t>(4 * c + k)]);
                }
                out.at(r, c) += s;
            }
        }
    }
    return out;
}

FidelitySweepReport fidelity_sweep(const circuits::CircuitArchitecture &arch,
                                   std::span<const double> theta,
                                   const std::vector<ChannelKind> &kinds,
                                   const std::vector<double> &gammas, int n_inputs, uint64_t seed,
                                   SweepInputMode mode, int n_workers) {
    if (n_inputs < 1) {
        throw UsageError("fidelity_sweep requires n_inputs >= 1");
    }
    FidelitySweepReport report;
    report.arch = arch.name;
    report.n_inputs = n_inputs;
    report.seed = seed;

    // Inputs are shared across all (kind, gamma) cells so fidelities are
    // comparable; each input index owns a deterministic RNG substream.
    const circuits::FeatureRange unit_range(-1.0, 1.0);
    std::vector<StateVector> states(static_cast<size_t>(n_inputs));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(n_workers)
#endif
    for (int s = 0; s < n_inputs; ++s) {
        Rng rng = Rng::substream(seed, static_cast<uint64_t>(s));
        double xi = rng.uniform(-1.0, 1.0);
        double xj = rng.uniform(-1.0, 1.0);
        if (mode == SweepInputMode::normalized) {
            xi = circuits::normalize_feature(xi, unit_range);
            xj = circuits::normalize_feature(xj, unit_range);
        }
        states[static_cast<size_t>(s)] = circuits::run_circuit(arch, theta, xi, xj);
    }

    std::vector<double> sorted_gammas = gammas;
    std::sort(sorted_gammas.begin(), sorted_gammas.end());
    for (const auto kind : kinds) {
        for (const double gamma : sorted_gammas) {
            const NoiseChannel ch = make_channel(kind, gamma);
            // Per-sample fidelities first, then a fixed-order sum, so the
            // result is bit-identical for any worker count.
            std::vector<double> fids(static_cast<size_t>(n_inputs));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(n_workers)
#endif
            for (int s = 0; s < n_inputs; ++s) {
                const StateVector &psi = states[static_cast<size_t>(s)];
                DensityMatrix rho = qsim::to_density(psi);
                rho = apply_channel(rho, ch, 0);
                rho = apply_channel(rho, ch, 1);
                fids[static_cast<size_t>(s)] = qsim::state_fidelity(psi, rho);
            }
            double total = 0.0;
            for (const double f : fids) {
                total += f;
            }
            report.rows.push_back({kind, gamma, total / n_inputs});
        }
    }
    return report;
}

std::string sweep_to_csv(const FidelitySweepReport &report, const std::string &comment) {
    std::ostringstream os;
    if (!comment.empty()) {
        os << "# " << comment << "\n";
    }
    os << "channel,gamma,mean_fidelity,n_inputs,seed\n";
    char buf[128];
    for (const auto &row : report.rows) {
        std::snprintf(buf, sizeof(buf), "%s,%g,%.4f,%d,%llu\n", channel_name(row.kind).c_str(),
                      row.gamma, row.mean_fidelity, report.n_inputs,
                      static_cast<unsigned long long>(report.seed));
        os << buf;
    }
    return os.str();
}

} // namespace dqhfnn::noise
