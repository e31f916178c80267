#include "dqhfnn/characterize.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dqhfnn/rng.hpp"

namespace dqhfnn::characterize {

double haar_fidelity_pdf(double f, int dim) {
    if (dim < 2) {
        throw UsageError("haar_fidelity_pdf requires dim >= 2");
    }
    if (f < 0.0 || f > 1.0) {
        throw UsageError("fidelity must lie in [0, 1]");
    }
    return (dim - 1) * std::pow(1.0 - f, dim - 2);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw UsageError("kl_divergence: length mismatch");
    }
    double kl = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            if (q[i] <= 0.0) {
                throw UsageError("kl_divergence: q must be positive where p > 0");
            }
            kl += p[i] * std::log(p[i] / q[i]);
        }
    }
    return kl < 0.0 ? 0.0 : kl;
}

double meyer_wallach(const StateVector &state) {
    // For a two-qubit pure state both reduced purities coincide and
    // tr rho0^2 = 1 - 2 det rho0 with det rho0 = |a0 a3 - a1 a2|^2, so
    // Q = 2 (1 - tr rho0^2) = 4 |a0 a3 - a1 a2|^2. The determinant form is
    // non-negative by construction. Product states land within squared
    // round-off (~1e-32) of zero; values below the flush threshold cannot be
    // distinguished from rounding noise and are reported as exactly 0.
    const qsim::cplx det = state.amp[0] * state.amp[3] - state.amp[1] * state.amp[2];
    double q = 4.0 * std::norm(det);
    if (q < 1e-24) return 0.0;
    return std::min(q, 1.0);
}

namespace {

StateVector sample_state(const CircuitArchitecture &arch, Rng &rng, bool sample_inputs) {
    std::vector<double> theta(static_cast<size_t>(arch.param_count));
    for (auto &t : theta) {
        t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    double xi = 0.0, xj = 0.0;
    if (sample_inputs) {
        xi = rng.uniform(0.0, std::numbers::pi);
        xj = rng.uniform(0.0, std::numbers::pi);
    }
    return circuits::run_circuit(arch, theta, xi, xj);
}

/// Haar bin masses: integral of 3(1-f)^2 over each bin, i.e. (1-a)^3-(1-b)^3.
std::vector<double> haar_bin_masses(int n_bins) {
    std::vector<double> q(static_cast<size_t>(n_bins));
    for (int b = 0; b < n_bins; ++b) {
        const double a = static_cast<double>(b) / n_bins;
        const double c = static_cast<double>(b + 1) / n_bins;
        q[static_cast<size_t>(b)] = std::pow(1.0 - a, 3) - std::pow(1.0 - c, 3);
    }
    return q;
}

double binned_kl_bits(const std::vector<int> &counts, int n_pairs, int n_bins) {
    std::vector<double> p(static_cast<size_t>(n_bins));
    std::vector<double> q = haar_bin_masses(n_bins);
    double psum = 0.0, qsum = 0.0;
    for (int b = 0; b < n_bins; ++b) {
        p[static_cast<size_t>(b)] =
            static_cast<double>(counts[static_cast<size_t>(b)]) / n_pairs + kHistSmoothing;
        q[static_cast<size_t>(b)] += kHistSmoothing;
        psum += p[static_cast<size_t>(b)];
        qsum += q[static_cast<size_t>(b)];
    }
    for (int b = 0; b < n_bins; ++b) {
        p[static_cast<size_t>(b)] /= psum;
        q[static_cast<size_t>(b)] /= qsum;
    }
    return kl_divergence(p, q) / std::numbers::ln2;
}

template <bool Parallel>
ExpressibilityReport expressibility_impl(const CircuitArchitecture &arch, int n_pairs, int n_bins,
                                         uint64_t seed, bool sample_inputs, int n_workers) {
    if (n_pairs < 100) {
        throw UsageError("expressibility requires n_pairs >= 100");
    }
    if (n_bins < 2) {
        throw UsageError("expressibility requires n_bins >= 2");
    }
    // Each pair owns a substream, so the bin of pair i is independent of
    // worker count; counts are merged in index order afterwards.
    std::vector<int> bin_of(static_cast<size_t>(n_pairs));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(n_workers) if (Parallel)
#endif
    for (int i = 0; i < n_pairs; ++i) {
        Rng rng = Rng::substream(seed, static_cast<uint64_t>(i));
        const StateVector a = sample_state(arch, rng, sample_inputs);
        const StateVector b = sample_state(arch, rng, sample_inputs);
        const double f = qsim::overlap_sq(a, b);
        int bin = static_cast<int>(f * n_bins);
        if (bin >= n_bins) {
            bin = n_bins - 1; // f == 1 lands in the top bin
        }
        bin_of[static_cast<size_t>(i)] = bin;
    }
    std::vector<int> counts(static_cast<size_t>(n_bins), 0);
    for (const int b : bin_of) {
        ++counts[static_cast<size_t>(b)];
    }
    ExpressibilityReport report;
    report.arch = arch.name;
    report.n_pairs = n_pairs;
    report.n_bins = n_bins;
    report.seed = seed;
    report.kl_value = binned_kl_bits(counts, n_pairs, n_bins);
    return report;
}

template <bool Parallel>
EntanglementReport entangling_impl(const CircuitArchitecture &arch, int n_samples, uint64_t seed,
                                   bool sample_inputs, int n_workers) {
    if (n_samples < 100) {
        throw UsageError("entangling_capability requires n_samples >= 100");
    }
    std::vector<double> qs(static_cast<size_t>(n_samples));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(n_workers) if (Parallel)
#endif
    for (int i = 0; i < n_samples; ++i) {
        Rng rng = Rng::substream(seed, static_cast<uint64_t>(i));
        qs[static_cast<size_t>(i)] = meyer_wallach(sample_state(arch, rng, sample_inputs));
    }
    double total = 0.0;
    for (const double q : qs) {
        total += q; // fixed order: result is independent of worker count
    }
    EntanglementReport report;
    report.arch = arch.name;
    report.n_samples = n_samples;
    report.seed = seed;
    report.mean_q = total / n_samples;
    return report;
}

} // namespace

ExpressibilityReport expressibility(const CircuitArchitecture &arch, int n_pairs, int n_bins,
                                    uint64_t seed, bool sample_inputs, int n_workers) {
    return expressibility_impl<true>(arch, n_pairs, n_bins, seed, sample_inputs, n_workers);
}

EntanglementReport entangling_capability(const CircuitArchitecture &arch, int n_samples,
                                         uint64_t seed, bool sample_inputs, int n_workers) {
    return entangling_impl<true>(arch, n_samples, seed, sample_inputs, n_workers);
}

namespace reference {

ExpressibilityReport expressibility(const CircuitArchitecture &arch, int n_pairs, int n_bins,
                                    uint64_t seed, bool sample_inputs) {
    return expressibility_impl<false>(arch, n_pairs, n_bins, seed, sample_inputs, 1);
}

EntanglementReport entangling_capability(const CircuitArchitecture &arch, int n_samples,
                                         uint64_t seed, bool sample_inputs) {
    return entangling_impl<false>(arch, n_samples, seed, sample_inputs, 1);
}

} // namespace reference

std::string report_csv_row(const std::string &arch, const std::string &metric, double value, int n,
                           uint64_t seed) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.3f,%d,%llu\n", arch.c_str(), metric.c_str(), value, n,
                  static_cast<unsigned long long>(seed));
    return buf;
}

} // namespace dqhfnn::characterize
