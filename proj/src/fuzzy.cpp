#include "dqhfnn/fuzzy.hpp"

#include <cmath>
#include <numbers>

namespace dqhfnn::fuzzy {

MembershipVector membership(const CircuitArchitecture &arch, std::span<const double> theta,
                            double x_i, double x_j) {
    const auto state = circuits::run_circuit(arch, theta, x_i, x_j);
    return {(qsim::expectation_z(state, 0) + 1.0) / 2.0,
            (qsim::expectation_z(state, 1) + 1.0) / 2.0};
}

double aggregate(std::span<const MembershipVector> memberships, double clamp_eps) {
    if (memberships.empty()) {
        throw UsageError("aggregate requires at least one membership pair");
    }
    double total = 0.0;
    for (const auto &m : memberships) {
        total += std::log(std::max(m.mu0, clamp_eps)) + std::log(std::max(m.mu1, clamp_eps));
    }
    return total / static_cast<double>(memberships.size());
}

void QuantumFuzzyLayer::validate() const {
    if (thetas.empty()) {
        throw UsageError("QuantumFuzzyLayer needs at least one class");
    }
    for (const auto &t : thetas) {
        if (static_cast<int>(t.size()) != arch.param_count) {
            throw UsageError("theta length does not match architecture");
        }
    }
}

std::vector<double> forward(const QuantumFuzzyLayer &layer, const PairValues &pair_values) {
    layer.validate();
    std::vector<double> h(static_cast<size_t>(layer.n_classes()));
    std::vector<MembershipVector> mus(pair_values.size());
    for (int c = 0; c < layer.n_classes(); ++c) {
        for (size_t p = 0; p < pair_values.size(); ++p) {
            mus[p] = membership(layer.arch, layer.thetas[static_cast<size_t>(c)],
                                pair_values[p].first, pair_values[p].second);
        }
        h[static_cast<size_t>(c)] = aggregate(mus, layer.clamp_eps);
    }
    return h;
}

std::vector<double> backward_parameter_shift(const QuantumFuzzyLayer &layer,
                                             const PairValues &pair_values,
                                             std::span<const double> upstream_grad) {
    layer.validate();
    const int C = layer.n_classes();
    const int P = layer.arch.param_count;
    if (static_cast<int>(upstream_grad.size()) != C) {
        throw UsageError("upstream gradient length must equal the class count");
    }
    const double eps = layer.clamp_eps;
    const double n_pairs = static_cast<double>(pair_values.size());
    std::vector<double> grad(static_cast<size_t>(C * P), 0.0);

    std::vector<double> shifted(static_cast<size_t>(P));
    for (int c = 0; c < C; ++c) {
        const auto &theta = layer.thetas[static_cast<size_t>(c)];
        for (const auto &[xi, xj] : pair_values) {
            const MembershipVector mu = membership(layer.arch, theta, xi, xj);
            // d ln(max(mu, eps)) / d mu: zero on the clamped branch.
            const double w0 = mu.mu0 > eps ? 1.0 / mu.mu0 : 0.0;
            const double w1 = mu.mu1 > eps ? 1.0 / mu.mu1 : 0.0;
            if (w0 == 0.0 && w1 == 0.0) {
                continue;
            }
            for (int i = 0; i < P; ++i) {
                shifted.assign(theta.begin(), theta.end());
                shifted[static_cast<size_t>(i)] = theta[static_cast<size_t>(i)] +
                                                  std::numbers::pi / 2.0;
                const MembershipVector plus = membership(layer.arch, shifted, xi, xj);
                shifted[static_cast<size_t>(i)] = theta[static_cast<size_t>(i)] -
                                                  std::numbers::pi / 2.0;
                const MembershipVector minus = membership(layer.arch, shifted, xi, xj);
                const double dmu0 = 0.5 * (plus.mu0 - minus.mu0);
                const double dmu1 = 0.5 * (plus.mu1 - minus.mu1);
                grad[static_cast<size_t>(c * P + i)] +=
                    upstream_grad[static_cast<size_t>(c)] * (dmu0 * w0 + dmu1 * w1) / n_pairs;
            }
        }
    }
    return grad;
}

} // namespace dqhfnn::fuzzy
