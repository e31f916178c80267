#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dqhfnn::qsim {

using cplx = std::complex<double>;

/// Thrown on contract violations (bad qubit index, control == target, ...).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class GateKind { RX, RY, RZ, CNOT };

/// One gate in a circuit. Rotation gates carry either a fixed angle or a
/// slot index into a parameter vector (resolved at execution time).
struct GateSpec {
    GateKind kind = GateKind::RX;
    int qubit = 0;  // target for CNOT
    int control = -1;
    double angle = 0.0;
    int param_slot = -1; // >= 0 means angle comes from the parameter vector

    static GateSpec rotation(GateKind k, int qubit, double angle);
    static GateSpec rotation_slot(GateKind k, int qubit, int slot);
    static GateSpec cnot(int control, int target);
};

/// Two-qubit pure state. Amplitude index k = 2*q0 + q1 with q0 the most
/// significant bit: amp[0]=<00|psi>, amp[1]=<01|psi>, amp[2]=<10|psi>,
/// amp[3]=<11|psi>.
struct StateVector {
    std::array<cplx, 4> amp{cplx{1.0, 0.0}, {}, {}, {}};

    double norm_sq() const {
        double s = 0.0;
        for (const auto &a : amp) {
            s += std::norm(a);
        }
        return s;
    }
};

/// Two-qubit density matrix, row-major 4x4.
struct DensityMatrix {
    std::array<cplx, 16> rho{};

    cplx &at(int r, int c) { return rho[static_cast<size_t>(4 * r + c)]; }
    const cplx &at(int r, int c) const { return rho[static_cast<size_t>(4 * r + c)]; }

    double trace_real() const { return (at(0, 0) + at(1, 1) + at(2, 2) + at(3, 3)).real(); }
};

/// 2x2 single-qubit rotation matrix in the half-angle convention:
///   RY(t) = [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]
///   RX(t) = [[cos(t/2), -i sin(t/2)], [-i sin(t/2), cos(t/2)]]
///   RZ(t) = diag(e^{-it/2}, e^{+it/2})
std::array<cplx, 4> rotation_matrix(GateKind kind, double angle);

StateVector apply_rotation(const StateVector &state, GateKind kind, int qubit, double angle);
StateVector apply_cnot(const StateVector &state, int control, int target);

/// Applies a fully resolved gate (param_slot must be -1).
StateVector apply_gate(const StateVector &state, const GateSpec &gate);
StateVector apply_gates(const StateVector &state, std::span<const GateSpec> gates);

/// Exact <Z> on one qubit: sum of (+/-1 per bit value) * |amp|^2.
double expectation_z(const StateVector &state, int qubit);

DensityMatrix to_density(const StateVector &state);
DensityMatrix evolve_density(const DensityMatrix &rho, std::span<const GateSpec> gates);

/// <psi|rho|psi>, clamped to [0, 1] against round-off.
double state_fidelity(const StateVector &psi, const DensityMatrix &rho);

/// |<a|b>|^2 between two pure states.
double overlap_sq(const StateVector &a, const StateVector &b);

std::string gate_token(const GateSpec &gate);
GateSpec parse_gate_token(const std::string &token);

} // namespace dqhfnn::qsim
