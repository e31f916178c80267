#include "dqhfnn/qsim.hpp"

#include <algorithm>
#include <cmath>

namespace dqhfnn::qsim {

namespace {

void check_qubit(int qubit) {
    if (qubit != 0 && qubit != 1) {
        throw UsageError("qubit index must be 0 or 1");
    }
}

// Bit mask of a qubit inside the amplitude index (q0 is the MSB).
constexpr int qubit_mask(int qubit) { return qubit == 0 ? 2 : 1; }

} // namespace

GateSpec GateSpec::rotation(GateKind k, int qubit, double angle) {
    if (k == GateKind::CNOT) {
        throw UsageError("rotation() requires RX/RY/RZ");
    }
    check_qubit(qubit);
    GateSpec g;
    g.kind = k;
    g.qubit = qubit;
    g.angle = angle;
    return g;
}

GateSpec GateSpec::rotation_slot(GateKind k, int qubit, int slot) {
    GateSpec g = rotation(k, qubit, 0.0);
    g.param_slot = slot;
    return g;
}

GateSpec GateSpec::cnot(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) {
        throw UsageError("CNOT control must differ from target");
    }
    GateSpec g;
    g.kind = GateKind::CNOT;
    g.control = control;
    g.qubit = target;
    return g;
}

std::array<cplx, 4> rotation_matrix(GateKind kind, double angle) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    switch (kind) {
    case GateKind::RY:
        return {cplx{c, 0}, cplx{-s, 0}, cplx{s, 0}, cplx{c, 0}};
    case GateKind::RX:
        return {cplx{c, 0}, cplx{0, -s}, cplx{0, -s}, cplx{c, 0}};
    case GateKind::RZ:
        return {cplx{c, -s}, cplx{0, 0}, cplx{0, 0}, cplx{c, s}};
    default:
        throw UsageError("rotation_matrix: CNOT has no angle");
    }
}

StateVector apply_rotation(const StateVector &state, GateKind kind, int qubit, double angle) {
    check_qubit(qubit);
    if (!std::isfinite(angle)) {
        throw UsageError("rotation angle must be finite");
    }
    const auto m = rotation_matrix(kind, angle);
    const int bit = qubit_mask(qubit);
    StateVector out;
    for (int k = 0; k < 4; ++k) {
        if (k & bit) {
            continue;
        }
        const cplx a0 = state.amp[static_cast<size_t>(k)];
        const cplx a1 = state.amp[static_cast<size_t>(k | bit)];
        out.amp[static_cast<size_t>(k)] = m[0] * a0 + m[1] * a1;
        out.amp[static_cast<size_t>(k | bit)] = m[2] * a0 + m[3] * a1;
    }
    return out;
}

StateVector apply_cnot(const StateVector &state, int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) {
        throw UsageError("CNOT control must differ from target");
    }
    const int cbit = qubit_mask(control);
    const int tbit = qubit_mask(target);
    StateVector out = state;
    for (int k = 0; k < 4; ++k) {
        if ((k & cbit) && !(k & tbit)) {
            std::swap(out.amp[static_cast<size_t>(k)], out.amp[static_cast<size_t>(k | tbit)]);
        }
    }
    return out;
}

StateVector apply_gate(const StateVector &state, const GateSpec &gate) {
    if (gate.param_slot >= 0) {
        throw UsageError("apply_gate: unresolved parameter slot");
    }
    if (gate.kind == GateKind::CNOT) {
        return apply_cnot(state, gate.control, gate.qubit);
    }
    return apply_rotation(state, gate.kind, gate.qubit, gate.angle);
}

StateVector apply_gates(const StateVector &state, std::span<const GateSpec> gates) {
    StateVector out = state;
    for (const auto &g : gates) {
        out = apply_gate(out, g);
    }
    return out;
}

double expectation_z(const StateVector &state, int qubit) {
    check_qubit(qubit);
    const int bit = qubit_mask(qubit);
    double e = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double mass = std::norm(state.amp[static_cast<size_t>(k)]);
        e += (k & bit) ? -mass : mass;
    }
    return e;
}

DensityMatrix to_density(const StateVector &state) {
    DensityMatrix rho;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            rho.at(r, c) =
                state.amp[static_cast<size_t>(r)] * std::conj(state.amp[static_cast<size_t>(c)]);
        }
    }
    return rho;
}

namespace {

// rho -> U rho U^dagger for a 4x4 unitary built from one gate.
DensityMatrix conjugate_by_gate(const DensityMatrix &rho, const GateSpec &gate) {
    // Build the 4x4 unitary column by column: U e_k as a statevector.
    std::array<std::array<cplx, 4>, 4> u{};
    for (int k = 0; k < 4; ++k) {
        StateVector basis;
        basis.amp = {};
        basis.amp[static_cast<size_t>(k)] = 1.0;
        const StateVector col = apply_gate(basis, gate);
        for (int r = 0; r < 4; ++r) {
            u[static_cast<size_t>(r)][static_cast<size_t>(k)] = col.amp[static_cast<size_t>(r)];
        }
    }
    DensityMatrix tmp; // U rho
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            cplx s = 0.0;
            for (int k = 0; k < 4; ++k) {
                s += u[static_cast<size_t>(r)][static_cast<size_t>(k)] * rho.at(k, c);
            }
            tmp.at(r, c) = s;
        }
    }
    DensityMatrix out; // (U rho) U^dagger
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            cplx s = 0.0;
            for (int k = 0; k < 4; ++k) {
                s += tmp.at(r, k) * std::conj(u[static_cast<size_t>(c)][static_cast<size_t>(k)]);
            }
            out.at(r, c) = s;
        }
    }
    return out;
}

} // namespace

DensityMatrix evolve_density(const DensityMatrix &rho, std::span<const GateSpec> gates) {
    DensityMatrix out = rho;
    for (const auto &g : gates) {
        out = conjugate_by_gate(out, g);
    }
    return out;
}

double state_fidelity(const StateVector &psi, const DensityMatrix &rho) {
    cplx f = 0.0;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            f += std::conj(psi.amp[static_cast<size_t>(r)]) * rho.at(r, c) *
                 psi.amp[static_cast<size_t>(c)];
        }
    }
    return std::clamp(f.real(), 0.0, 1.0);
}

double overlap_sq(const StateVector &a, const StateVector &b) {
    cplx ip = 0.0;
    for (int k = 0; k < 4; ++k) {
        ip += std::conj(a.amp[static_cast<size_t>(k)]) * b.amp[static_cast<size_t>(k)];
    }
    return std::norm(ip);
}

std::string gate_token(const GateSpec &gate) {
    if (gate.kind == GateKind::CNOT) {
        return "CNOT@" + std::to_string(gate.control) + ">" + std::to_string(gate.qubit);
    }
    std::string name = gate.kind == GateKind::RX ? "RX" : gate.kind == GateKind::RY ? "RY" : "RZ";
    std::string t = name + "@" + std::to_string(gate.qubit);
    if (gate.param_slot >= 0) {
        t += "#s" + std::to_string(gate.param_slot);
    } else {
        t += "=" + std::to_string(gate.angle);
    }
    return t;
}

GateSpec parse_gate_token(const std::string &token) {
    if (token.rfind("CNOT@", 0) == 0) {
        const auto gt = token.find('>', 5);
        if (gt == std::string::npos) {
            throw UsageError("bad CNOT token: " + token);
        }
        return GateSpec::cnot(std::stoi(token.substr(5, gt - 5)), std::stoi(token.substr(gt + 1)));
    }
    GateKind kind;
    if (token.rfind("RX@", 0) == 0) {
        kind = GateKind::RX;
    } else if (token.rfind("RY@", 0) == 0) {
        kind = GateKind::RY;
    } else if (token.rfind("RZ@", 0) == 0) {
        kind = GateKind::RZ;
    } else {
        throw UsageError("bad gate token: " + token);
    }
    const std::string rest = token.substr(3);
    const auto slot_pos = rest.find("#s");
    const auto eq_pos = rest.find('=');
    if (slot_pos != std::string::npos) {
        return GateSpec::rotation_slot(kind, std::stoi(rest.substr(0, slot_pos)),
                                       std::stoi(rest.substr(slot_pos + 2)));
    }
    if (eq_pos != std::string::npos) {
        return GateSpec::rotation(kind, std::stoi(rest.substr(0, eq_pos)),
                                  std::stod(rest.substr(eq_pos + 1)));
    }
    throw UsageError("bad rotation token: " + token);
}

} // namespace dqhfnn::qsim
