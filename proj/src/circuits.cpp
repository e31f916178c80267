#include "dqhfnn/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace dqhfnn::circuits {

FeatureRange::FeatureRange(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(hi > lo)) {
        throw UsageError("FeatureRange requires hi > lo");
    }
}

double normalize_feature(double raw, const FeatureRange &range) {
    if (!std::isfinite(raw)) {
        throw UsageError("normalize_feature: raw value must be finite");
    }
    const double t = (raw - range.lo) / (range.hi - range.lo);
    return std::clamp(t, 0.0, 1.0) * std::numbers::pi;
}

StateVector encode(double x_i, double x_j) {
    StateVector s;
    s = qsim::apply_rotation(s, GateKind::RY, 0, x_i);
    s = qsim::apply_rotation(s, GateKind::RY, 1, x_j);
    return s;
}

std::vector<GateSpec> CircuitArchitecture::bind(std::span<const double> theta) const {
    if (static_cast<int>(theta.size()) != param_count) {
        throw UsageError("parameter vector length does not match architecture");
    }
    std::vector<GateSpec> bound = gates;
    for (auto &g : bound) {
        if (g.param_slot >= 0) {
            g.angle = theta[static_cast<size_t>(g.param_slot)];
            g.param_slot = -1;
        }
    }
    return bound;
}

StateVector run_circuit(const CircuitArchitecture &arch, std::span<const double> theta, double x_i,
                        double x_j) {
    const auto bound = arch.bind(theta);
    return qsim::apply_gates(encode(x_i, x_j), bound);
}

namespace {

CircuitArchitecture make(std::string name, std::vector<GateSpec> gates, bool symmetric,
                         bool excluded = false) {
    CircuitArchitecture a;
    a.name = std::move(name);
    a.gates = std::move(gates);
    a.declared_symmetric = symmetric;
    a.excluded_from_training = excluded;
    int max_slot = -1;
    for (const auto &g : a.gates) {
        max_slot = std::max(max_slot, g.param_slot);
        if (g.kind == GateKind::CNOT) {
            a.declared_entangling = true;
        }
    }
    a.param_count = max_slot + 1;
    return a;
}

using G = GateSpec;
using K = GateKind;

std::map<std::string, CircuitArchitecture> build_registry() {
    std::map<std::string, CircuitArchitecture> reg;
    reg["A"] = make("A", {G::rotation_slot(K::RX, 0, 0), G::rotation_slot(K::RX, 1, 1)}, true);
    reg["B"] = make("B", {G::cnot(0, 1), G::rotation_slot(K::RX, 0, 0),
                          G::rotation_slot(K::RZ, 1, 1)},
                    false);
    reg["C"] = make("C", {G::rotation_slot(K::RX, 0, 0), G::cnot(0, 1),
                          G::rotation_slot(K::RZ, 1, 1)},
                    false);
    reg["D"] = make("D", {G::rotation_slot(K::RX, 0, 0), G::rotation_slot(K::RZ, 0, 1),
                          G::rotation_slot(K::RX, 1, 2), G::rotation_slot(K::RZ, 1, 3),
                          G::cnot(0, 1), G::cnot(1, 0)},
                    true);
    reg["E"] = make("E", {G::rotation_slot(K::RX, 0, 0), G::rotation_slot(K::RZ, 0, 1),
                          G::rotation_slot(K::RX, 1, 2), G::rotation_slot(K::RZ, 1, 3)},
                    true);
    // F = two stacked D layers
    reg["F"] = make("F", {G::rotation_slot(K::RX, 0, 0), G::rotation_slot(K::RZ, 0, 1),
                          G::rotation_slot(K::RX, 1, 2), G::rotation_slot(K::RZ, 1, 3),
                          G::cnot(0, 1), G::cnot(1, 0), G::rotation_slot(K::RX, 0, 4),
                          G::rotation_slot(K::RZ, 0, 5), G::rotation_slot(K::RX, 1, 6),
                          G::rotation_slot(K::RZ, 1, 7), G::cnot(0, 1), G::cnot(1, 0)},
                    true, /*excluded=*/true);
    reg["G"] = make("G", {G::rotation_slot(K::RX, 0, 0), G::rotation_slot(K::RZ, 0, 1),
                          G::rotation_slot(K::RX, 1, 2)},
                    false);
    return reg;
}

const std::map<std::string, CircuitArchitecture> &registry() {
    static const auto reg = build_registry();
    return reg;
}

} // namespace

const CircuitArchitecture &registry_lookup(const std::string &name) {
    const auto &reg = registry();
    const auto it = reg.find(name);
    if (it == reg.end()) {
        throw UsageError("unknown architecture: " + name);
    }
    return it->second;
}

std::vector<std::string> registry_names() {
    std::vector<std::string> names;
    for (const auto &[k, v] : registry()) {
        names.push_back(k);
    }
    return names;
}

std::string dump_architecture(const CircuitArchitecture &arch) {
    std::ostringstream os;
    os << arch.name << ";" << arch.param_count << ";";
    for (size_t i = 0; i < arch.gates.size(); ++i) {
        if (i > 0) {
            os << ",";
        }
        os << qsim::gate_token(arch.gates[i]);
    }
    return os.str();
}

CircuitArchitecture parse_architecture(const std::string &text) {
    const auto p1 = text.find(';');
    const auto p2 = text.find(';', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos) {
        throw UsageError("bad architecture dump: " + text);
    }
    CircuitArchitecture a;
    a.name = text.substr(0, p1);
    a.param_count = std::stoi(text.substr(p1 + 1, p2 - p1 - 1));
    std::stringstream ss(text.substr(p2 + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        a.gates.push_back(qsim::parse_gate_token(tok));
        if (a.gates.back().kind == GateKind::CNOT) {
            a.declared_entangling = true;
        }
    }
    // Validate slot coverage: every slot in [0, P) referenced at least once.
    std::vector<bool> seen(static_cast<size_t>(a.param_count), false);
    for (const auto &g : a.gates) {
        if (g.param_slot >= 0) {
            if (g.param_slot >= a.param_count) {
                throw UsageError("parameter slot out of range in dump");
            }
            seen[static_cast<size_t>(g.param_slot)] = true;
        }
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
        throw UsageError("unreferenced parameter slot in dump");
    }
    return a;
}

} // namespace dqhfnn::circuits
