#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dqhfnn/characterize.hpp"
#include "dqhfnn/circuits.hpp"
#include "dqhfnn/rng.hpp"

using namespace dqhfnn;
using namespace dqhfnn::circuits;

TEST_CASE("normalize_feature endpoints and midpoint") {
    FeatureRange r(2.0, 6.0);
    CHECK(normalize_feature(2.0, r) == doctest::Approx(0.0));
    CHECK(normalize_feature(6.0, r) == doctest::Approx(M_PI));
    CHECK(normalize_feature(4.0, r) == doctest::Approx(M_PI / 2));
}

TEST_CASE("normalize_feature clamps out-of-range values") {
    FeatureRange r(0.0, 1.0);
    CHECK(normalize_feature(-5.0, r) == 0.0);
    CHECK(normalize_feature(7.0, r) == doctest::Approx(M_PI));
}

TEST_CASE("degenerate range is rejected") {
    CHECK_THROWS_AS(FeatureRange(1.0, 1.0), UsageError);
    CHECK_THROWS_AS(FeatureRange(2.0, 1.0), UsageError);
}

TEST_CASE("encode basics") {
    auto zz = encode(0.0, 0.0);
    CHECK(std::abs(zz.amp[0] - qsim::cplx(1.0, 0.0)) < 1e-12);

    auto oo = encode(M_PI, M_PI);
    CHECK(std::abs(oo.amp[3] - qsim::cplx(1.0, 0.0)) < 1e-12);

    auto half = encode(M_PI / 2, 0.0);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(half.amp[0] - qsim::cplx(r, 0.0)) < 1e-12);
    CHECK(std::abs(half.amp[2] - qsim::cplx(r, 0.0)) < 1e-12);
}

TEST_CASE("encode is separable on a 10x10 grid") {
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            auto s = encode(M_PI * i / 9.0, M_PI * j / 9.0);
            CHECK(characterize::meyer_wallach(s) < 1e-12);
        }
}

TEST_CASE("registry names and properties") {
    auto names = registry_names();
    REQUIRE(names == std::vector<std::string>{"A", "B", "C", "D", "E", "F", "G"});

    const auto &A = registry_lookup("A");
    CHECK(A.param_count == 2);
    CHECK_FALSE(A.declared_entangling);
    CHECK(A.declared_symmetric);

    const auto &C = registry_lookup("C");
    CHECK(C.param_count == 2);
    CHECK(C.declared_entangling);

    const auto &F = registry_lookup("F");
    CHECK(F.excluded_from_training);
    CHECK(F.param_count == 8);

    CHECK(registry_lookup("D").param_count == 4);
    CHECK(registry_lookup("E").param_count == 4);
    CHECK_FALSE(registry_lookup("E").declared_entangling);
    CHECK(registry_lookup("G").param_count == 3);

    CHECK_THROWS_AS(registry_lookup("Z"), UsageError);
}

TEST_CASE("declared_entangling matches CNOT presence") {
    for (const auto &name : registry_names()) {
        const auto &arch = registry_lookup(name);
        bool has_cnot = false;
        for (const auto &g : arch.gates)
            if (g.kind == qsim::GateKind::CNOT) has_cnot = true;
        CHECK(arch.declared_entangling == has_cnot);
    }
}

TEST_CASE("every parameter slot is referenced and in range") {
    for (const auto &name : registry_names()) {
        const auto &arch = registry_lookup(name);
        std::vector<bool> seen(static_cast<size_t>(arch.param_count), false);
        for (const auto &g : arch.gates)
            if (g.param_slot >= 0) {
                REQUIRE(g.param_slot < arch.param_count);
                seen[static_cast<size_t>(g.param_slot)] = true;
            }
        for (bool s : seen) CHECK(s);
    }
}

TEST_CASE("arch A with theta 0 is the encoder") {
    const auto &A = registry_lookup("A");
    std::vector<double> theta{0.0, 0.0};
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const double xi = rng.uniform(0.0, M_PI), xj = rng.uniform(0.0, M_PI);
        auto out = run_circuit(A, theta, xi, xj);
        auto enc = encode(xi, xj);
        CHECK(qsim::overlap_sq(out, enc) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("arch C worked examples") {
    const auto &C = registry_lookup("C");
    // theta = (0,0), inputs (pi,pi): encode gives |11>, CNOT(0->1) maps to |10>.
    auto s = run_circuit(C, std::vector<double>{0.0, 0.0}, M_PI, M_PI);
    CHECK(std::norm(s.amp[2]) == doctest::Approx(1.0).epsilon(1e-12));

    // theta = (pi/2, 0), inputs (0,0): masses 1/2 at |00> and |11>.
    s = run_circuit(C, std::vector<double>{M_PI / 2, 0.0}, 0.0, 0.0);
    CHECK(std::norm(s.amp[0]) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(s.amp[3]) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("run_circuit rejects wrong parameter count") {
    CHECK_THROWS_AS(run_circuit(registry_lookup("C"), std::vector<double>{0.1}, 0.0, 0.0),
                    UsageError);
}

TEST_CASE("CNOT-free circuits have single-input Z expectations") {
    Rng rng(29);
    for (const std::string name : {"A", "E", "G"}) {
        const auto &arch = registry_lookup(name);
        std::vector<double> theta(static_cast<size_t>(arch.param_count));
        for (auto &t : theta) t = rng.uniform(0.0, 2.0 * M_PI);
        const double xi = rng.uniform(0.0, M_PI);
        double base = qsim::expectation_z(run_circuit(arch, theta, xi, 0.0), 0);
        for (int k = 0; k < 10; ++k) {
            const double xj = M_PI * k / 9.0;
            const double z = qsim::expectation_z(run_circuit(arch, theta, xi, xj), 0);
            CHECK(std::abs(z - base) < 1e-12);
        }
    }
}

TEST_CASE("entangling circuits violate input independence for generic theta") {
    for (const std::string name : {"B", "C"}) {
        const auto &arch = registry_lookup(name);
        std::vector<double> theta(static_cast<size_t>(arch.param_count), 0.9);
        double max_dev = 0.0;
        // Dependence shows up on the CNOT target, qubit 1.
        const double xi0 = 0.3;
        const double base = qsim::expectation_z(run_circuit(arch, theta, xi0, 0.2), 1);
        for (int k = 0; k < 10; ++k) {
            const double xi = M_PI * k / 9.0;
            max_dev = std::max(max_dev, std::abs(qsim::expectation_z(
                                             run_circuit(arch, theta, xi, 0.2), 1) -
                                         base));
        }
        CHECK(max_dev > 1e-3);
    }
}

TEST_CASE("run_circuit is 2pi-periodic in every parameter") {
    Rng rng(31);
    for (const auto &name : registry_names()) {
        const auto &arch = registry_lookup(name);
        std::vector<double> theta(static_cast<size_t>(arch.param_count));
        for (auto &t : theta) t = rng.uniform(0.0, 2.0 * M_PI);
        const double xi = rng.uniform(0.0, M_PI), xj = rng.uniform(0.0, M_PI);
        auto base = run_circuit(arch, theta, xi, xj);
        for (int p = 0; p < arch.param_count; ++p) {
            auto shifted = theta;
            shifted[static_cast<size_t>(p)] += 2.0 * M_PI;
            auto out = run_circuit(arch, shifted, xi, xj);
            CHECK(qsim::overlap_sq(base, out) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("dump / parse round trip") {
    for (const auto &name : registry_names()) {
        const auto &arch = registry_lookup(name);
        auto text = dump_architecture(arch);
        auto back = parse_architecture(text);
        CHECK(back.name == arch.name);
        CHECK(back.param_count == arch.param_count);
        REQUIRE(back.gates.size() == arch.gates.size());
        for (size_t g = 0; g < arch.gates.size(); ++g) {
            CHECK(back.gates[g].kind == arch.gates[g].kind);
            CHECK(back.gates[g].qubit == arch.gates[g].qubit);
            CHECK(back.gates[g].param_slot == arch.gates[g].param_slot);
        }
    }
    CHECK_THROWS_AS(parse_architecture("X;1;RX@0#s1"), UsageError); // slot 0 unreferenced
}

TEST_CASE("bind substitutes parameter slots") {
    const auto &C = registry_lookup("C");
    auto bound = C.bind(std::vector<double>{0.4, 0.8});
    for (const auto &g : bound) CHECK(g.param_slot == -1);
    CHECK(bound[0].angle == doctest::Approx(0.4));
    CHECK_THROWS_AS(C.bind(std::vector<double>{0.4}), UsageError);
}
