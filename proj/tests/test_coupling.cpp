#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "mlsync/coupling.hpp"

using namespace mlsync;

namespace {

// The two-neuron starting state of the bundled coupled scenario.
constexpr CoupledState kMismatchedStart{-35.0, 0.9, 10.0, 3.0, -1.0};

CoupledState random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> volts(-80.0, 100.0);
    std::uniform_real_distribution<double> gates(-0.5, 3.0);
    std::uniform_real_distribution<double> gains(-2.0, 50.0);
    return {volts(rng), gates(rng), volts(rng), gates(rng), gains(rng)};
}

CoupledState swapped(const CoupledState& s) {
    return {s.v2, s.n2, s.v1, s.n1, s.sigma};
}

}  // namespace

TEST_SUITE("coupling") {

TEST_CASE("error variables vanish for identical states") {
    const ErrorState e = error_variables({-20.0, 0.3, -20.0, 0.3, 5.0});
    CHECK(e.e_v == 0.0);
    CHECK(e.e_n == 0.0);
    CHECK(e.q == 0.0);
}

TEST_CASE("error variables at the mismatched start") {
    const ErrorState e = error_variables(kMismatchedStart);
    CHECK(e.e_v == -45.0);
    // 0.9 - 3 rounds to exactly the double nearest -2.1.
    CHECK(e.e_n == -2.1);
    CHECK(e.q == 0.5 * (45.0 * 45.0 + 2.1 * 2.1));
    CHECK(e.q >= 0.0);
}

TEST_CASE("error variables are antisymmetric under index swap") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const CoupledState s = random_state(rng);
        const ErrorState e = error_variables(s);
        const ErrorState es = error_variables(swapped(s));
        CHECK(es.e_v == -e.e_v);
        CHECK(es.e_n == -e.e_n);
        CHECK(es.q == e.q);
        CHECK(e.q >= 0.0);
    }
}

TEST_CASE("coupled field reference values at the mismatched start") {
    const NeuronParams p;
    const ControllerParams ctrl{0.5};
    const CoupledRates r = coupled_field(kMismatchedStart, p, ctrl);
    CHECK(std::fabs(r.dv1 - (-56.312974424074112362)) <= 1e-12);
    CHECK(std::fabs(r.dn1 - (-0.22142075781690609181)) <= 1e-12);
    CHECK(std::fabs(r.dv2 - (-39.874096273923342331)) <= 1e-12);
    // Neuron 2 sits exactly at the gating midpoint voltage, so its recovery
    // rate is exact: 0.1 * (0.5 - 3) / 1.
    CHECK(r.dn2 == -0.25);
    CHECK(r.dsigma == 2025.0);
}

TEST_CASE("coupling terms vanish for identical neuron states") {
    const NeuronParams p;
    const ControllerParams ctrl{0.5};
    const CoupledState s{-12.0, 0.35, -12.0, 0.35, 3.7};
    const CoupledRates r = coupled_field(s, p, ctrl);
    const NeuronRates solo = neuron_field({s.v1, s.n1}, p);
    CHECK(r.dv1 == solo.dv);
    CHECK(r.dv2 == solo.dv);
    CHECK(r.dn1 == solo.dn);
    CHECK(r.dn2 == solo.dn);
    CHECK(r.dsigma == 0.0);
}

TEST_CASE("zero coupling strength decouples the neurons") {
    const NeuronParams p;
    const ControllerParams ctrl{0.5};
    const CoupledState s{-35.0, 0.9, 10.0, 0.4, 0.0};
    const CoupledRates r = coupled_field(s, p, ctrl);
    const NeuronRates r1 = neuron_field({s.v1, s.n1}, p);
    const NeuronRates r2 = neuron_field({s.v2, s.n2}, p);
    CHECK(r.dv1 == r1.dv);
    CHECK(r.dn1 == r1.dn);
    CHECK(r.dv2 == r2.dv);
    CHECK(r.dn2 == r2.dn);
}

TEST_CASE("coupled field exchange symmetry is bitwise") {
    const NeuronParams p;
    const ControllerParams ctrl{0.5};
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const CoupledState s = random_state(rng);
        const CoupledRates r = coupled_field(s, p, ctrl);
        const CoupledRates rs = coupled_field(swapped(s), p, ctrl);
        CHECK(rs.dv1 == r.dv2);
        CHECK(rs.dn1 == r.dn2);
        CHECK(rs.dv2 == r.dv1);
        CHECK(rs.dn2 == r.dn1);
        CHECK(rs.dsigma == r.dsigma);
    }
}

TEST_CASE("gradient and adaptation-rate arithmetic") {
    const ControllerParams half{0.5};
    CHECK(grad_sigma_omega(0.0) == 0.0);
    CHECK(grad_sigma_omega(3.0) == -18.0);
    CHECK(sigma_rate(0.0, half) == 0.0);
    CHECK(sigma_rate(2.0, half) == 4.0);
    CHECK(sigma_rate(-45.0, half) == 2025.0);
}

TEST_CASE("adaptation rate is exactly minus gamma times the gradient") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> errs(-200.0, 200.0);
    std::uniform_real_distribution<double> gains(0.0, 5.0);
    for (int i = 0; i < 500; ++i) {
        const double e = errs(rng);
        const ControllerParams ctrl{gains(rng)};
        const double grad = grad_sigma_omega(e);
        CHECK(grad <= 0.0);
        const double rate = sigma_rate(e, ctrl);
        CHECK(rate == -ctrl.gamma * grad);
        CHECK(rate >= 0.0);
    }
}

TEST_CASE("zero gain freezes the coupling strength") {
    const ControllerParams frozen{0.0};
    CHECK(sigma_rate(-45.0, frozen) == 0.0);
    CHECK(sigma_rate(17.25, frozen) == 0.0);
}

TEST_CASE("omega vanishes for identical states") {
    const NeuronParams p;
    CHECK(omega({4.0, 0.2, 4.0, 0.2, -1.0}, p) == 0.0);
}

TEST_CASE("omega matches the field dot product to 1e-12 relative") {
    const NeuronParams p;
    const ControllerParams ctrl{0.5};
    std::mt19937_64 rng(31);
    for (int i = 0; i < 500; ++i) {
        const CoupledState s = random_state(rng);
        const ErrorState e = error_variables(s);
        const CoupledRates r = coupled_field(s, p, ctrl);
        const double w = omega(s, p);
        // d/dt of q along the flow, assembled from the field components.
        // The coupling contribution enters through dv1 - dv2.
        const double dot = e.e_v * (r.dv1 - r.dv2) + e.e_n * (r.dn1 - r.dn2);
        const double scale =
            1.0 + std::fabs(w) +
            std::fabs(e.e_v) * (std::fabs(r.dv1) + std::fabs(r.dv2) +
                                2.0 * std::fabs(s.sigma) * std::fabs(e.e_v)) +
            std::fabs(e.e_n) * (std::fabs(r.dn1) + std::fabs(r.dn2));
        CHECK(std::fabs(w - dot) <= 1e-12 * scale);
    }
}

TEST_CASE("controller gain validation") {
    CHECK_NOTHROW(ControllerParams{}.validate());
    CHECK_NOTHROW(ControllerParams{0.0}.validate());
    CHECK_THROWS_AS(ControllerParams{-0.5}.validate(), std::invalid_argument);
    CHECK_THROWS_AS(ControllerParams{std::nan("")}.validate(),
                    std::invalid_argument);
}

TEST_CASE("bounds guard validation") {
    CHECK_NOTHROW(BoundsGuard{}.validate());
    CHECK_THROWS_AS((BoundsGuard{500.0, 500.0, 0.0, 100.0}.validate()),
                    std::invalid_argument);
    CHECK_THROWS_AS((BoundsGuard{-1.0, 500.0, 100.0, 100.0}.validate()),
                    std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS((BoundsGuard{500.0, inf, 100.0, 100.0}.validate()),
                    std::invalid_argument);
    try {
        BoundsGuard{500.0, 500.0, 0.0, 100.0}.validate();
    } catch (const std::invalid_argument& err) {
        CHECK(std::string(err.what()).find("m3") != std::string::npos);
    }
}

TEST_CASE("bounds checking: closed bounds, indexed violations") {
    const BoundsGuard guard;

    CHECK(check_bounds({-70.0, 0.5, 99.0, 0.1, 31.0}, guard).pass());
    CHECK(check_bounds({-70.0, 0.5, 99.0, 0.1, 31.0}, guard).describe().empty());

    // Bounds are closed: sitting exactly on the bound passes.
    CHECK(check_bounds({500.0, 0.5, -500.0, 100.0, 0.0}, guard).pass());

    const BoundsReport one =
        check_bounds({500.0 * (1.0 + 1e-9), 0.5, 0.0, 0.1, 0.0}, guard);
    REQUIRE(one.violations.size() == 1);
    CHECK(one.violations[0].index == 1);
    CHECK(std::string(one.violations[0].component) == "v1");
    CHECK(one.violations[0].bound == 500.0);
    CHECK(one.describe().find("|v1| =") != std::string::npos);
    CHECK(one.describe().find("(component 1)") != std::string::npos);

    const BoundsReport all =
        check_bounds({600.0, 150.0, -700.0, -101.0, 0.0}, guard);
    REQUIRE(all.violations.size() == 4);
    CHECK(all.violations[0].index == 1);  // v1
    CHECK(all.violations[1].index == 2);  // v2
    CHECK(all.violations[2].index == 3);  // n1
    CHECK(all.violations[3].index == 4);  // n2

    // NaN is never within bounds.
    const BoundsReport bad =
        check_bounds({0.0, 0.0, std::nan(""), 0.0, 0.0}, guard);
    REQUIRE(bad.violations.size() == 1);
    CHECK(bad.violations[0].index == 2);
    CHECK(std::string(bad.violations[0].component) == "v2");
}

}  // TEST_SUITE
