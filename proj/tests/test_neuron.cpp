#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "mlsync/neuron.hpp"

using namespace mlsync;

namespace {

std::string thrown_message(const NeuronParams& params) {
    try {
        params.validate();
    } catch (const std::invalid_argument& err) {
        return err.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("neuron") {

TEST_CASE("default parameters validate") {
    CHECK_NOTHROW(NeuronParams{}.validate());
}

TEST_CASE("validation rejects bad parameters and names the field") {
    NeuronParams p;

    p.C = 0.0;
    CHECK(thrown_message(p).find("C = 0") != std::string::npos);
    p = NeuronParams{};

    p.lambda = -0.1;
    CHECK(thrown_message(p).find("lambda") != std::string::npos);
    p = NeuronParams{};

    p.v2_tilde = 0.0;
    CHECK(thrown_message(p).find("v2_tilde") != std::string::npos);
    p = NeuronParams{};

    p.v4_tilde = 0.0;
    CHECK(thrown_message(p).find("v4_tilde") != std::string::npos);
    p = NeuronParams{};

    p.g_K = -1.0;
    CHECK(thrown_message(p).find("g_K") != std::string::npos);
    p = NeuronParams{};

    p.V_Ca = std::numeric_limits<double>::infinity();
    CHECK(thrown_message(p).find("V_Ca") != std::string::npos);
    p = NeuronParams{};

    p.I = std::nan("");
    CHECK(thrown_message(p).find("I =") != std::string::npos);
}

TEST_CASE("gating midpoints are exact") {
    const NeuronParams p;
    CHECK(m_inf(p.v1_tilde, p) == 0.5);
    CHECK(n_inf(p.v3_tilde, p) == 0.5);
    CHECK(tau_recovery(p.v3_tilde, p) == 1.0);
}

TEST_CASE("gating reference values") {
    const NeuronParams p;
    // Arguments chosen so the tanh/cosh argument is exactly 1; expected
    // values computed with 50-digit arithmetic and rounded to double.
    CHECK(std::fabs(m_inf(14.0, p) - 0.88079707797788244406) <= 5e-15);
    CHECK(std::fabs(n_inf(24.5, p) - 0.88079707797788244406) <= 5e-15);
    CHECK(std::fabs(tau_recovery(39.0, p) - 0.64805427366388539957) <= 5e-15);
}

TEST_CASE("gating saturates cleanly at extreme voltages") {
    const NeuronParams p;
    CHECK(std::fabs(n_inf(-1e6, p) - 0.0) <= 1e-12);
    CHECK(std::fabs(m_inf(1e6, p) - 1.0) <= 1e-12);
    // No overflow anywhere, even at the edge of the double range.
    CHECK(std::isfinite(tau_recovery(1e308, p)));
    CHECK(std::isfinite(tau_recovery(-1e308, p)));
    CHECK(tau_recovery(1e308, p) >= 0.0);
}

TEST_CASE("gating ranges and monotonicity") {
    const NeuronParams p;

    // Closed range over the full guard-scale span.  (In exact arithmetic the
    // range is open, but tanh saturates to exactly +-1 in double precision
    // past an argument of ~19, i.e. |v| beyond ~286 here.)
    for (int i = 0; i <= 2000; ++i) {
        const double v = -500.0 + i * 0.5;
        const GatingValues g = gating_at(v, p);
        CHECK(g.m_inf >= 0.0);
        CHECK(g.m_inf <= 1.0);
        CHECK(g.n_inf >= 0.0);
        CHECK(g.n_inf <= 1.0);
        CHECK(g.tau > 0.0);
        CHECK(g.tau <= 1.0);
    }

    // Strict bounds and strict monotonicity away from saturation.
    double prev_m = -1.0;
    double prev_n = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = -100.0 + i * 0.2;
        const double m = m_inf(v, p);
        const double n = n_inf(v, p);
        CHECK(m > 0.0);
        CHECK(m < 1.0);
        CHECK(n > 0.0);
        CHECK(n < 1.0);
        CHECK(m > prev_m);
        CHECK(n > prev_n);
        prev_m = m;
        prev_n = n;
    }
}

TEST_CASE("tau is symmetric about v3_tilde") {
    const NeuronParams p;
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> dist(0.0, 300.0);
    for (int i = 0; i < 200; ++i) {
        const double d = dist(rng);
        const double left = tau_recovery(p.v3_tilde - d, p);
        const double right = tau_recovery(p.v3_tilde + d, p);
        // (v3 + d) - v3 re-rounds d by up to one ulp, so compare relative.
        CHECK(std::fabs(left - right) <= 1e-14 * std::max(left, right));
    }
    const double d = 7.3;
    const double left = tau_recovery(p.v3_tilde - d, p);
    const double right = tau_recovery(p.v3_tilde + d, p);
    CHECK(std::fabs(left - right) <= 1e-14 * right);
}

TEST_CASE("recovery rate vanishes exactly at the gating equilibrium") {
    const NeuronParams p;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-120.0, 120.0);
    for (int i = 0; i < 200; ++i) {
        const double v = dist(rng);
        const NeuronRates r = neuron_field({v, n_inf(v, p)}, p);
        CHECK(r.dn == 0.0);
    }
}

TEST_CASE("leak-only equilibrium zeroes the field exactly") {
    NeuronParams p;
    p.I = 0.0;
    p.g_Ca = 0.0;
    p.g_K = 0.0;
    const NeuronRates r = neuron_field({p.V_L, n_inf(p.V_L, p)}, p);
    CHECK(r.dv == 0.0);
    CHECK(r.dn == 0.0);
}

TEST_CASE("field reference values at the spiking-start state") {
    const NeuronParams p;
    const NeuronRates r = neuron_field({-35.0, 0.9}, p);
    CHECK(std::fabs(r.dv - (-11.312974424074112362)) <= 1e-12);
    CHECK(std::fabs(r.dn - (-0.22142075781690609181)) <= 1e-12);
}

TEST_CASE("gating_at matches the individual functions bitwise") {
    const NeuronParams p;
    for (double v : {-80.0, -35.0, 0.0, 10.0, 42.5, 97.0}) {
        const GatingValues g = gating_at(v, p);
        CHECK(g.m_inf == m_inf(v, p));
        CHECK(g.n_inf == n_inf(v, p));
        CHECK(g.tau == tau_recovery(v, p));
    }
}

TEST_CASE("evaluations are deterministic across calls") {
    const NeuronParams p;
    const NeuronState s{-22.0, 0.4};
    const NeuronRates first = neuron_field(s, p);
    for (int i = 0; i < 10; ++i) {
        const NeuronRates again = neuron_field(s, p);
        CHECK(again.dv == first.dv);
        CHECK(again.dn == first.dn);
    }
}

TEST_CASE("recovery stays finite when tau underflows") {
    const NeuronParams p;
    // Far beyond any guard bound tau floors at 1e-300; the rate is huge but
    // finite, and the integrator's divergence guard is what stops such runs.
    const NeuronRates r = neuron_field({1e6, 0.5}, p);
    CHECK(std::isfinite(r.dn));
    CHECK(std::fabs(r.dn) > 1e100);
}

}  // TEST_SUITE
