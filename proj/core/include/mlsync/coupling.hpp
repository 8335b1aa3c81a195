#pragma once

// Two identical neurons with diffusive voltage coupling of adaptive strength
// sigma, plus the adaptation law that grows sigma proportionally to the
// squared voltage mismatch.  The controller follows the speed-gradient
// recipe: Q = (e_v^2 + e_n^2)/2 is the synchronization goal function, omega
// is its derivative along the flow, and sigma moves against d(omega)/d(sigma).

#include <array>
#include <string>
#include <vector>

#include "mlsync/neuron.hpp"

namespace mlsync {

// Full state of the closed loop: both neurons plus the coupling strength.
struct CoupledState {
    double v1 = 0.0;
    double n1 = 0.0;
    double v2 = 0.0;
    double n2 = 0.0;
    double sigma = 0.0;

    [[nodiscard]] std::array<double, 5> to_array() const {
        return {v1, n1, v2, n2, sigma};
    }
    [[nodiscard]] static CoupledState from_array(const std::array<double, 5>& a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }
};

struct CoupledRates {
    double dv1 = 0.0;
    double dn1 = 0.0;
    double dv2 = 0.0;
    double dn2 = 0.0;
    double dsigma = 0.0;
};

struct ControllerParams {
    double gamma = 0.5;  // adaptation gain, >= 0 (0 freezes sigma)

    void validate() const;  // throws std::invalid_argument
};

// Synchronization error coordinates and the goal function value.
struct ErrorState {
    double e_v = 0.0;  // v1 - v2
    double e_n = 0.0;  // n1 - n2
    double q = 0.0;    // (e_v^2 + e_n^2) / 2, always >= 0
};

[[nodiscard]] ErrorState error_variables(const CoupledState& state);

// Right-hand side of the closed loop:
//   dv1 = f(v1,n1) + sigma (v2 - v1)      dv2 = f(v2,n2) + sigma (v1 - v2)
//   dn1 = g(v1,n1)                        dn2 = g(v2,n2)
//   dsigma = 2 gamma (v1 - v2)^2
// with (f,g) = neuron_field.  Both neurons share one parameter set;
// heterogeneous parameters are out of scope.
[[nodiscard]] CoupledRates coupled_field(const CoupledState& state,
                                         const NeuronParams& params,
                                         const ControllerParams& ctrl);

// d(omega)/d(sigma) = -2 e_v^2; always <= 0, independent of everything else.
[[nodiscard]] double grad_sigma_omega(double e_v);

// Adaptation law sigma' = 2 gamma e_v^2, implemented literally as
// -gamma * grad_sigma_omega(e_v) so the speed-gradient identity is exact.
[[nodiscard]] double sigma_rate(double e_v, const ControllerParams& ctrl);

// Derivative of Q along the flow:
//   omega = e_v (f(v1,n1) - f(v2,n2) - 2 sigma e_v) + e_n (g(v1,n1) - g(v2,n2))
[[nodiscard]] double omega(const CoupledState& state, const NeuronParams& params);

// Divergence guard bounds: |v1| <= m1, |v2| <= m2, |n1| <= m3, |n2| <= m4.
// Defaults sit an order of magnitude above the physical dynamic range, so
// they only trip on numerical blow-up, never on healthy trajectories.
struct BoundsGuard {
    double m1 = 500.0;
    double m2 = 500.0;
    double m3 = 100.0;
    double m4 = 100.0;

    void validate() const;  // throws std::invalid_argument
};

struct BoundsViolation {
    int index = 0;          // 1..4 in the order v1, v2, n1, n2
    const char* component = "";
    double value = 0.0;
    double bound = 0.0;
};

struct BoundsReport {
    std::vector<BoundsViolation> violations;  // empty means pass

    [[nodiscard]] bool pass() const { return violations.empty(); }
    [[nodiscard]] std::string describe() const;  // "" when pass
};

// Bounds are closed: |value| == bound still passes.
[[nodiscard]] BoundsReport check_bounds(const CoupledState& state,
                                        const BoundsGuard& guard);

}  // namespace mlsync
