#pragma once

// Two-variable conductance-based membrane model: a fast voltage V driven by
// calcium, potassium and leak currents, and a slow potassium activation N
// relaxing toward its voltage-dependent steady state.  All quantities are in
// self-consistent model units (conventionally read as mV, ms and uF/cm^2,
// but nothing here depends on that interpretation).

namespace mlsync {

struct NeuronParams {
    double C    = 20.0;   // membrane capacitance
    double g_L  = 2.0;    // leak conductance
    double g_Ca = 4.0;    // maximal calcium conductance
    double g_K  = 8.0;    // maximal potassium conductance
    double V_L  = -50.0;  // leak reversal potential
    double V_Ca = 100.0;  // calcium reversal potential
    double V_K  = -70.0;  // potassium reversal potential
    double I    = 50.0;   // constant external current
    double v1_tilde = -1.0;   // half-activation voltage of the Ca gate
    double v2_tilde = 15.0;   // slope scale of the Ca gate
    double v3_tilde = 10.0;   // half-activation voltage of the K gate
    double v4_tilde = 14.5;   // slope scale of the K gate
    double lambda = 0.1;      // time-scale factor of the recovery equation

    // Throws std::invalid_argument naming the offending field.  Call once
    // when a parameter set enters the system; the math below trusts its
    // inputs and stays exception-free on the hot path.
    void validate() const;
};

// Instantaneous state of one neuron.  n_gate is nominally the fraction of
// open K+ channels, but it is deliberately not clamped to [0,1]: scenario
// initial conditions outside that range are legitimate inputs, so the range
// is a diagnostic (see trajectory reporting), not an invariant.
struct NeuronState {
    double v = 0.0;       // membrane potential
    double n_gate = 0.0;  // K+ activation
};

struct NeuronRates {
    double dv = 0.0;
    double dn = 0.0;
};

// Steady-state gating values and recovery time scale at one voltage.
struct GatingValues {
    double m_inf = 0.0;  // in (0,1)
    double n_inf = 0.0;  // in (0,1)
    double tau = 0.0;    // in (0,1], maximal exactly at v = v3_tilde
};

// m_inf(v) = (1 + tanh((v - v1~)/v2~)) / 2, strictly increasing for v2~ > 0.
[[nodiscard]] double m_inf(double v, const NeuronParams& params);

// n_inf(v) = (1 + tanh((v - v3~)/v4~)) / 2, strictly increasing for v4~ > 0.
[[nodiscard]] double n_inf(double v, const NeuronParams& params);

// tau(v) = 1 / cosh((v - v3~)/(2 v4~)), even about v3~.  The cosh argument
// is capped at magnitude 700 so the result underflows toward 0 instead of
// overflowing for extreme voltages; in the shipped parameter regimes the
// argument never leaves single digits.
[[nodiscard]] double tau_recovery(double v, const NeuronParams& params);

[[nodiscard]] GatingValues gating_at(double v, const NeuronParams& params);

// Right-hand side of the uncoupled model:
//   dv/dt = ( -g_L (v - V_L) - g_Ca m_inf(v) (v - V_Ca)
//             - g_K n (v - V_K) + I ) / C
//   dn/dt = lambda (n_inf(v) - n) / tau(v)
// The recovery equation divides by tau exactly as written (tau is floored at
// 1e-300; a divergence guard upstream handles the resulting large rates).
[[nodiscard]] NeuronRates neuron_field(const NeuronState& state,
                                       const NeuronParams& params);

}  // namespace mlsync
