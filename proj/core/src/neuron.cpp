#include "mlsync/neuron.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mlsync {

namespace {

void require(bool ok, const char* field, double value, const char* rule) {
    if (!ok) {
        std::ostringstream msg;
        msg << "invalid NeuronParams: " << field << " = " << value
            << " violates " << rule;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

void NeuronParams::validate() const {
    require(std::isfinite(C) && C > 0.0, "C", C, "C > 0");
    require(std::isfinite(g_L) && g_L >= 0.0, "g_L", g_L, "g_L >= 0");
    require(std::isfinite(g_Ca) && g_Ca >= 0.0, "g_Ca", g_Ca, "g_Ca >= 0");
    require(std::isfinite(g_K) && g_K >= 0.0, "g_K", g_K, "g_K >= 0");
    require(std::isfinite(V_L), "V_L", V_L, "finiteness");
    require(std::isfinite(V_Ca), "V_Ca", V_Ca, "finiteness");
    require(std::isfinite(V_K), "V_K", V_K, "finiteness");
    require(std::isfinite(I), "I", I, "finiteness");
    require(std::isfinite(v1_tilde), "v1_tilde", v1_tilde, "finiteness");
    require(std::isfinite(v2_tilde) && v2_tilde != 0.0, "v2_tilde", v2_tilde,
            "v2_tilde != 0");
    require(std::isfinite(v3_tilde), "v3_tilde", v3_tilde, "finiteness");
    require(std::isfinite(v4_tilde) && v4_tilde != 0.0, "v4_tilde", v4_tilde,
            "v4_tilde != 0");
    require(std::isfinite(lambda) && lambda > 0.0, "lambda", lambda,
            "lambda > 0");
}

double m_inf(double v, const NeuronParams& params) {
    return 0.5 * (1.0 + std::tanh((v - params.v1_tilde) / params.v2_tilde));
}

double n_inf(double v, const NeuronParams& params) {
    return 0.5 * (1.0 + std::tanh((v - params.v3_tilde) / params.v4_tilde));
}

double tau_recovery(double v, const NeuronParams& params) {
    double arg = (v - params.v3_tilde) / (2.0 * params.v4_tilde);
    if (arg > 700.0) arg = 700.0;
    if (arg < -700.0) arg = -700.0;
    return 1.0 / std::cosh(arg);
}

GatingValues gating_at(double v, const NeuronParams& params) {
    return {m_inf(v, params), n_inf(v, params), tau_recovery(v, params)};
}

NeuronRates neuron_field(const NeuronState& state, const NeuronParams& params) {
    const double v = state.v;
    const double n = state.n_gate;
    const double dv =
        (1.0 / params.C) *
        (-params.g_L * (v - params.V_L) - params.g_Ca * m_inf(v, params) * (v - params.V_Ca) -
         params.g_K * n * (v - params.V_K) + params.I);
    double tau = tau_recovery(v, params);
    if (tau < 1e-300) tau = 1e-300;
    const double dn = params.lambda * (n_inf(v, params) - n) / tau;
    return {dv, dn};
}

}  // namespace mlsync
