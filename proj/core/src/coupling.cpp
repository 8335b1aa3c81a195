#include "mlsync/coupling.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mlsync {

void ControllerParams::validate() const {
    if (!std::isfinite(gamma) || gamma < 0.0) {
        std::ostringstream msg;
        msg << "invalid ControllerParams: gamma = " << gamma
            << " violates gamma >= 0";
        throw std::invalid_argument(msg.str());
    }
}

void BoundsGuard::validate() const {
    const double values[4] = {m1, m2, m3, m4};
    const char* names[4] = {"m1", "m2", "m3", "m4"};
    for (int i = 0; i < 4; ++i) {
        if (!std::isfinite(values[i]) || values[i] <= 0.0) {
            std::ostringstream msg;
            msg << "invalid BoundsGuard: " << names[i] << " = " << values[i]
                << " violates " << names[i] << " > 0";
            throw std::invalid_argument(msg.str());
        }
    }
}

ErrorState error_variables(const CoupledState& state) {
    const double e_v = state.v1 - state.v2;
    const double e_n = state.n1 - state.n2;
    return {e_v, e_n, 0.5 * (e_v * e_v + e_n * e_n)};
}

CoupledRates coupled_field(const CoupledState& state, const NeuronParams& params,
                           const ControllerParams& ctrl) {
    const NeuronRates r1 = neuron_field({state.v1, state.n1}, params);
    const NeuronRates r2 = neuron_field({state.v2, state.n2}, params);
    // The two coupling terms are exact negations of each other, which keeps
    // the index-swap symmetry of this field bit-exact.
    const double pull = state.sigma * (state.v2 - state.v1);
    return {r1.dv + pull,
            r1.dn,
            r2.dv - pull,
            r2.dn,
            sigma_rate(state.v1 - state.v2, ctrl)};
}

double grad_sigma_omega(double e_v) {
    return -2.0 * (e_v * e_v);
}

double sigma_rate(double e_v, const ControllerParams& ctrl) {
    return -ctrl.gamma * grad_sigma_omega(e_v);
}

double omega(const CoupledState& state, const NeuronParams& params) {
    const NeuronRates r1 = neuron_field({state.v1, state.n1}, params);
    const NeuronRates r2 = neuron_field({state.v2, state.n2}, params);
    const double e_v = state.v1 - state.v2;
    const double e_n = state.n1 - state.n2;
    return e_v * (r1.dv - r2.dv - 2.0 * state.sigma * e_v) +
           e_n * (r1.dn - r2.dn);
}

BoundsReport check_bounds(const CoupledState& state, const BoundsGuard& guard) {
    BoundsReport report;
    const struct {
        int index;
        const char* component;
        double value;
        double bound;
    } checks[4] = {{1, "v1", state.v1, guard.m1},
                   {2, "v2", state.v2, guard.m2},
                   {3, "n1", state.n1, guard.m3},
                   {4, "n2", state.n2, guard.m4}};
    for (const auto& c : checks) {
        if (!(std::fabs(c.value) <= c.bound)) {  // catches NaN as a violation
            report.violations.push_back({c.index, c.component, c.value, c.bound});
        }
    }
    return report;
}

std::string BoundsReport::describe() const {
    if (violations.empty()) return {};
    std::ostringstream msg;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        const auto& v = violations[i];
        if (i > 0) msg << "; ";
        msg << "|" << v.component << "| = " << std::fabs(v.value)
            << " exceeds bound " << v.bound << " (component " << v.index << ")";
    }
    return msg.str();
}

}  // namespace mlsync
