#pragma once

// Explicit integration of autonomous ODE systems: classical fixed-step RK4
// and the Dormand-Prince embedded 5(4) adaptive pair, with optional stop
// conditions and per-step guards.  Everything here is deterministic:
// identical inputs produce bit-identical trajectories.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlsync {

// An autonomous system y' = field(y).  The evaluator writes the derivative
// of `state` into `deriv`; both spans have exactly `dimension` elements.
struct OdeSystem {
    std::size_t dimension = 0;
    std::function<void(std::span<const double> state, std::span<double> deriv)> field;
};

enum class Method {
    rk4_fixed,      // classical RK4 with constant step h
    rk45_adaptive,  // Dormand-Prince 5(4) with step-size control
};

struct IntegratorSettings {
    Method method = Method::rk4_fixed;
    double step_h = 0.01;     // fixed step; initial step for the adaptive method
    double rel_tol = 1e-8;    // adaptive only
    double abs_tol = 1e-10;   // adaptive only
    double t_end = 200.0;     // 0 means the degenerate single-record run
    std::size_t record_stride = 1;  // keep every k-th accepted step

    void validate() const;  // throws std::invalid_argument
};

enum class Termination {
    reached_t_end,
    stop_condition,
    divergence_guard,
};

struct StepStats {
    std::uint64_t attempted = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t field_evaluations = 0;
};

// Recorded samples of one integration.  States are stored row-major; all
// recorded states are finite (a non-finite step is reported through the
// termination fields instead of being recorded).
struct Trajectory {
    std::size_t dimension = 0;
    std::vector<double> times;
    std::vector<double> data;  // times.size() * dimension values
    Termination termination = Termination::reached_t_end;
    std::string termination_detail;  // empty unless divergence_guard
    StepStats stats;

    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] std::span<const double> state(std::size_t i) const {
        return {data.data() + i * dimension, dimension};
    }
    [[nodiscard]] std::span<const double> final_state() const {
        return state(times.size() - 1);
    }
};

// Thrown by the single-step entry points when a field evaluation or the
// resulting state is non-finite.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by the adaptive driver when step control pushes the step size
// below 1e-12 * t_end (the problem is effectively singular at this scale).
struct StepUnderflowError : std::runtime_error {
    StepUnderflowError(const std::string& what, double at_time, double at_step)
        : std::runtime_error(what), time(at_time), step(at_step) {}
    double time;
    double step;
};

// One classical RK4 update (4 field evaluations).
[[nodiscard]] std::vector<double> rk4_step(const OdeSystem& system,
                                           std::span<const double> state,
                                           double h);

struct Rk45Result {
    std::vector<double> state;  // 5th-order update
    double error_norm = 0.0;    // scaled norm; <= 1 means acceptable
    double suggested_h = 0.0;   // next step via safety 0.9, clamp [0.2, 5.0]
};

// One Dormand-Prince 5(4) trial step (7 field evaluations).  The error norm
// is sqrt(mean_i((y5_i - y4_i) / (abs_tol + rel_tol * max(|y_i|, |y5_i|)))^2).
[[nodiscard]] Rk45Result rk45_step(const OdeSystem& system,
                                   std::span<const double> state, double h,
                                   double rel_tol, double abs_tol);

// Stop condition: evaluated on each accepted state; returning true ends the
// run with Termination::stop_condition.  Guard: returns a violation
// description (or nullopt to continue); a violation ends the run with
// Termination::divergence_guard and the description in termination_detail.
using StopFn = std::function<bool(double t, std::span<const double> state)>;
using GuardFn =
    std::function<std::optional<std::string>(double t, std::span<const double> state)>;

// Integrates from t = 0 until t_end, the stop condition, or a guard
// violation, whichever comes first.  Records the initial state, every
// record_stride-th accepted step, and the final accepted state.  Time is
// accumulated with compensated summation, so fixed-step stamps satisfy
// |t_k - k h| <= 1e-9 t_end over any horizon.  A non-finite state ends the
// run as divergence_guard with the failing step's start time in the detail
// string; the partial trajectory up to the last finite state is returned.
[[nodiscard]] Trajectory integrate(const OdeSystem& system,
                                   std::span<const double> initial,
                                   const IntegratorSettings& settings,
                                   const StopFn& stop = {},
                                   const GuardFn& guard = {});

}  // namespace mlsync
