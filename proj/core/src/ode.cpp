#include "mlsync/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mlsync {

namespace {

void require(bool ok, const char* field, double value, const char* rule) {
    if (!ok) {
        std::ostringstream msg;
        msg << "invalid IntegratorSettings: " << field << " = " << value
            << " violates " << rule;
        throw std::invalid_argument(msg.str());
    }
}

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

// Neumaier-compensated accumulator; keeps 20000+ equal increments exact to
// within one rounding of the total.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct Rk4Workspace {
    std::vector<double> k1, k2, k3, k4, ytmp;
    explicit Rk4Workspace(std::size_t n)
        : k1(n), k2(n), k3(n), k4(n), ytmp(n) {}
};

// One RK4 update into `out`; false if any stage or the result is non-finite.
bool rk4_kernel(const OdeSystem& sys, std::span<const double> y, double h,
                std::span<double> out, Rk4Workspace& w, StepStats& stats) {
    const std::size_t n = sys.dimension;
    sys.field(y, w.k1);
    for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + 0.5 * h * w.k1[i];
    sys.field(w.ytmp, w.k2);
    for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + 0.5 * h * w.k2[i];
    sys.field(w.ytmp, w.k3);
    for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + h * w.k3[i];
    sys.field(w.ytmp, w.k4);
    stats.field_evaluations += 4;
    const double h6 = h / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = y[i] + h6 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
    }
    return all_finite(w.k1) && all_finite(w.k2) && all_finite(w.k3) &&
           all_finite(w.k4) && all_finite(out);
}

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0,
                 A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0,
                 A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0,
                 A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights (error estimator).
constexpr double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0,
                 E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0;

constexpr double SAFETY = 0.9;
constexpr double SHRINK_LIMIT = 0.2;
constexpr double GROWTH_LIMIT = 5.0;

struct Rk45Workspace {
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp, y5;
    explicit Rk45Workspace(std::size_t n)
        : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n) {}
};

struct Rk45Outcome {
    bool finite = false;
    double error_norm = 0.0;
    double suggested_h = 0.0;
};

Rk45Outcome rk45_kernel(const OdeSystem& sys, std::span<const double> y,
                        double h, double rel_tol, double abs_tol,
                        Rk45Workspace& w, StepStats& stats) {
    const std::size_t n = sys.dimension;
    sys.field(y, w.k1);
    for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + h * (A21 * w.k1[i]);
    sys.field(w.ytmp, w.k2);
    for (std::size_t i = 0; i < n; ++i)
        w.ytmp[i] = y[i] + h * (A31 * w.k1[i] + A32 * w.k2[i]);
    sys.field(w.ytmp, w.k3);
    for (std::size_t i = 0; i < n; ++i)
        w.ytmp[i] = y[i] + h * (A41 * w.k1[i] + A42 * w.k2[i] + A43 * w.k3[i]);
    sys.field(w.ytmp, w.k4);
    for (std::size_t i = 0; i < n; ++i)
        w.ytmp[i] = y[i] + h * (A51 * w.k1[i] + A52 * w.k2[i] + A53 * w.k3[i] +
                                A54 * w.k4[i]);
    sys.field(w.ytmp, w.k5);
    for (std::size_t i = 0; i < n; ++i)
        w.ytmp[i] = y[i] + h * (A61 * w.k1[i] + A62 * w.k2[i] + A63 * w.k3[i] +
                                A64 * w.k4[i] + A65 * w.k5[i]);
    sys.field(w.ytmp, w.k6);
    for (std::size_t i = 0; i < n; ++i)
        w.y5[i] = y[i] + h * (B1 * w.k1[i] + B3 * w.k3[i] + B4 * w.k4[i] +
                              B5 * w.k5[i] + B6 * w.k6[i]);
    sys.field(w.y5, w.k7);
    stats.field_evaluations += 7;

    Rk45Outcome out;
    out.finite = all_finite(w.k1) && all_finite(w.k2) && all_finite(w.k3) &&
                 all_finite(w.k4) && all_finite(w.k5) && all_finite(w.k6) &&
                 all_finite(w.k7) && all_finite(w.y5);
    if (!out.finite) return out;

    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double err = h * (E1 * w.k1[i] + E3 * w.k3[i] + E4 * w.k4[i] +
                                E5 * w.k5[i] + E6 * w.k6[i] + E7 * w.k7[i]);
        const double scale =
            abs_tol + rel_tol * std::max(std::fabs(y[i]), std::fabs(w.y5[i]));
        const double r = err / scale;
        sum_sq += r * r;
    }
    out.error_norm = std::sqrt(sum_sq / static_cast<double>(n));
    if (!std::isfinite(out.error_norm)) {
        out.finite = false;
        return out;
    }
    double factor = GROWTH_LIMIT;
    if (out.error_norm > 0.0) {
        factor = std::clamp(SAFETY * std::pow(out.error_norm, -0.2),
                            SHRINK_LIMIT, GROWTH_LIMIT);
    }
    out.suggested_h = h * factor;
    return out;
}

std::string nonfinite_detail(double t_from) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "non-finite state while stepping from t = " << t_from;
    return msg.str();
}

// Shared recording/termination bookkeeping for both drivers.
class TrajectoryBuilder {
public:
    TrajectoryBuilder(Trajectory& out, std::size_t record_stride,
                      const StopFn& stop, const GuardFn& guard)
        : traj_(out), stride_(record_stride), stop_(stop), guard_(guard) {}

    void record(double t, std::span<const double> y) {
        traj_.times.push_back(t);
        traj_.data.insert(traj_.data.end(), y.begin(), y.end());
        recorded_last_ = true;
    }

    // Handles one accepted step: strided recording, then guard and stop
    // checks (guard wins when both fire).  Returns false when the run ends.
    bool accept(std::uint64_t step_index, double t, std::span<const double> y) {
        recorded_last_ = false;
        if (step_index % stride_ == 0) record(t, y);
        if (guard_) {
            if (auto violation = guard_(t, y)) {
                if (!recorded_last_) record(t, y);
                traj_.termination = Termination::divergence_guard;
                traj_.termination_detail = std::move(*violation);
                return false;
            }
        }
        if (stop_ && stop_(t, y)) {
            if (!recorded_last_) record(t, y);
            traj_.termination = Termination::stop_condition;
            return false;
        }
        return true;
    }

    void finish(double t, std::span<const double> y) {
        if (!recorded_last_) record(t, y);
        traj_.termination = Termination::reached_t_end;
    }

    void diverge(const std::string& detail) {
        traj_.termination = Termination::divergence_guard;
        traj_.termination_detail = detail;
    }

private:
    Trajectory& traj_;
    std::size_t stride_;
    const StopFn& stop_;
    const GuardFn& guard_;
    bool recorded_last_ = false;
};

Trajectory integrate_fixed(const OdeSystem& system, std::span<const double> initial,
                           const IntegratorSettings& s, const StopFn& stop,
                           const GuardFn& guard) {
    const std::size_t n = system.dimension;
    const double h = s.step_h;

    // Split the horizon into full steps plus at most one remainder step.
    // When t_end is an (FP-)exact multiple of h, take exactly that many
    // full steps.
    const double ratio = s.t_end / h;
    double n_steps_d = std::floor(ratio + 1e-9);
    if (std::fabs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio)) {
        n_steps_d = std::round(ratio);
    }
    const auto n_full = static_cast<std::uint64_t>(n_steps_d);
    double remainder = s.t_end - n_steps_d * h;
    if (std::fabs(remainder) <= 1e-12 * std::max(1.0, s.t_end)) remainder = 0.0;

    Trajectory traj;
    traj.dimension = n;
    traj.times.reserve(n_full / s.record_stride + 3);
    traj.data.reserve((n_full / s.record_stride + 3) * n);

    TrajectoryBuilder builder(traj, s.record_stride, stop, guard);
    std::vector<double> y(initial.begin(), initial.end());
    std::vector<double> ynext(n);
    Rk4Workspace work(n);
    CompensatedSum time;

    // Step index 0 always lands on the stride, so this records the initial
    // state and runs the guard/stop checks on it.
    if (!builder.accept(0, 0.0, y)) return traj;

    const std::uint64_t total = n_full + (remainder > 0.0 ? 1 : 0);
    for (std::uint64_t k = 1; k <= total; ++k) {
        const double hk = (k <= n_full) ? h : remainder;
        ++traj.stats.attempted;
        if (!rk4_kernel(system, y, hk, ynext, work, traj.stats)) {
            builder.diverge(nonfinite_detail(time.value()));
            return traj;
        }
        ++traj.stats.accepted;
        time.add(hk);
        y.swap(ynext);
        const double t = time.value();
        if (k == total) {
            if (!builder.accept(k, t, y)) return traj;
            builder.finish(t, y);
            return traj;
        }
        if (!builder.accept(k, t, y)) return traj;
    }
    // t_end <= 0 equivalent: nothing to do beyond the initial record.
    builder.finish(0.0, y);
    return traj;
}

Trajectory integrate_adaptive(const OdeSystem& system,
                              std::span<const double> initial,
                              const IntegratorSettings& s, const StopFn& stop,
                              const GuardFn& guard) {
    const std::size_t n = system.dimension;
    const double min_h = 1e-12 * s.t_end;

    Trajectory traj;
    traj.dimension = n;

    TrajectoryBuilder builder(traj, s.record_stride, stop, guard);
    std::vector<double> y(initial.begin(), initial.end());
    Rk45Workspace work(n);
    CompensatedSum time;

    if (!builder.accept(0, 0.0, y)) return traj;

    double h = std::min(s.step_h, s.t_end);
    std::uint64_t accepted = 0;
    double t = 0.0;
    while (s.t_end - t > min_h) {
        h = std::min(h, s.t_end - t);
        ++traj.stats.attempted;
        const Rk45Outcome step =
            rk45_kernel(system, y, h, s.rel_tol, s.abs_tol, work, traj.stats);
        if (!step.finite) {
            builder.diverge(nonfinite_detail(t));
            return traj;
        }
        if (step.error_norm <= 1.0) {
            std::copy(work.y5.begin(), work.y5.end(), y.begin());
            time.add(h);
            t = time.value();
            ++traj.stats.accepted;
            ++accepted;
            if (!builder.accept(accepted, t, y)) return traj;
        } else {
            ++traj.stats.rejected;
        }
        if (step.suggested_h < min_h && s.t_end - t > min_h) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "step size underflow: suggested h = " << step.suggested_h
                << " below " << min_h << " at t = " << t;
            throw StepUnderflowError(msg.str(), t, step.suggested_h);
        }
        h = step.suggested_h;
    }
    builder.finish(t, y);
    return traj;
}

}  // namespace

void IntegratorSettings::validate() const {
    require(std::isfinite(step_h) && step_h > 0.0, "step_h", step_h, "h > 0");
    require(std::isfinite(rel_tol) && rel_tol > 0.0, "rel_tol", rel_tol,
            "rel_tol > 0");
    require(std::isfinite(abs_tol) && abs_tol > 0.0, "abs_tol", abs_tol,
            "abs_tol > 0");
    require(std::isfinite(t_end) && t_end >= 0.0, "t_end", t_end, "t_end >= 0");
    require(record_stride >= 1, "record_stride",
            static_cast<double>(record_stride), "record_stride >= 1");
}

std::vector<double> rk4_step(const OdeSystem& system,
                             std::span<const double> state, double h) {
    Rk4Workspace work(system.dimension);
    std::vector<double> out(system.dimension);
    StepStats stats;
    if (!rk4_kernel(system, state, h, out, work, stats)) {
        throw DivergenceError("rk4_step: non-finite intermediate evaluation");
    }
    return out;
}

Rk45Result rk45_step(const OdeSystem& system, std::span<const double> state,
                     double h, double rel_tol, double abs_tol) {
    Rk45Workspace work(system.dimension);
    StepStats stats;
    const Rk45Outcome out =
        rk45_kernel(system, state, h, rel_tol, abs_tol, work, stats);
    if (!out.finite) {
        throw DivergenceError("rk45_step: non-finite intermediate evaluation");
    }
    return {std::move(work.y5), out.error_norm, out.suggested_h};
}

Trajectory integrate(const OdeSystem& system, std::span<const double> initial,
                     const IntegratorSettings& settings, const StopFn& stop,
                     const GuardFn& guard) {
    if (system.dimension == 0 || !system.field) {
        throw std::invalid_argument(
            "integrate: OdeSystem needs a positive dimension and a field");
    }
    if (initial.size() != system.dimension) {
        std::ostringstream msg;
        msg << "integrate: initial state has " << initial.size()
            << " components, system expects " << system.dimension;
        throw std::invalid_argument(msg.str());
    }
    if (!all_finite(initial)) {
        throw std::invalid_argument("integrate: initial state is not finite");
    }
    settings.validate();

    // Degenerate horizon: only the initial sample.
    if (settings.t_end <= 0.0) {
        Trajectory traj;
        traj.dimension = system.dimension;
        TrajectoryBuilder builder(traj, settings.record_stride, stop, guard);
        if (builder.accept(0, 0.0, initial)) builder.finish(0.0, initial);
        return traj;
    }

    if (settings.method == Method::rk4_fixed) {
        return integrate_fixed(system, initial, settings, stop, guard);
    }
    return integrate_adaptive(system, initial, settings, stop, guard);
}

}  // namespace mlsync
