#include "mlsync/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "mlsync/csv.hpp"

namespace mlsync {

namespace {

std::optional<std::string> bound_violation(const char* component, double value,
                                           double bound, double t) {
    if (std::fabs(value) <= bound) return std::nullopt;
    std::string msg = "|";
    msg += component;
    msg += "| = ";
    msg += format_shortest(std::fabs(value));
    msg += " exceeds bound ";
    msg += format_shortest(bound);
    msg += " at t = ";
    msg += format_shortest(t);
    return msg;
}

}  // namespace

OdeSystem make_single_system(const NeuronParams& params) {
    OdeSystem system;
    system.dimension = 2;
    system.field = [params](std::span<const double> y, std::span<double> dy) {
        const NeuronRates r = neuron_field({y[0], y[1]}, params);
        dy[0] = r.dv;
        dy[1] = r.dn;
    };
    return system;
}

OdeSystem make_coupled_system(const NeuronParams& params,
                              const ControllerParams& ctrl) {
    OdeSystem system;
    system.dimension = 5;
    system.field = [params, ctrl](std::span<const double> y, std::span<double> dy) {
        const CoupledRates r =
            coupled_field({y[0], y[1], y[2], y[3], y[4]}, params, ctrl);
        dy[0] = r.dv1;
        dy[1] = r.dn1;
        dy[2] = r.dv2;
        dy[3] = r.dn2;
        dy[4] = r.dsigma;
    };
    return system;
}

Trajectory run_single(const SimConfig& config) {
    config.validate();
    if (config.mode != SimMode::single) {
        throw ConfigError("run_single requires mode = single (scenario '" +
                          config.name + "' is coupled)");
    }
    const OdeSystem system = make_single_system(config.neuron);
    const double initial[2] = {config.initial_v, config.initial_n};
    const GuardFn guard = [&config](double t, std::span<const double> y)
        -> std::optional<std::string> {
        if (auto v = bound_violation("V", y[0], config.bounds.m1, t)) return v;
        if (auto v = bound_violation("N", y[1], config.bounds.m3, t)) return v;
        return std::nullopt;
    };
    return integrate(system, initial, config.integrator, {}, guard);
}

CoupledRun run_coupled(const SimConfig& config) {
    config.validate();
    if (config.mode != SimMode::coupled) {
        throw ConfigError("run_coupled requires mode = coupled (scenario '" +
                          config.name + "' is single)");
    }
    const OdeSystem system = make_coupled_system(config.neuron, config.controller);
    const double initial[5] = {config.initial_v1, config.initial_n1,
                               config.initial_v2, config.initial_n2,
                               config.initial_sigma};
    const GuardFn guard = [&config](double t, std::span<const double> y)
        -> std::optional<std::string> {
        const BoundsReport report = check_bounds(
            {y[0], y[1], y[2], y[3], y[4]}, config.bounds);
        if (report.pass()) return std::nullopt;
        return report.describe() + " at t = " + format_shortest(t);
    };

    CoupledRun run;
    run.trajectory = integrate(system, initial, config.integrator, {}, guard);

    const std::size_t samples = run.trajectory.size();
    CoupledSeries& series = run.series;
    series.times = run.trajectory.times;
    series.e_v.reserve(samples);
    series.e_n.reserve(samples);
    series.q.reserve(samples);
    series.omega.reserve(samples);
    series.sigma.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const auto y = run.trajectory.state(i);
        const CoupledState state{y[0], y[1], y[2], y[3], y[4]};
        const ErrorState err = error_variables(state);
        series.e_v.push_back(err.e_v);
        series.e_n.push_back(err.e_n);
        series.q.push_back(err.q);
        series.omega.push_back(omega(state, config.neuron));
        series.sigma.push_back(state.sigma);
    }
    return run;
}

SyncMetrics sync_metrics(const CoupledSeries& series, double tolerance,
                         double t_end) {
    SyncMetrics metrics;
    const std::size_t n = series.size();
    if (n == 0) return metrics;

    // Suffix scans from the end: the earliest sample such that the condition
    // holds for it and everything after it.
    std::optional<std::size_t> sync_idx;
    std::optional<std::size_t> onset_idx;
    bool sync_alive = true;
    bool onset_alive = true;
    for (std::size_t i = n; i-- > 0;) {
        const double err = std::max(std::fabs(series.e_v[i]), std::fabs(series.e_n[i]));
        if (sync_alive) {
            if (err < tolerance) {
                sync_idx = i;
            } else {
                sync_alive = false;
            }
        }
        if (onset_alive) {
            if (series.omega[i] <= 0.0) {
                onset_idx = i;
            } else {
                onset_alive = false;
            }
        }
        if (!sync_alive && !onset_alive) break;
    }
    if (sync_idx) metrics.sync_time = series.times[*sync_idx];
    if (onset_idx) metrics.omega_first_nonpositive_onset = series.times[*onset_idx];

    const double tail_start = 0.9 * t_end;
    double ev_tail = 0.0;
    double en_tail = 0.0;
    bool tail_seen = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (series.times[i] >= tail_start) {
            ev_tail = std::max(ev_tail, std::fabs(series.e_v[i]));
            en_tail = std::max(en_tail, std::fabs(series.e_n[i]));
            tail_seen = true;
        }
    }
    if (!tail_seen) {
        // Early-terminated run: fall back to the final sample.
        ev_tail = std::fabs(series.e_v[n - 1]);
        en_tail = std::fabs(series.e_n[n - 1]);
    }
    metrics.max_abs_ev_tail = ev_tail;
    metrics.max_abs_en_tail = en_tail;
    metrics.q_final = series.q[n - 1];
    metrics.final_sigma = series.sigma[n - 1];
    return metrics;
}

namespace {

SweepCell evaluate_cell(const SweepSpec& spec, std::size_t cell_index) {
    SweepCell cell;
    SimConfig config = spec.base;

    // Decompose the cell index with the first axis slowest.
    std::size_t rest = cell_index;
    std::size_t block = 1;
    for (const auto& axis : spec.axes) block *= axis.values.size();
    for (const auto& axis : spec.axes) {
        block /= axis.values.size();
        const std::size_t pick = rest / block;
        rest %= block;
        const double value = axis.values[pick];
        cell.axis_values.push_back(value);
        set_numeric_field(config, axis.path, value);
    }

    try {
        config.validate();
        CoupledRun run = run_coupled(config);
        if (run.trajectory.termination == Termination::divergence_guard) {
            cell.status = "divergence: " + run.trajectory.termination_detail;
            return cell;
        }
        cell.metrics =
            sync_metrics(run.series, config.sync_tolerance, config.integrator.t_end);
        cell.status = "ok";
    } catch (const std::exception& err) {
        cell.status = err.what();
    }
    return cell;
}

}  // namespace

SweepTable run_sweep(const SweepSpec& spec, unsigned threads) {
    spec.base.validate();
    if (spec.base.mode != SimMode::coupled) {
        throw ConfigError("sweep base scenario '" + spec.base.name +
                          "' must be coupled mode (metrics are sync metrics)");
    }
    std::set<std::string_view> seen_paths;
    std::size_t total = 1;
    for (const auto& axis : spec.axes) {
        if (!numeric_field_applies(axis.path, SimMode::coupled)) {
            throw ConfigError("sweep axis path '" + axis.path +
                              "' does not name a coupled-mode numeric field");
        }
        if (!seen_paths.insert(axis.path).second) {
            throw ConfigError("duplicate sweep axis path '" + axis.path + "'");
        }
        if (axis.values.empty()) {
            throw ConfigError("sweep axis '" + axis.path + "' has no values");
        }
        for (double v : axis.values) {
            if (!std::isfinite(v)) {
                throw ConfigError("sweep axis '" + axis.path +
                                  "' has a non-finite value");
            }
        }
        if (total > spec.cell_cap / axis.values.size()) {
            throw ConfigError("sweep cross-product exceeds the cell cap of " +
                              std::to_string(spec.cell_cap));
        }
        total *= axis.values.size();
    }

    SweepTable table;
    for (const auto& axis : spec.axes) table.axis_paths.push_back(axis.path);
    table.cells.resize(total);

    unsigned workers = threads != 0 ? threads : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(
        std::min<std::size_t>(workers, total));

    if (workers <= 1) {
        for (std::size_t i = 0; i < total; ++i) {
            table.cells[i] = evaluate_cell(spec, i);
        }
        return table;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= total) return;
                table.cells[i] = evaluate_cell(spec, i);
            }
        });
    }
    for (auto& worker : pool) worker.join();
    return table;
}

namespace {

SimConfig make_paper_set_10() {
    SimConfig config;  // struct defaults are exactly this scenario
    config.name = "paper-set-10";
    config.mode = SimMode::single;
    config.initial_v = -35.0;
    config.initial_n = 0.9;
    return config;
}

SimConfig make_paper_set_11() {
    SimConfig config;
    config.name = "paper-set-11";
    config.mode = SimMode::coupled;
    config.initial_v1 = -35.0;
    config.initial_n1 = 0.9;
    config.initial_v2 = 10.0;
    config.initial_n2 = 3.0;
    config.initial_sigma = -1.0;
    config.controller.gamma = 0.5;
    config.sync_tolerance = 1e-3;
    return config;
}

}  // namespace

std::vector<BundledScenario> bundled_scenarios() {
    return {
        {"one neuron in the sustained-spiking regime", make_paper_set_10()},
        {"two diffusively coupled neurons with adaptive gain, synchronizing "
         "from mismatched initial states",
         make_paper_set_11()},
    };
}

std::optional<SimConfig> find_bundled_scenario(std::string_view name) {
    for (auto& scenario : bundled_scenarios()) {
        if (scenario.config.name == name) return std::move(scenario.config);
    }
    return std::nullopt;
}

}  // namespace mlsync
