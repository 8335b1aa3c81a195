#pragma once

// Scenario execution: builds ODE systems from configs, runs single-neuron
// and coupled closed-loop simulations, derives the synchronization series
// and metrics, and evaluates parameter sweeps (optionally in parallel, with
// deterministic output order).

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlsync/config.hpp"
#include "mlsync/coupling.hpp"
#include "mlsync/ode.hpp"

namespace mlsync {

// Derived series of a coupled run, one entry per recorded sample.
struct CoupledSeries {
    std::vector<double> times;
    std::vector<double> e_v;
    std::vector<double> e_n;
    std::vector<double> q;
    std::vector<double> omega;
    std::vector<double> sigma;

    [[nodiscard]] std::size_t size() const { return times.size(); }
};

struct CoupledRun {
    Trajectory trajectory;  // 5 components: v1, n1, v2, n2, sigma
    CoupledSeries series;
};

// Synchronization summary of one coupled run.
struct SyncMetrics {
    // Earliest recorded time after which max(|e_v|, |e_n|) stays strictly
    // below the tolerance for every later sample; absent if that never holds.
    std::optional<double> sync_time;
    double final_sigma = 0.0;
    double max_abs_ev_tail = 0.0;  // over the final 10% of the horizon
    double max_abs_en_tail = 0.0;
    double q_final = 0.0;
    // Earliest recorded time after which omega <= 0 for every later sample.
    // Purely empirical: after synchronization omega dithers around zero at
    // rounding-noise magnitude, so this often sits near t_end or is absent.
    std::optional<double> omega_first_nonpositive_onset;
};

// System builders (handy for tests and benchmarks as well as the runners).
[[nodiscard]] OdeSystem make_single_system(const NeuronParams& params);
[[nodiscard]] OdeSystem make_coupled_system(const NeuronParams& params,
                                            const ControllerParams& ctrl);

// Integrates the single-neuron scenario under its bounds guard
// (|v| <= bounds.m1, |n| <= bounds.m3).  Requires mode = single.
[[nodiscard]] Trajectory run_single(const SimConfig& config);

// Integrates the 5-state closed loop under check_bounds and derives the
// error/goal series at every recorded sample.  Requires mode = coupled.
[[nodiscard]] CoupledRun run_coupled(const SimConfig& config);

// Metrics over a derived series; `t_end` fixes the tail window even when the
// run terminated early.
[[nodiscard]] SyncMetrics sync_metrics(const CoupledSeries& series,
                                       double tolerance, double t_end);

// ------------------------------------------------------------------
// Parameter sweeps.

struct SweepSpec {
    SimConfig base;               // must be coupled mode
    std::vector<SweepAxis> axes;  // first axis varies slowest
    std::size_t cell_cap = 10000;
};

struct SweepCell {
    std::vector<double> axis_values;     // one per axis, enumeration order
    std::optional<SyncMetrics> metrics;  // absent when the cell failed
    std::string status;                  // "ok" or a failure description
};

struct SweepTable {
    std::vector<std::string> axis_paths;
    std::vector<SweepCell> cells;  // deterministic cross-product order
};

// Validates the spec (axis paths, value lists, cell cap, coupled base),
// then evaluates every cell.  Cells run concurrently on up to `threads`
// workers (0 = hardware concurrency); each cell's outcome lands in its
// preassigned row, so the table is identical regardless of scheduling.
// Per-cell failures (divergence, invalid parameter combinations) are
// reported in the cell status and never abort sibling cells.
[[nodiscard]] SweepTable run_sweep(const SweepSpec& spec, unsigned threads = 0);

// ------------------------------------------------------------------
// Bundled scenarios.

struct BundledScenario {
    std::string_view description;
    SimConfig config;
};

// The two scenarios shipped with the library (also present as config files
// under scenarios/): "paper-set-10" and "paper-set-11".
[[nodiscard]] std::vector<BundledScenario> bundled_scenarios();
[[nodiscard]] std::optional<SimConfig> find_bundled_scenario(std::string_view name);

}  // namespace mlsync
