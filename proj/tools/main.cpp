// Command-line front end: resolves scenario configs (bundled names or
// files), runs simulations and sweeps, and writes CSV/JSON/plot outputs.
// Exit codes: 0 success, 2 config or validation error, 3 divergence.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlsync/csv.hpp"
#include "mlsync/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

struct SimulateOptions {
    std::string config;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    std::string format = "csv";
};

struct SweepOptions {
    std::string config;
    std::string out_dir;
};

// Bundled scenario name first, then filesystem path.
mlsync::ParsedScenario resolve_config(const std::string& arg) {
    if (auto bundled = mlsync::find_bundled_scenario(arg)) {
        mlsync::ParsedScenario parsed;
        parsed.config = std::move(*bundled);
        return parsed;
    }
    if (!fs::exists(arg)) {
        throw mlsync::ConfigError("'" + arg +
                                  "' is neither a bundled scenario name nor an "
                                  "existing config file");
    }
    return mlsync::load_scenario_file(arg);
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw mlsync::ConfigError("cannot open output file: " + path.string());
    }
    return out;
}

const char* termination_name(mlsync::Termination t) {
    switch (t) {
        case mlsync::Termination::reached_t_end: return "reached-t-end";
        case mlsync::Termination::stop_condition: return "stop-condition";
        case mlsync::Termination::divergence_guard: return "divergence-guard";
    }
    return "unknown";
}

ordered_json stats_json(const mlsync::StepStats& stats) {
    return {{"attempted", stats.attempted},
            {"accepted", stats.accepted},
            {"rejected", stats.rejected},
            {"field_evaluations", stats.field_evaluations}};
}

ordered_json metrics_json(const mlsync::SyncMetrics& m) {
    ordered_json j;
    if (m.sync_time) {
        j["sync_time"] = *m.sync_time;
    } else {
        j["sync_time"] = nullptr;
    }
    j["final_sigma"] = m.final_sigma;
    j["max_abs_ev_tail"] = m.max_abs_ev_tail;
    j["max_abs_en_tail"] = m.max_abs_en_tail;
    j["q_final"] = m.q_final;
    if (m.omega_first_nonpositive_onset) {
        j["omega_first_nonpositive_onset"] = *m.omega_first_nonpositive_onset;
    } else {
        j["omega_first_nonpositive_onset"] = nullptr;
    }
    return j;
}

// The gating range is a diagnostic, not an invariant: report when the
// recorded N values leave [0,1] but keep running.
void note_gating_range(const mlsync::Trajectory& traj,
                       std::initializer_list<std::size_t> n_components) {
    double lo = 1e300;
    double hi = -1e300;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto y = traj.state(i);
        for (std::size_t c : n_components) {
            lo = std::min(lo, y[c]);
            hi = std::max(hi, y[c]);
        }
    }
    if (lo < 0.0 || hi > 1.0) {
        std::cerr << "note: N left the nominal [0,1] range during the run "
                  << "(min " << mlsync::format_shortest(lo) << ", max "
                  << mlsync::format_shortest(hi) << ")\n";
    }
}

void write_single_plot(std::ostream& out) {
    out << "set datafile separator ','\n"
           "set terminal pngcairo size 1000,600\n"
           "set output 'trajectory.png'\n"
           "set xlabel 't'\n"
           "plot 'trajectory.csv' using 1:2 with lines title 'V', \\\n"
           "     'trajectory.csv' using 1:3 with lines title 'N'\n";
}

void write_coupled_plot(std::ostream& out) {
    out << "set datafile separator ','\n"
           "set terminal pngcairo size 1100,800\n"
           "set output 'trajectory.png'\n"
           "set multiplot layout 2,1\n"
           "set xlabel 't'\n"
           "plot 'trajectory.csv' using 1:2 with lines title 'V1', \\\n"
           "     'trajectory.csv' using 1:4 with lines title 'V2'\n"
           "set logscale y\n"
           "plot 'trajectory.csv' using 1:(abs($7)) with lines title '|e_V|', \\\n"
           "     'trajectory.csv' using 1:(abs($8)) with lines title '|e_N|', \\\n"
           "     'trajectory.csv' using 1:6 with lines title 'sigma'\n"
           "unset multiplot\n";
}

int cmd_simulate(const SimulateOptions& opts) {
    mlsync::ParsedScenario parsed = resolve_config(opts.config);
    if (!parsed.sweep_axes.empty()) {
        std::cerr << "note: ignoring " << parsed.sweep_axes.size()
                  << " sweep axis declaration(s); use the sweep command\n";
    }
    mlsync::SimConfig& config = parsed.config;
    // All overrides are applied and the whole config re-validated before any
    // computation or output happens.
    for (const std::string& assignment : opts.overrides) {
        mlsync::apply_override(config, assignment);
    }
    config.validate();

    const fs::path out_dir(opts.out_dir);
    fs::create_directories(out_dir);

    ordered_json summary;
    summary["scenario"] = config.name;
    summary["mode"] = std::string(mlsync::to_string(config.mode));

    const mlsync::Trajectory* trajectory = nullptr;
    mlsync::Trajectory single_traj;
    mlsync::CoupledRun coupled_run;

    if (config.mode == mlsync::SimMode::single) {
        single_traj = mlsync::run_single(config);
        trajectory = &single_traj;
        auto csv = open_output(out_dir / "trajectory.csv");
        mlsync::write_single_csv(csv, single_traj);
        note_gating_range(single_traj, {1});

        const auto final_state = single_traj.final_state();
        summary["final_state"] = {{"V", final_state[0]}, {"N", final_state[1]}};
    } else {
        coupled_run = mlsync::run_coupled(config);
        trajectory = &coupled_run.trajectory;
        auto csv = open_output(out_dir / "trajectory.csv");
        mlsync::write_coupled_csv(csv, coupled_run.trajectory, coupled_run.series);
        note_gating_range(coupled_run.trajectory, {1, 3});

        const mlsync::SyncMetrics metrics = mlsync::sync_metrics(
            coupled_run.series, config.sync_tolerance, config.integrator.t_end);
        summary["metrics"] = metrics_json(metrics);

        std::cout << "sync_time: "
                  << (metrics.sync_time
                          ? mlsync::format_shortest(*metrics.sync_time)
                          : std::string("none"))
                  << "\nfinal_sigma: " << mlsync::format_shortest(metrics.final_sigma)
                  << "\nmax_abs_ev_tail: "
                  << mlsync::format_shortest(metrics.max_abs_ev_tail)
                  << "\nmax_abs_en_tail: "
                  << mlsync::format_shortest(metrics.max_abs_en_tail)
                  << "\nq_final: " << mlsync::format_shortest(metrics.q_final)
                  << "\nomega_first_nonpositive_onset: "
                  << (metrics.omega_first_nonpositive_onset
                          ? mlsync::format_shortest(
                                *metrics.omega_first_nonpositive_onset)
                          : std::string("none"))
                  << "\n";
    }

    summary["termination"] = termination_name(trajectory->termination);
    if (!trajectory->termination_detail.empty()) {
        summary["termination_detail"] = trajectory->termination_detail;
    }
    summary["samples"] = trajectory->size();
    summary["t_final"] = trajectory->times.back();
    summary["stats"] = stats_json(trajectory->stats);

    {
        auto metrics_file = open_output(out_dir / "metrics.json");
        metrics_file << summary.dump(2) << "\n";
    }
    if (opts.format == "csv+plot") {
        auto plot = open_output(out_dir / "plot.gp");
        if (config.mode == mlsync::SimMode::single) {
            write_single_plot(plot);
        } else {
            write_coupled_plot(plot);
        }
    }

    std::cout << "termination: " << termination_name(trajectory->termination)
              << " after " << trajectory->size() << " samples (t = "
              << mlsync::format_shortest(trajectory->times.back()) << ")\n";

    if (trajectory->termination == mlsync::Termination::divergence_guard) {
        std::cerr << "divergence: " << trajectory->termination_detail << "\n";
        return kExitDivergence;
    }
    return kExitOk;
}

int cmd_sweep(const SweepOptions& opts) {
    mlsync::ParsedScenario parsed = resolve_config(opts.config);
    if (parsed.sweep_axes.empty()) {
        throw mlsync::ConfigError("config '" + opts.config +
                                  "' declares no sweep axes "
                                  "(expected sweep.axis.<path> lines)");
    }
    mlsync::SweepSpec spec;
    spec.base = std::move(parsed.config);
    spec.axes = std::move(parsed.sweep_axes);
    spec.cell_cap = parsed.sweep_cell_cap;

    const mlsync::SweepTable table = mlsync::run_sweep(spec);

    const fs::path out_dir(opts.out_dir);
    fs::create_directories(out_dir);
    {
        auto csv = open_output(out_dir / "sweep.csv");
        mlsync::write_sweep_csv(csv, table);
    }

    std::size_t ok = 0;
    for (const auto& cell : table.cells) {
        if (cell.metrics) ++ok;
    }
    std::cout << "sweep: " << ok << "/" << table.cells.size()
              << " cells succeeded\n";
    for (const auto& cell : table.cells) {
        if (!cell.metrics) {
            std::cerr << "cell failed: " << cell.status << "\n";
        }
    }
    return ok > 0 ? kExitOk : kExitDivergence;
}

int cmd_scenarios() {
    for (const auto& scenario : mlsync::bundled_scenarios()) {
        std::cout << scenario.config.name << ": " << scenario.description << "\n";
        std::istringstream lines(mlsync::serialize_config(scenario.config));
        std::string line;
        while (std::getline(lines, line)) {
            std::cout << "  " << line << "\n";
        }
        std::cout << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled-neuron simulations with speed-gradient adaptive "
                 "coupling"};
    app.require_subcommand(1);

    SimulateOptions sim_opts;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Run one scenario and write trajectory.csv + metrics.json");
    simulate->add_option("--config", sim_opts.config,
                         "Bundled scenario name or config file path")
        ->required();
    simulate->add_option("--set", sim_opts.overrides,
                         "Override a config key (key=value, repeatable)");
    simulate->add_option("--out", sim_opts.out_dir, "Output directory");
    simulate->add_option("--format", sim_opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "csv+plot"}));

    SweepOptions sweep_opts;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Run the sweep declared in a config, writing sweep.csv");
    sweep->add_option("--config", sweep_opts.config,
                      "Bundled scenario name or config file path")
        ->required();
    sweep->add_option("--out", sweep_opts.out_dir, "Output directory")->required();

    CLI::App* scenarios =
        app.add_subcommand("scenarios", "List bundled scenarios and their values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim_opts);
        if (sweep->parsed()) return cmd_sweep(sweep_opts);
        if (scenarios->parsed()) return cmd_scenarios();
    } catch (const mlsync::StepUnderflowError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitDivergence;
    } catch (const mlsync::ConfigError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
