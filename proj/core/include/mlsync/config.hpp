#pragma once

// Scenario configuration: a flat `key = value` text format with dotted key
// paths ('#' starts a comment, one assignment per line), the SimConfig it
// populates, and the field registry that also backs CLI overrides and sweep
// axis resolution -- one grammar and one error vocabulary for all three.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mlsync/coupling.hpp"
#include "mlsync/neuron.hpp"
#include "mlsync/ode.hpp"

namespace mlsync {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SimMode { single, coupled };

// A complete scenario description.  Defaults reproduce the bundled
// single-neuron scenario, so a config file only has to state deviations.
struct SimConfig {
    std::string name = "unnamed";
    SimMode mode = SimMode::single;
    NeuronParams neuron;

    // Initial conditions; which block applies is decided by `mode`.
    double initial_v = -35.0;  // single: membrane potential
    double initial_n = 0.9;    // single: K+ activation

    double initial_v1 = -35.0;  // coupled: neuron 1
    double initial_n1 = 0.9;
    double initial_v2 = 10.0;  // coupled: neuron 2
    double initial_n2 = 3.0;
    double initial_sigma = -1.0;  // coupled: starting coupling strength

    ControllerParams controller;  // coupled only
    IntegratorSettings integrator;
    double sync_tolerance = 1e-3;  // epsilon for sync metrics (coupled)
    BoundsGuard bounds;

    // Full cross-field validation; throws ConfigError naming the field.
    void validate() const;
};

// One sweep axis: a numeric field path and the values it takes.
struct SweepAxis {
    std::string path;
    std::vector<double> values;
};

// Result of parsing one scenario text: the base config plus any sweep
// declarations (`sweep.axis.<path> = v1, v2, ...` and `sweep.cell_cap = n`).
struct ParsedScenario {
    SimConfig config;
    std::vector<SweepAxis> sweep_axes;  // in file order
    std::size_t sweep_cell_cap = 10000;
};

// Parses scenario text.  `origin` names the source (file path or "<override>")
// for error messages of the form "origin:line: message".  Throws ConfigError
// on unknown keys, duplicate keys, malformed lines or unparsable values, and
// on assignments that do not belong to the declared mode.
[[nodiscard]] ParsedScenario parse_scenario_text(std::string_view text,
                                                 std::string_view origin);

[[nodiscard]] ParsedScenario load_scenario_file(const std::filesystem::path& path);

// Applies one "key=value" assignment (same grammar as a config file line).
// Sweep keys are not overridable.  Throws ConfigError.
void apply_override(SimConfig& config, std::string_view assignment);

// Numeric field registry -- the dotted paths usable as overrides and sweep
// axes (e.g. "neuron.g_Ca", "gamma", "integrator.h", "initial.V2").
[[nodiscard]] std::vector<std::string_view> numeric_field_paths();
[[nodiscard]] bool is_numeric_field(std::string_view path);
// False when the path is unknown or belongs to the other mode.
[[nodiscard]] bool numeric_field_applies(std::string_view path, SimMode mode);
[[nodiscard]] double get_numeric_field(const SimConfig& config, std::string_view path);
void set_numeric_field(SimConfig& config, std::string_view path, double value);

// Canonical flat-grammar rendering of a config (parsing it back yields an
// equal config).  Used by the scenario listing.
[[nodiscard]] std::string serialize_config(const SimConfig& config);

[[nodiscard]] std::string_view to_string(SimMode mode);
[[nodiscard]] std::string_view to_string(Method method);

}  // namespace mlsync
