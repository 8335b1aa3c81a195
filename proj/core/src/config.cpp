#include "mlsync/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mlsync {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_double(std::string_view token, double& out) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto result = std::from_chars(first, last, out);
    return result.ec == std::errc() && result.ptr == last;
}

bool parse_index(std::string_view token, std::size_t& out) {
    token = trim(token);
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto result = std::from_chars(first, last, out);
    return result.ec == std::errc() && result.ptr == last;
}

[[noreturn]] void fail(const std::string& prefix, const std::string& message) {
    throw ConfigError(prefix + message);
}

// ------------------------------------------------------------------
// Numeric field registry.  `coupled_only`/`single_only` drive the
// mode-consistency checks shared by file parsing and CLI overrides.

struct NumericEntry {
    std::string_view path;
    double* (*access)(SimConfig&);
    bool coupled_only;
    bool single_only;
};

constexpr std::array<NumericEntry, 30> kNumericFields = {{
    {"neuron.C", [](SimConfig& c) { return &c.neuron.C; }, false, false},
    {"neuron.g_L", [](SimConfig& c) { return &c.neuron.g_L; }, false, false},
    {"neuron.g_Ca", [](SimConfig& c) { return &c.neuron.g_Ca; }, false, false},
    {"neuron.g_K", [](SimConfig& c) { return &c.neuron.g_K; }, false, false},
    {"neuron.V_L", [](SimConfig& c) { return &c.neuron.V_L; }, false, false},
    {"neuron.V_Ca", [](SimConfig& c) { return &c.neuron.V_Ca; }, false, false},
    {"neuron.V_K", [](SimConfig& c) { return &c.neuron.V_K; }, false, false},
    {"neuron.I", [](SimConfig& c) { return &c.neuron.I; }, false, false},
    {"neuron.v1_tilde", [](SimConfig& c) { return &c.neuron.v1_tilde; }, false, false},
    {"neuron.v2_tilde", [](SimConfig& c) { return &c.neuron.v2_tilde; }, false, false},
    {"neuron.v3_tilde", [](SimConfig& c) { return &c.neuron.v3_tilde; }, false, false},
    {"neuron.v4_tilde", [](SimConfig& c) { return &c.neuron.v4_tilde; }, false, false},
    {"neuron.lambda", [](SimConfig& c) { return &c.neuron.lambda; }, false, false},
    {"initial.V", [](SimConfig& c) { return &c.initial_v; }, false, true},
    {"initial.N", [](SimConfig& c) { return &c.initial_n; }, false, true},
    {"initial.V1", [](SimConfig& c) { return &c.initial_v1; }, true, false},
    {"initial.N1", [](SimConfig& c) { return &c.initial_n1; }, true, false},
    {"initial.V2", [](SimConfig& c) { return &c.initial_v2; }, true, false},
    {"initial.N2", [](SimConfig& c) { return &c.initial_n2; }, true, false},
    {"initial.sigma", [](SimConfig& c) { return &c.initial_sigma; }, true, false},
    {"gamma", [](SimConfig& c) { return &c.controller.gamma; }, true, false},
    {"sync_tolerance", [](SimConfig& c) { return &c.sync_tolerance; }, true, false},
    {"integrator.h", [](SimConfig& c) { return &c.integrator.step_h; }, false, false},
    {"integrator.rel_tol", [](SimConfig& c) { return &c.integrator.rel_tol; }, false, false},
    {"integrator.abs_tol", [](SimConfig& c) { return &c.integrator.abs_tol; }, false, false},
    {"integrator.t_end", [](SimConfig& c) { return &c.integrator.t_end; }, false, false},
    {"bounds.m1", [](SimConfig& c) { return &c.bounds.m1; }, false, false},
    {"bounds.m2", [](SimConfig& c) { return &c.bounds.m2; }, false, false},
    {"bounds.m3", [](SimConfig& c) { return &c.bounds.m3; }, false, false},
    {"bounds.m4", [](SimConfig& c) { return &c.bounds.m4; }, false, false},
}};

const NumericEntry* find_numeric(std::string_view path) {
    for (const auto& entry : kNumericFields) {
        if (entry.path == path) return &entry;
    }
    return nullptr;
}

void check_mode_fit(const NumericEntry& entry, SimMode mode,
                    const std::string& prefix) {
    if (entry.coupled_only && mode == SimMode::single) {
        fail(prefix, "key '" + std::string(entry.path) +
                         "' applies only to coupled mode (mode = single)");
    }
    if (entry.single_only && mode == SimMode::coupled) {
        fail(prefix, "key '" + std::string(entry.path) +
                         "' applies only to single mode (mode = coupled)");
    }
}

// Non-numeric keys.  Returns false if the key is not one of them.
bool assign_special(SimConfig& config, std::string_view key, std::string_view value,
                    const std::string& prefix) {
    if (key == "name") {
        if (value.empty()) fail(prefix, "name must not be empty");
        config.name = std::string(value);
        return true;
    }
    if (key == "mode") {
        if (value == "single") {
            config.mode = SimMode::single;
        } else if (value == "coupled") {
            config.mode = SimMode::coupled;
        } else {
            fail(prefix, "mode must be 'single' or 'coupled', got '" +
                             std::string(value) + "'");
        }
        return true;
    }
    if (key == "integrator.method") {
        if (value == "rk4-fixed") {
            config.integrator.method = Method::rk4_fixed;
        } else if (value == "rk45-adaptive") {
            config.integrator.method = Method::rk45_adaptive;
        } else {
            fail(prefix, "integrator.method must be 'rk4-fixed' or "
                         "'rk45-adaptive', got '" + std::string(value) + "'");
        }
        return true;
    }
    if (key == "integrator.record_stride") {
        std::size_t stride = 0;
        if (!parse_index(value, stride) || stride < 1) {
            fail(prefix, "integrator.record_stride must be a positive integer, "
                         "got '" + std::string(value) + "'");
        }
        config.integrator.record_stride = stride;
        return true;
    }
    return false;
}

// Assigns one scalar key.  The mode check compares against `mode_for_check`
// (the final mode for file parsing, the current mode for overrides).
void assign_scalar(SimConfig& config, std::string_view key, std::string_view value,
                   SimMode mode_for_check, const std::string& prefix) {
    if (assign_special(config, key, value, prefix)) return;
    const NumericEntry* entry = find_numeric(key);
    if (entry == nullptr) {
        fail(prefix, "unknown key '" + std::string(key) + "'");
    }
    check_mode_fit(*entry, mode_for_check, prefix);
    double parsed = 0.0;
    if (!parse_double(value, parsed)) {
        fail(prefix, "value for '" + std::string(key) +
                         "' is not a number: '" + std::string(value) + "'");
    }
    *entry->access(config) = parsed;
}

std::string line_prefix(std::string_view origin, std::size_t line_no) {
    std::ostringstream prefix;
    prefix << origin << ":" << line_no << ": ";
    return prefix.str();
}

}  // namespace

void SimConfig::validate() const {
    try {
        neuron.validate();
        integrator.validate();
        bounds.validate();
        if (mode == SimMode::coupled) controller.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("scenario '") + name + "': " + err.what());
    }
    const auto bad = [&](const char* field, double value, const char* rule) {
        std::ostringstream msg;
        msg << "scenario '" << name << "': " << field << " = " << value
            << " violates " << rule;
        throw ConfigError(msg.str());
    };
    if (!(integrator.t_end > 0.0)) {
        bad("integrator.t_end", integrator.t_end, "t_end > 0");
    }
    if (mode == SimMode::single) {
        if (!std::isfinite(initial_v)) bad("initial.V", initial_v, "finiteness");
        if (!std::isfinite(initial_n)) bad("initial.N", initial_n, "finiteness");
    } else {
        if (!std::isfinite(initial_v1)) bad("initial.V1", initial_v1, "finiteness");
        if (!std::isfinite(initial_n1)) bad("initial.N1", initial_n1, "finiteness");
        if (!std::isfinite(initial_v2)) bad("initial.V2", initial_v2, "finiteness");
        if (!std::isfinite(initial_n2)) bad("initial.N2", initial_n2, "finiteness");
        if (!std::isfinite(initial_sigma)) {
            bad("initial.sigma", initial_sigma, "finiteness");
        }
        if (!(std::isfinite(sync_tolerance) && sync_tolerance > 0.0)) {
            bad("sync_tolerance", sync_tolerance, "epsilon > 0");
        }
    }
    if (name.empty()) throw ConfigError("scenario name must not be empty");
}

ParsedScenario parse_scenario_text(std::string_view text, std::string_view origin) {
    ParsedScenario parsed;
    std::set<std::string, std::less<>> seen;
    // Mode-dependent keys are checked after the whole file is read, because
    // the mode line may come after them.
    struct PendingCheck {
        const NumericEntry* entry;
        std::string prefix;
    };
    std::vector<PendingCheck> pending;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        const std::string prefix = line_prefix(origin, line_no);
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail(prefix, "expected 'key = value', got '" + std::string(line) + "'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) fail(prefix, "missing key before '='");
        if (value.empty()) {
            fail(prefix, "missing value for key '" + std::string(key) + "'");
        }
        if (!seen.insert(std::string(key)).second) {
            fail(prefix, "duplicate key '" + std::string(key) + "'");
        }

        if (key == "sweep.cell_cap") {
            std::size_t cap = 0;
            if (!parse_index(value, cap) || cap < 1) {
                fail(prefix, "sweep.cell_cap must be a positive integer, got '" +
                                 std::string(value) + "'");
            }
            parsed.sweep_cell_cap = cap;
            continue;
        }
        if (key.starts_with("sweep.axis.")) {
            const std::string_view axis_path = key.substr(11);
            const NumericEntry* entry = find_numeric(axis_path);
            if (entry == nullptr) {
                fail(prefix, "sweep axis path '" + std::string(axis_path) +
                                 "' does not name a numeric field");
            }
            pending.push_back({entry, prefix});
            SweepAxis axis;
            axis.path = std::string(axis_path);
            std::size_t start = 0;
            const std::string value_str(value);
            while (start <= value_str.size()) {
                std::size_t comma = value_str.find(',', start);
                if (comma == std::string::npos) comma = value_str.size();
                const std::string_view piece =
                    trim(std::string_view(value_str).substr(start, comma - start));
                double v = 0.0;
                if (!parse_double(piece, v) || !std::isfinite(v)) {
                    fail(prefix, "sweep axis '" + axis.path +
                                     "' has a bad value: '" + std::string(piece) + "'");
                }
                axis.values.push_back(v);
                start = comma + 1;
            }
            parsed.sweep_axes.push_back(std::move(axis));
            continue;
        }
        if (key == "mode" || key == "name" || key == "integrator.method" ||
            key == "integrator.record_stride") {
            assign_scalar(parsed.config, key, value, parsed.config.mode, prefix);
            continue;
        }
        const NumericEntry* entry = find_numeric(key);
        if (entry == nullptr) {
            fail(prefix, "unknown key '" + std::string(key) + "'");
        }
        double parsed_value = 0.0;
        if (!parse_double(value, parsed_value)) {
            fail(prefix, "value for '" + std::string(key) +
                             "' is not a number: '" + std::string(value) + "'");
        }
        *entry->access(parsed.config) = parsed_value;
        pending.push_back({entry, prefix});
    }

    for (const auto& check : pending) {
        check_mode_fit(*check.entry, parsed.config.mode, check.prefix);
    }
    return parsed;
}

ParsedScenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str(), path.string());
}

void apply_override(SimConfig& config, std::string_view assignment) {
    const std::string prefix = "override '" + std::string(assignment) + "': ";
    const std::size_t eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        fail(prefix, "expected key=value");
    }
    const std::string_view key = trim(assignment.substr(0, eq));
    const std::string_view value = trim(assignment.substr(eq + 1));
    if (key.empty()) fail(prefix, "missing key");
    if (value.empty()) fail(prefix, "missing value");
    if (key.starts_with("sweep.")) {
        fail(prefix, "sweep keys cannot be overridden");
    }
    assign_scalar(config, key, value, config.mode, prefix);
}

std::vector<std::string_view> numeric_field_paths() {
    std::vector<std::string_view> paths;
    paths.reserve(kNumericFields.size());
    for (const auto& entry : kNumericFields) paths.push_back(entry.path);
    return paths;
}

bool is_numeric_field(std::string_view path) {
    return find_numeric(path) != nullptr;
}

bool numeric_field_applies(std::string_view path, SimMode mode) {
    const NumericEntry* entry = find_numeric(path);
    if (entry == nullptr) return false;
    if (entry->coupled_only && mode == SimMode::single) return false;
    if (entry->single_only && mode == SimMode::coupled) return false;
    return true;
}

double get_numeric_field(const SimConfig& config, std::string_view path) {
    const NumericEntry* entry = find_numeric(path);
    if (entry == nullptr) {
        throw ConfigError("unknown numeric field '" + std::string(path) + "'");
    }
    return *entry->access(const_cast<SimConfig&>(config));
}

void set_numeric_field(SimConfig& config, std::string_view path, double value) {
    const NumericEntry* entry = find_numeric(path);
    if (entry == nullptr) {
        throw ConfigError("unknown numeric field '" + std::string(path) + "'");
    }
    *entry->access(config) = value;
}

std::string_view to_string(SimMode mode) {
    return mode == SimMode::single ? "single" : "coupled";
}

std::string_view to_string(Method method) {
    return method == Method::rk4_fixed ? "rk4-fixed" : "rk45-adaptive";
}

namespace {

std::string shortest(double x) {
    std::array<char, 64> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), result.ptr);
}

}  // namespace

std::string serialize_config(const SimConfig& c) {
    std::ostringstream out;
    const auto line = [&](std::string_view key, const std::string& value) {
        out << key << " = " << value << "\n";
    };
    line("name", c.name);
    line("mode", std::string(to_string(c.mode)));
    for (const auto& entry : kNumericFields) {
        if (entry.coupled_only && c.mode == SimMode::single) continue;
        if (entry.single_only && c.mode == SimMode::coupled) continue;
        // Integrator and bounds keys are grouped below, after method/stride.
        if (entry.path.starts_with("integrator.") || entry.path.starts_with("bounds.")) {
            continue;
        }
        line(entry.path, shortest(*entry.access(const_cast<SimConfig&>(c))));
    }
    line("integrator.method", std::string(to_string(c.integrator.method)));
    line("integrator.h", shortest(c.integrator.step_h));
    line("integrator.rel_tol", shortest(c.integrator.rel_tol));
    line("integrator.abs_tol", shortest(c.integrator.abs_tol));
    line("integrator.t_end", shortest(c.integrator.t_end));
    line("integrator.record_stride", std::to_string(c.integrator.record_stride));
    line("bounds.m1", shortest(c.bounds.m1));
    line("bounds.m2", shortest(c.bounds.m2));
    line("bounds.m3", shortest(c.bounds.m3));
    line("bounds.m4", shortest(c.bounds.m4));
    return out.str();
}

}  // namespace mlsync
