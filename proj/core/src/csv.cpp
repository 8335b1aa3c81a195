#include "mlsync/csv.hpp"

#include <array>
#include <charconv>
#include <ostream>

namespace mlsync {

std::string format_sig17(double x) {
    std::array<char, 64> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                      std::chars_format::general, 17);
    return std::string(buf.data(), result.ptr);
}

std::string format_shortest(double x) {
    std::array<char, 64> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), result.ptr);
}

void write_single_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "t,V1,N1\n";
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const auto state = trajectory.state(i);
        out << format_sig17(trajectory.times[i]) << ',' << format_sig17(state[0])
            << ',' << format_sig17(state[1]) << '\n';
    }
}

void write_coupled_csv(std::ostream& out, const Trajectory& trajectory,
                       const CoupledSeries& series) {
    out << "t,V1,N1,V2,N2,sigma,e_V,e_N,Q,omega\n";
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const auto state = trajectory.state(i);
        out << format_sig17(trajectory.times[i]);
        for (std::size_t j = 0; j < 5; ++j) out << ',' << format_sig17(state[j]);
        out << ',' << format_sig17(series.e_v[i]) << ',' << format_sig17(series.e_n[i])
            << ',' << format_sig17(series.q[i]) << ',' << format_sig17(series.omega[i])
            << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
    for (const auto& path : table.axis_paths) out << path << ',';
    out << "status,sync_time,final_sigma,max_abs_ev_tail,max_abs_en_tail,"
           "q_final,omega_first_nonpositive_onset\n";
    for (const auto& cell : table.cells) {
        for (double v : cell.axis_values) out << format_sig17(v) << ',';
        if (cell.metrics) {
            const SyncMetrics& m = *cell.metrics;
            out << cell.status << ',';
            if (m.sync_time) out << format_sig17(*m.sync_time);
            out << ',' << format_sig17(m.final_sigma) << ','
                << format_sig17(m.max_abs_ev_tail) << ','
                << format_sig17(m.max_abs_en_tail) << ',' << format_sig17(m.q_final)
                << ',';
            if (m.omega_first_nonpositive_onset) {
                out << format_sig17(*m.omega_first_nonpositive_onset);
            }
            out << '\n';
        } else {
            // Failed cell: status text with commas flattened so the row still
            // has the declared column count.
            std::string status = cell.status;
            for (char& ch : status) {
                if (ch == ',' || ch == '\n') ch = ';';
            }
            out << status << ",,,,,,\n";
        }
    }
}

}  // namespace mlsync
