#pragma once

// Numeric text formatting and the CSV writers.  CSV dialect: comma
// separator, '.' decimal point, Unix newlines, mandatory header row; every
// numeric value carries 17 significant digits so it round-trips to the
// exact double that was computed.

#include <iosfwd>
#include <string>

#include "mlsync/ode.hpp"
#include "mlsync/scenario.hpp"

namespace mlsync {

// 17-significant-digit decimal form (round-trip exact, deterministic).
[[nodiscard]] std::string format_sig17(double x);

// Shortest round-trip form, for human-facing listings and messages.
[[nodiscard]] std::string format_shortest(double x);

// Header "t,V1,N1"; one row per recorded sample.
void write_single_csv(std::ostream& out, const Trajectory& trajectory);

// Header "t,V1,N1,V2,N2,sigma,e_V,e_N,Q,omega"; trajectory and series must
// be sample-aligned (as produced by run_coupled).
void write_coupled_csv(std::ostream& out, const Trajectory& trajectory,
                       const CoupledSeries& series);

// Header "<axis paths...>,status,sync_time,final_sigma,max_abs_ev_tail,
// max_abs_en_tail,q_final,omega_first_nonpositive_onset"; absent optional
// metrics serialize as empty fields.
void write_sweep_csv(std::ostream& out, const SweepTable& table);

}  // namespace mlsync
