#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "scer/campaign.hpp"

namespace scer {

inline constexpr const char* kPdCurveHeader = "detector,n_b,pd,ci_low,ci_high,trials";
inline constexpr const char* kRequiredHeader = "case_id,detector,n_b_required,target_pd,grid_resolution";

namespace detail {
inline std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
}  // namespace detail

/// One row per (detector, N_b), detector-major.
inline void write_pd_curve_csv(std::ostream& out, const PdCurve& curve) {
  out << kPdCurveHeader << "\n";
  for (auto d : kAllDetectors) {
    for (std::size_t i = 0; i < curve.n_b.size(); ++i) {
      const auto& e = curve.pd[i][static_cast<std::size_t>(d)];
      out << detector_name(d) << ',' << curve.n_b[i] << ',' << detail::fixed6(e.rate) << ','
          << detail::fixed6(e.ci.low) << ',' << detail::fixed6(e.ci.high) << ',' << e.trials << "\n";
    }
  }
}

inline void write_required_header(std::ostream& out) { out << kRequiredHeader << "\n"; }

inline void write_required_row(std::ostream& out, const std::string& case_id, const RequiredSymbols& r) {
  out << case_id << ',' << detector_name(r.detector) << ','
      << (r.n_b ? std::to_string(*r.n_b) : std::string("not_reached")) << ',' << detail::fixed6(r.target_pd) << ','
      << r.grid_resolution << "\n";
}

/// gnuplot script plotting a pd-curve CSV.
inline void write_gnuplot_script(std::ostream& out, const std::string& csv_path, double target_pd = 0.9) {
  out << "set datafile separator ','\n"
      << "set key bottom right\n"
      << "set xlabel 'Number of unpredictable symbols'\n"
      << "set ylabel 'Detection probability'\n"
      << "set yrange [0:1]\n"
      << "set grid\n"
      << "plot ";
  for (auto d : kAllDetectors) {
    out << "'" << csv_path << "' using 2:(strcol(1) eq '" << detector_name(d) << "' ? $3 : NaN) with linespoints title '"
        << detector_name(d) << "', ";
  }
  out << target_pd << " with lines dashtype 2 notitle\n";
}

}  // namespace scer
