#include "memochaos/entangle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "memochaos/error.hpp"
#include "memochaos/format.hpp"

namespace memochaos {

double d_ho(const MomentState& s) noexcept {
  return s.na.real() * s.nb.real() - std::norm(s.abd);
}

double npt(const MomentState& s) noexcept { return std::max(0.0, -d_ho(s)); }

EntanglementSeries entanglement_series(const Trajectory& trajectory,
                                       double transient) {
  EntanglementSeries out;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (trajectory.taus[i] < transient) continue;
    out.taus.push_back(trajectory.taus[i]);
    out.n_values.push_back(npt(trajectory.states[i]));
  }
  if (out.taus.empty()) {
    throw EmptyWindow("entanglement_series: no samples after transient");
  }
  return out;
}

EntanglementSummary average_npt(const EntanglementSeries& series, double t0,
                                double t1) {
  double integral = 0.0;
  double first = 0.0, last = 0.0, only = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.taus[i];
    if (t < t0 || t > t1) continue;
    if (count == 0) {
      first = t;
      only = series.n_values[i];
    } else {
      integral += 0.5 * (series.n_values[i] + series.n_values[i - 1]) *
                  (t - series.taus[i - 1]);
    }
    last = t;
    ++count;
  }
  if (count == 0) throw EmptyWindow("average_npt: empty series");
  EntanglementSummary summary;
  summary.window = {first, last};
  summary.en = count == 1 ? only : integral / (last - first);
  // The trapezoid average of non-negative samples is non-negative up to
  // rounding; clamp so the invariant holds exactly.
  summary.en = std::max(0.0, summary.en);
  return summary;
}

EntanglementSummary average_npt(const EntanglementSeries& series) {
  if (series.size() == 0) throw EmptyWindow("average_npt: empty series");
  return average_npt(series, series.taus.front(), series.taus.back());
}

bool average_not_stationary(const EntanglementSeries& series, double rel_tol) {
  if (series.size() < 4) return false;
  const double t0 = series.taus.front();
  const double t1 = series.taus.back();
  const double full = average_npt(series, t0, t1).en;
  const double half = average_npt(series, t0, 0.5 * (t0 + t1)).en;
  const double scale = std::max({std::abs(full), std::abs(half), 1e-12});
  return std::abs(full - half) > rel_tol * scale;
}

void write_npt_csv(std::ostream& out, const EntanglementSeries& series) {
  out << "tau,npt\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_sci(series.taus[i]) << ',' << format_sci(series.n_values[i])
        << '\n';
  }
}

}  // namespace memochaos
