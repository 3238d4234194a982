#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "memochaos/integrate.hpp"
#include "memochaos/model.hpp"

namespace memochaos {

/// Instantaneous negativity N(tau) >= 0 on a uniform grid.
struct EntanglementSeries {
  std::vector<double> taus;
  std::vector<double> n_values;

  std::size_t size() const noexcept { return taus.size(); }
};

struct EntanglementSummary {
  double en = 0.0;                      ///< time-averaged negativity
  std::pair<double, double> window{};   ///< averaging interval
};

/// Higher-order NPT minor
///   | 1                  <a1 b1^dag>          |
///   | <a1^dag b1>        <a1^dag a1 b1^dag b1> |
/// with the fourth moment factorized as <a1^dag a1><b1^dag b1>, i.e.
/// Re(na) Re(nb) - |abd|^2. Negative values certify entanglement.
double d_ho(const MomentState& state) noexcept;

/// max(0, -d_ho(state)).
double npt(const MomentState& state) noexcept;

/// npt of every sample with tau >= transient. Throws EmptyWindow.
EntanglementSeries entanglement_series(const Trajectory& trajectory,
                                       double transient);

/// Trapezoidal time average over the whole series. A single sample
/// averages to itself. Throws EmptyWindow on an empty series.
EntanglementSummary average_npt(const EntanglementSeries& series);

/// Trapezoidal average restricted to samples with tau in [t0, t1].
EntanglementSummary average_npt(const EntanglementSeries& series, double t0,
                                double t1);

/// Stationarity check of the long-time average: compares the average over
/// the first half of the window with the full-window average. Returns true
/// when they differ by more than rel_tol (relative to the larger, with an
/// absolute floor so identically-zero series pass).
bool average_not_stationary(const EntanglementSeries& series,
                            double rel_tol = 0.1);

/// CSV "tau,npt" with %.16e values.
void write_npt_csv(std::ostream& out, const EntanglementSeries& series);

}  // namespace memochaos
