#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "memochaos/model.hpp"

namespace memochaos {

/// Field magnitude above which a trajectory is declared divergent.
inline constexpr double kDivergenceBound = 1e12;

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double max_step = 0.05;
  double sample_dtau = 0.05;
  double t_end = 3000.0;
  /// Initial window discarded by the downstream analyses.
  double t_transient = 1000.0;

  /// Throws InvalidArgument unless every field is positive and finite,
  /// t_transient < t_end and sample_dtau <= 10 * max_step.
  void validate() const;

  /// Number of sample intervals covering [0, t_end].
  std::size_t sample_intervals() const;
};

/// Uniformly sampled solution of the moment system.
struct Trajectory {
  std::vector<double> taus;
  std::vector<MomentState> states;
  SystemParams params;

  std::size_t size() const noexcept { return taus.size(); }
  bool empty() const noexcept { return taus.empty(); }
  double sample_dtau() const noexcept {
    return taus.size() > 1 ? taus[1] - taus[0] : 0.0;
  }
};

/// Integrates the moment system from tau = 0 to config.t_end with adaptive
/// Dormand-Prince 5(4) steps and dense output on the uniform sample grid.
/// Memory coefficients are evaluated at every stage time.
/// Throws InvalidArgument for a bad config or non-finite initial state and
/// DivergenceError if any field becomes non-finite or exceeds
/// kDivergenceBound.
Trajectory integrate(const SystemParams& params, const MomentState& initial,
                     const IntegratorConfig& config);

/// Continues a trajectory by extra_time from its last sample, keeping the
/// sample spacing of config. Memory coefficients continue from the absolute
/// tau of the last sample. Returns the concatenated trajectory.
Trajectory resume(const Trajectory& trajectory, double extra_time,
                  const IntegratorConfig& config);

/// Same as integrate but starting at tau0 instead of 0, over n_intervals
/// samples of width dtau. Building block shared by integrate and resume.
Trajectory integrate_from(const SystemParams& params, const MomentState& initial,
                          double tau0, std::size_t n_intervals, double dtau,
                          const IntegratorConfig& config);

/// CSV with header
/// tau,re_a,im_a,re_b,im_b,re_na,im_na,re_nb,im_nb,re_aa,im_aa,re_bb,im_bb,re_ab,im_ab,re_abd,im_abd
/// and every value in %.16e.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace memochaos
