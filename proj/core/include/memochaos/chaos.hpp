#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "memochaos/integrate.hpp"
#include "memochaos/model.hpp"

namespace memochaos {

/// Default classification threshold on the maximal Lyapunov exponent (per
/// unit tau). Finite-time estimates of periodic orbits scatter around zero.
inline constexpr double kChaosThreshold = 0.005;

/// Lambda reported by Wolf's method when the attractor has collapsed to a
/// point (extent below 1e-10).
inline constexpr double kCollapsedLambda = -1e3;

/// (Z1, Z2, Z3, Z4) = (Re<a1>, Im<a1>, Re<b1>, Im<b1>) after the transient.
struct ObservableSeries {
  std::vector<double> taus;
  std::vector<std::array<double, 4>> z;

  std::size_t size() const noexcept { return taus.size(); }
  double dtau() const noexcept { return taus.size() > 1 ? taus[1] - taus[0] : 0.0; }
};

struct WolfConfig {
  /// Embedding dimension for the scalar delay-reconstruction mode. The
  /// native mode always uses the four observables directly.
  int embed_dim = 4;
  /// Delay in samples for the scalar mode; 0 selects the first minimum of
  /// the autocorrelation function.
  int embed_delay = 0;
  /// Samples evolved between renormalizations.
  int evolve_steps = 20;
  /// Smallest admissible neighbour distance, as a fraction of the extent.
  double min_sep = 1e-4;
  /// Separation (fraction of extent) that triggers replacement. Larger
  /// values let pairs leave the linear regime and bias lambda low.
  double max_sep = 0.02;
  /// Temporal exclusion window in samples.
  int theiler = 50;
  /// Largest acceptable angle (radians) between old and replacement
  /// separation vectors before the search radius is widened.
  double max_angle = 0.3;

  void validate() const;
};

enum class LyapunovMethod { wolf, benettin };

std::string_view to_string(LyapunovMethod method) noexcept;

struct LyapunovEstimate {
  double lambda = 0.0;
  LyapunovMethod method = LyapunovMethod::wolf;
  std::size_t n_renorms = 0;
  /// log(d_after / d_before) of every renormalization interval.
  std::vector<double> growth_log;
};

struct BenettinConfig {
  double d0 = 1e-8;
  double renorm_dtau = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Steady-state local maxima of Re<b1> for one detuning.
struct BifurcationSample {
  double delta = 0.0;
  std::vector<double> peak_values;
};

/// Drops samples with tau < transient and maps each state to (Z1..Z4).
/// Throws EmptyWindow when nothing remains.
ObservableSeries observables(const Trajectory& trajectory, double transient);

/// Wolf fixed-evolution-time estimate on the native four-vector series.
/// Throws TooShort below 2000 samples and NoNeighbor if no admissible
/// initial neighbour exists. Returns kCollapsedLambda for a point attractor.
LyapunovEstimate lyapunov_wolf(const ObservableSeries& series,
                               const WolfConfig& config = {});

/// Wolf estimate on a scalar series reconstructed with delay coordinates
/// (embed_dim, embed_delay) from the config.
LyapunovEstimate lyapunov_wolf_scalar(std::span<const double> values,
                                      double dtau,
                                      const WolfConfig& config = {});

/// Wolf estimate on an arbitrary point cloud stored row-major with `dim`
/// coordinates per sample.
LyapunovEstimate lyapunov_wolf_points(std::span<const double> points,
                                      std::size_t dim, double dtau,
                                      const WolfConfig& config = {});

/// Lag (in samples, >= 1) of the first local minimum of the sample
/// autocorrelation; falls back to the first zero crossing, then to 1.
int first_autocorrelation_minimum(std::span<const double> values);

/// Two-trajectory estimate: a fiducial and a perturbed copy (separation d0
/// in the 16-dimensional real embedding, random direction from `seed`,
/// restricted to real <a1^dag a1>, <b1^dag b1>) are integrated together;
/// after config.t_transient the separation is measured and rescaled to d0
/// every renorm_dtau until config.t_end.
LyapunovEstimate lyapunov_benettin(const SystemParams& params,
                                   const MomentState& initial,
                                   const IntegratorConfig& config,
                                   const BenettinConfig& benettin = {});

/// Strictly greater than threshold.
bool is_chaotic(const LyapunovEstimate& estimate,
                double threshold = kChaosThreshold);

/// Local maxima of Z3 = Re<b1> for tau >= transient by strict 3-point
/// comparison refined with a parabola through the neighbours. If the
/// window's peak-to-peak range is below peak_tol (a fixed point) the single
/// final value is returned instead. Throws EmptyWindow.
BifurcationSample bifurcation_points(const Trajectory& trajectory,
                                     double transient, double peak_tol);

/// Groups sorted values whose gaps are at most tol; returns cluster means.
std::vector<double> cluster_values(std::vector<double> values, double tol);

}  // namespace memochaos
