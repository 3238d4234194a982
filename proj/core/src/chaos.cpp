#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "memochaos/chaos.hpp"
#include "memochaos/dopri5.hpp"
#include "memochaos/error.hpp"

namespace memochaos {

namespace {

constexpr std::size_t kDim = MomentState::kRealDim;
using RealState = std::array<double, kDim>;
using PairState = std::array<double, 2 * kDim>;

// Indices of Im<a1^dag a1> and Im<b1^dag b1> in the real embedding.
constexpr std::size_t kImNa = 5;
constexpr std::size_t kImNb = 7;

double separation(const PairState& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < kDim; ++i) {
    const double d = y[kDim + i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

RealState random_direction(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RealState u{};
  double norm = 0.0;
  while (norm == 0.0) {
    for (auto& x : u) x = normal(rng);
    u[kImNa] = 0.0;
    u[kImNb] = 0.0;
    norm = 0.0;
    for (double x : u) norm += x * x;
    norm = std::sqrt(norm);
  }
  for (auto& x : u) x /= norm;
  return u;
}

}  // namespace

std::string_view to_string(LyapunovMethod method) noexcept {
  return method == LyapunovMethod::wolf ? "wolf" : "benettin";
}

void BenettinConfig::validate() const {
  if (!(d0 >= 1e-10 && d0 <= 1e-6)) {
    throw InvalidArgument("BenettinConfig: d0 must lie in [1e-10, 1e-6]");
  }
  if (!(renorm_dtau > 0.0) || !std::isfinite(renorm_dtau)) {
    throw InvalidArgument("BenettinConfig: renorm_dtau must be > 0");
  }
}

ObservableSeries observables(const Trajectory& trajectory, double transient) {
  ObservableSeries out;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (trajectory.taus[i] < transient) continue;
    const MomentState& s = trajectory.states[i];
    out.taus.push_back(trajectory.taus[i]);
    out.z.push_back({s.a.real(), s.a.imag(), s.b.real(), s.b.imag()});
  }
  if (out.taus.empty()) {
    throw EmptyWindow("observables: no samples after transient " +
                      std::to_string(transient));
  }
  return out;
}

LyapunovEstimate lyapunov_benettin(const SystemParams& params,
                                   const MomentState& initial,
                                   const IntegratorConfig& config,
                                   const BenettinConfig& benettin) {
  config.validate();
  benettin.validate();
  params.validate();

  // Fiducial run through the transient.
  const auto transient_steps = static_cast<std::size_t>(
      std::floor(config.t_transient / config.sample_dtau + 1e-9));
  Trajectory warm = integrate_from(params, initial, 0.0, transient_steps,
                                   config.sample_dtau, config);
  const double tau0 = warm.taus.back();
  const RealState base = warm.states.back().to_real();

  const RealState dir = random_direction(benettin.seed);
  PairState y{};
  for (std::size_t i = 0; i < kDim; ++i) {
    y[i] = base[i];
    y[kDim + i] = base[i] + benettin.d0 * dir[i];
  }

  auto rhs = [&params](double t, const PairState& in, PairState& out) {
    const MemoryCoefficients f = memory_coefficients(t, params);
    RealState half;
    std::copy_n(in.begin(), kDim, half.begin());
    const RealState d1 =
        moment_derivatives(MomentState::from_real(half), f, params).to_real();
    std::copy_n(in.begin() + kDim, kDim, half.begin());
    const RealState d2 =
        moment_derivatives(MomentState::from_real(half), f, params).to_real();
    std::copy(d1.begin(), d1.end(), out.begin());
    std::copy(d2.begin(), d2.end(), out.begin() + kDim);
  };
  auto guard = [](double t, const PairState& s) {
    for (std::size_t i = 0; i < s.size(); i += 2) {
      const double m = std::hypot(s[i], s[i + 1]);
      if (!std::isfinite(m) || m > kDivergenceBound) {
        throw DivergenceError(t, "benettin: trajectory diverged at tau=" +
                                     std::to_string(t));
      }
    }
  };
  auto ignore = [](std::size_t, double, const PairState&) {};

  const auto n_renorm = static_cast<std::size_t>(
      std::floor((config.t_end - tau0) / benettin.renorm_dtau + 1e-9));
  if (n_renorm == 0) {
    throw TooShort("lyapunov_benettin: no renormalization interval fits");
  }

  DormandPrince5<2 * kDim> stepper(
      {config.rel_tol, config.abs_tol, config.max_step, 0.0});
  LyapunovEstimate est;
  est.method = LyapunovMethod::benettin;
  est.growth_log.reserve(n_renorm);
  double log_sum = 0.0;
  for (std::size_t k = 0; k < n_renorm; ++k) {
    const double t = tau0 + static_cast<double>(k) * benettin.renorm_dtau;
    stepper.integrate_uniform(rhs, y, t, benettin.renorm_dtau, 1, ignore, guard);
    const double d = separation(y);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw DivergenceError(t + benettin.renorm_dtau,
                            "benettin: degenerate separation");
    }
    const double g = std::log(d / benettin.d0);
    log_sum += g;
    est.growth_log.push_back(g);
    const double scale = benettin.d0 / d;
    for (std::size_t i = 0; i < kDim; ++i) {
      y[kDim + i] = y[i] + (y[kDim + i] - y[i]) * scale;
    }
  }
  est.n_renorms = n_renorm;
  est.lambda = log_sum / (static_cast<double>(n_renorm) * benettin.renorm_dtau);
  return est;
}

bool is_chaotic(const LyapunovEstimate& estimate, double threshold) {
  return estimate.lambda > threshold;
}

BifurcationSample bifurcation_points(const Trajectory& trajectory,
                                     double transient, double peak_tol) {
  BifurcationSample out;
  out.delta = trajectory.params.delta;

  std::vector<double> z3;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (trajectory.taus[i] >= transient) {
      z3.push_back(trajectory.states[i].b.real());
    }
  }
  if (z3.empty()) {
    throw EmptyWindow("bifurcation_points: no samples after transient");
  }

  const auto [lo, hi] = std::minmax_element(z3.begin(), z3.end());
  if (*hi - *lo < peak_tol || z3.size() < 3) {
    out.peak_values.push_back(z3.back());
    return out;
  }

  for (std::size_t i = 1; i + 1 < z3.size(); ++i) {
    const double l = z3[i - 1], c = z3[i], r = z3[i + 1];
    if (!(c > l && c > r)) continue;
    const double curvature = l - 2.0 * c + r;
    double peak = c;
    if (curvature < 0.0) peak = c - (r - l) * (r - l) / (8.0 * curvature);
    out.peak_values.push_back(peak);
  }
  if (out.peak_values.empty()) out.peak_values.push_back(z3.back());
  return out;
}

std::vector<double> cluster_values(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<double> centers;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    if (i == values.size() || values[i] - values[i - 1] > tol) {
      double sum = 0.0;
      for (std::size_t k = start; k < i; ++k) sum += values[k];
      if (i > start) centers.push_back(sum / static_cast<double>(i - start));
      start = i;
    }
  }
  return centers;
}

}  // namespace memochaos
