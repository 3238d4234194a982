#include "memochaos/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "memochaos/error.hpp"
#include "memochaos/quadrature.hpp"

namespace memochaos {

namespace {

bool finite(double x) { return std::isfinite(x); }

// Regularized lower incomplete gamma P(n, x) for small integer n and x >= 0.
// For small x the direct form 1 - e^{-x} sum_{k<n} x^k/k! cancels badly, so
// the tail sum e^{-x} sum_{k>=n} x^k/k! is used instead.
double lower_gamma_regularized(int n, double x) {
  if (x <= 0.0) return 0.0;
  if (x < 2.0) {
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= x / k;
    double sum = 0.0;
    for (int k = n; k < 200; ++k) {
      sum += term;
      term *= x / (k + 1);
      if (term < sum * 1e-18) break;
    }
    return std::exp(-x) * sum;
  }
  double partial = 0.0;
  double term = 1.0;
  for (int k = 0; k < n; ++k) {
    partial += term;
    term *= x / (k + 1);
  }
  return 1.0 - std::exp(-x) * partial;
}

}  // namespace

void SystemParams::validate() const {
  const auto fail = [](const std::string& what) {
    throw InvalidArgument("SystemParams: " + what);
  };
  if (!finite(delta)) fail("delta must be finite");
  if (!finite(pump) || pump < 0.0) fail("pump must be finite and >= 0");
  if (!finite(sigma) || sigma <= 0.0) fail("sigma must be > 0");
  if (!finite(kappa) || kappa <= 0.0) fail("kappa must be > 0");
  if (!finite(gamma) || gamma <= 0.0) fail("gamma must be > 0");
  if (!finite(gamma_m) || gamma_m < 0.0) fail("gamma_m must be >= 0");
}

double SystemParams::laser_amplitude() const {
  const double g0 = coupling();
  return std::sqrt(pump / (8.0 * g0 * g0));
}

std::array<double, MomentState::kRealDim> MomentState::to_real() const noexcept {
  return {a.real(),  a.imag(),  b.real(),  b.imag(),  na.real(), na.imag(),
          nb.real(), nb.imag(), aa.real(), aa.imag(), bb.real(), bb.imag(),
          ab.real(), ab.imag(), abd.real(), abd.imag()};
}

MomentState MomentState::from_real(
    const std::array<double, kRealDim>& v) noexcept {
  return {{v[0], v[1]},   {v[2], v[3]},   {v[4], v[5]},   {v[6], v[7]},
          {v[8], v[9]},   {v[10], v[11]}, {v[12], v[13]}, {v[14], v[15]}};
}

bool MomentState::is_finite() const noexcept {
  const auto r = to_real();
  return std::all_of(r.begin(), r.end(), [](double x) { return finite(x); });
}

double MomentState::max_abs() const noexcept {
  return std::max({std::abs(a), std::abs(b), std::abs(na), std::abs(nb),
                   std::abs(aa), std::abs(bb), std::abs(ab), std::abs(abd)});
}

MomentState conj(const MomentState& s) noexcept {
  return {std::conj(s.a),  std::conj(s.b),  std::conj(s.na),
          std::conj(s.nb), std::conj(s.aa), std::conj(s.bb),
          std::conj(s.ab), std::conj(s.abd)};
}

double ou_kernel(double t, double s, const SystemParams& params) noexcept {
  return 0.5 * params.kappa * params.gamma *
         std::exp(-params.gamma * std::abs(t - s));
}

MemoryCoefficients memory_coefficients(double tau,
                                       const SystemParams& params) {
  if (!(tau >= 0.0)) {
    throw InvalidArgument("memory_coefficients: tau must be >= 0");
  }
  const double k = params.kappa;
  const double g = params.gamma;
  const double x = g * tau;
  return {0.5 * k * lower_gamma_regularized(1, x),
          0.5 * k / g * lower_gamma_regularized(2, x),
          0.25 * k * k / g * lower_gamma_regularized(3, x)};
}

MemoryCoefficients memory_coefficients_quadrature(double tau,
                                                  const SystemParams& params,
                                                  int n_points) {
  if (!(tau >= 0.0)) {
    throw InvalidArgument("memory_coefficients_quadrature: tau must be >= 0");
  }
  if (n_points < 16) {
    throw InvalidArgument("memory_coefficients_quadrature: n_points < 16");
  }
  if (tau == 0.0) return {};

  const CompositeGaussLegendre rule(n_points);
  const auto alpha = [&](double t, double s) { return ou_kernel(t, s, params); };

  // The kernel decays over 1/gamma away from the upper limit.
  const double scale = 1.0 / params.gamma;
  const double f0 =
      rule.integrate_graded(0.0, tau, scale, [&](double s) { return alpha(tau, s); });
  const double f1 = rule.integrate_graded(
      0.0, tau, scale, [&](double s) { return alpha(tau, s) * (tau - s); });
  const double f2 = rule.integrate_graded(0.0, tau, scale, [&](double s) {
    const double inner =
        rule.integrate_graded(0.0, s, scale, [&](double u) { return alpha(s, u); });
    return alpha(tau, s) * (tau - s) * inner;
  });
  return {f0, f1, f2};
}

MomentState moment_derivatives(const MomentState& s,
                               const MemoryCoefficients& f,
                               const SystemParams& p) noexcept {
  constexpr complex I{0.0, 1.0};
  const complex f0 = f.f0;
  const complex f1 = f.f1;
  const complex f2 = f.f2;
  const complex f0c = std::conj(f0);
  const complex f1c = std::conj(f1);
  const complex f2c = std::conj(f2);

  const complex ac = std::conj(s.a);
  const complex bc = std::conj(s.b);
  const complex bbc = std::conj(s.bb);

  const double d = p.delta;
  const double P2 = 0.5 * p.pump;
  const double G = p.gamma_m;
  const double g0 = p.coupling();
  const double g02 = g0 * g0;

  const complex drive_scale = 1.0 + f1;
  const complex optical_loss = f0c + f2;
  // -Delta + <b1^dag> + <b1>: effective detuning shifted by the cantilever.
  const complex shift = -d + bc + s.b;

  MomentState out;
  out.a = -I * drive_scale * (s.ab + s.abd - d * s.a + 0.5) - optical_loss * s.a;

  out.b = -I * (P2 * s.na + s.b) - 0.5 * G * s.b;

  out.na = -0.5 * I * (ac - s.a) - (f0 + f0c + f2 + f2c) * s.na +
           I * (f1c - f1) * shift * s.na + 0.5 * I * (f1c * s.a - f1 * ac);

  out.nb = -I * P2 * s.na * (bc - s.b) - G * s.nb;

  out.aa = -2.0 * I * drive_scale * (shift * s.aa + 0.5 * s.a) -
           2.0 * optical_loss * s.aa;

  out.bb = -2.0 * I * (P2 * s.na * s.b + s.bb) - G * s.bb;

  out.ab = -I * drive_scale * ((s.bb + s.nb) * s.a - d * s.ab + 0.5 * s.b) -
           I * (s.ab + P2 * s.na * s.a + g02 * s.a) - optical_loss * s.ab;

  // The g0^2 <a1> term appears in both brackets with opposite signs; kept
  // exactly as in the published equation set.
  out.abd = -I * drive_scale *
                ((bbc + s.nb) * s.a + g02 * s.a - d * s.abd + 0.5 * bc) +
            I * (s.abd + P2 * s.na * s.a + g02 * s.a) - optical_loss * s.abd;
  return out;
}

MomentState moment_derivatives(double tau, const MomentState& state,
                               const SystemParams& params) {
  if (!state.is_finite()) {
    throw DivergenceError(tau, "moment_derivatives: non-finite state at tau=" +
                                   std::to_string(tau));
  }
  return moment_derivatives(state, memory_coefficients(tau, params), params);
}

}  // namespace memochaos
