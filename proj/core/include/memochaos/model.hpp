#pragma once

// Semi-classical moment model of a driven optomechanical cavity whose optical
// mode is damped by an Ornstein-Uhlenbeck bath. All frequencies and rates are
// expressed in units of the mechanical frequency, and time is the
// dimensionless tau = Omega * t.

#include <array>
#include <complex>

namespace memochaos {

using complex = std::complex<double>;

/// Dimensionless physical configuration.
struct SystemParams {
  double delta = -0.7;    ///< laser detuning
  double pump = 1.25;     ///< pumping parameter P
  double sigma = 0.1;     ///< quantum-classical scaling g0 / kappa
  double kappa = 1.0;     ///< optical damping rate
  double gamma = 10.0;    ///< inverse memory time of the optical bath
  double gamma_m = 1e-3;  ///< mechanical damping

  /// Throws InvalidArgument unless pump >= 0, kappa, gamma, sigma > 0 and
  /// gamma_m >= 0 (all finite). P = 0 is accepted as the undriven case.
  void validate() const;

  /// Optomechanical coupling g0 = sigma * kappa.
  double coupling() const noexcept { return sigma * kappa; }

  /// Laser amplitude recovered from P = 8 alpha_L^2 g0^2. Diagnostic only;
  /// the rescaled dynamics depend on P alone.
  double laser_amplitude() const;
};

/// Memory coefficients f0, f1, f2 of the first-order non-Markovian master
/// equation. Real for the O-U kernel but stored complex, since the moment
/// equations use their conjugates explicitly.
struct MemoryCoefficients {
  complex f0{};
  complex f1{};
  complex f2{};
};

/// The eight stored moments of the rescaled mode operators a1, b1. The
/// remaining moments follow from conjugation, e.g. <a1^dag b1> = conj(abd).
struct MomentState {
  complex a{};    ///< <a1>
  complex b{};    ///< <b1>
  complex na{};   ///< <a1^dag a1>
  complex nb{};   ///< <b1^dag b1>
  complex aa{};   ///< <a1^2>
  complex bb{};   ///< <b1^2>
  complex ab{};   ///< <a1 b1>
  complex abd{};  ///< <a1 b1^dag>

  static constexpr std::size_t kRealDim = 16;

  /// Real embedding (re, im) per field, in declaration order.
  std::array<double, kRealDim> to_real() const noexcept;
  static MomentState from_real(const std::array<double, kRealDim>& v) noexcept;

  bool is_finite() const noexcept;
  /// Largest modulus over all eight fields.
  double max_abs() const noexcept;

  friend bool operator==(const MomentState&, const MomentState&) = default;
};

/// Element-wise complex conjugate of every stored field.
MomentState conj(const MomentState& s) noexcept;

/// O-U bath correlation alpha(t, s) = (kappa gamma / 2) exp(-gamma |t - s|).
double ou_kernel(double t, double s, const SystemParams& params) noexcept;

/// Closed-form memory coefficients at time tau >= 0:
///   f0 = (kappa/2)            * P(1, gamma tau)
///   f1 = (kappa/(2 gamma))    * P(2, gamma tau)
///   f2 = (kappa^2/(4 gamma))  * P(3, gamma tau)
/// where P(n, x) = 1 - exp(-x) sum_{k<n} x^k/k! is the regularized lower
/// incomplete gamma function. Throws InvalidArgument for tau < 0.
MemoryCoefficients memory_coefficients(double tau, const SystemParams& params);

/// The same coefficients by direct numerical integration of the defining
/// kernel integrals (f2 as a genuine nested double integral) using composite
/// Gauss-Legendre rules with about n_points nodes per graded segment (the
/// segments double in length away from the kernel peak). Intended as an
/// oracle for memory_coefficients. Requires n_points >= 16.
MemoryCoefficients memory_coefficients_quadrature(double tau,
                                                  const SystemParams& params,
                                                  int n_points);

/// All moments zero.
constexpr MomentState vacuum_state() noexcept { return MomentState{}; }

/// Right-hand side d/dtau of the closed semi-classical moment system.
/// Throws DivergenceError if any field of the state is non-finite.
MomentState moment_derivatives(double tau, const MomentState& state,
                               const SystemParams& params);

/// As above with the memory coefficients supplied by the caller. Used by the
/// integrator hot loop and by tests that probe limiting coefficient values.
MomentState moment_derivatives(const MomentState& state,
                               const MemoryCoefficients& f,
                               const SystemParams& params) noexcept;

}  // namespace memochaos
