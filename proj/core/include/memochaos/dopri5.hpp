#pragma once

// Explicit embedded Runge-Kutta 5(4) of Dormand and Prince with the
// fourth-order continuous extension of Hairer, Norsett and Wanner, for
// fixed-size real state vectors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "memochaos/error.hpp"

namespace memochaos {

struct StepControl {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double max_step = 0.05;
  /// First trial step; <= 0 selects min(max_step, 1e-3).
  double initial_step = 0.0;
};

struct StepStatistics {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

template <std::size_t N>
class DormandPrince5 {
 public:
  using State = std::array<double, N>;

  explicit DormandPrince5(StepControl control = {}) : control_(control) {
    step_ = control_.initial_step > 0.0
                ? std::min(control_.initial_step, control_.max_step)
                : std::min(control_.max_step, 1e-3);
  }

  /// Proposed size of the next step (carried across integrate calls).
  double next_step() const noexcept { return step_; }
  const StepStatistics& statistics() const noexcept { return stats_; }

  /// One step of size h from (t, y). Writes the fifth-order solution to
  /// y_out and returns the scaled RMS error estimate (accept when <= 1).
  /// Used directly for fixed-step convergence studies.
  template <typename Rhs>
  double step(Rhs& rhs, double t, const State& y, double h, State& y_out) {
    State k1;
    rhs(t, y, k1);
    ++stats_.rhs_evaluations;
    return attempt(rhs, t, y, k1, h, y_out);
  }

  /// Integrates from t0 over n_intervals sample intervals of width dt,
  /// calling observer(k, t_k, y_k) for k = 0..n_intervals. Sample times are
  /// t0 + k*dt, reached by dense output. guard(t, y) is called after each
  /// accepted step and must throw to abort. On return y holds the state at
  /// the final sample time.
  template <typename Rhs, typename Observer, typename Guard>
  void integrate_uniform(Rhs& rhs, State& y, double t0, double dt,
                         std::size_t n_intervals, Observer&& observer,
                         Guard&& guard) {
    observer(std::size_t{0}, t0, static_cast<const State&>(y));
    if (n_intervals == 0) return;

    const double t_end = t0 + static_cast<double>(n_intervals) * dt;
    std::size_t next_sample = 1;
    double t = t0;
    State k1;
    rhs(t, y, k1);
    ++stats_.rhs_evaluations;
    double err_old = 1e-4;
    bool last_rejected = false;

    while (next_sample <= n_intervals) {
      double h = std::min(step_, control_.max_step);
      bool final_step = false;
      if (t + h >= t_end || t_end - (t + h) < 1e-12 * std::abs(t_end)) {
        h = t_end - t;
        final_step = true;
      }
      if (!(h > std::abs(t) * 1e-14) && !final_step) {
        throw DivergenceError(t, "step size underflow at tau=" +
                                     std::to_string(t));
      }

      State y_new;
      const double err = attempt(rhs, t, y, k1, h, y_new);

      if (!std::isfinite(err)) {
        ++stats_.rejected;
        step_ = 0.1 * h;
        last_rejected = true;
        if (step_ < 1e-14 * std::max(1.0, std::abs(t))) {
          throw DivergenceError(t, "non-finite derivative at tau=" +
                                       std::to_string(t));
        }
        continue;
      }

      if (err <= 1.0) {
        ++stats_.accepted;
        // PI step-size controller (alpha = 0.2 - 0.75 beta, beta = 0.04).
        const double e = std::max(err, 1e-10);
        double fac = std::pow(e, 0.17) * std::pow(err_old, -0.04) / 0.9;
        fac = std::clamp(fac, 0.1, 5.0);
        double h_new = h / fac;
        if (last_rejected) h_new = std::min(h_new, h);
        err_old = std::max(err, 1e-4);
        last_rejected = false;

        const double t_new = final_step ? t_end : t + h;
        // Emit every sample that falls inside (t, t_new].
        while (next_sample <= n_intervals) {
          const double ts = t0 + static_cast<double>(next_sample) * dt;
          if (ts > t_new && !(final_step && next_sample == n_intervals)) break;
          if (final_step && next_sample == n_intervals) {
            observer(next_sample, ts, static_cast<const State&>(y_new));
          } else {
            const double theta = (ts - t) / h;
            observer(next_sample, ts, dense(theta, h));
          }
          ++next_sample;
        }

        t = t_new;
        y = y_new;
        k1 = k7_;
        guard(t, static_cast<const State&>(y));
        if (!final_step) step_ = std::min(h_new, control_.max_step);
      } else {
        ++stats_.rejected;
        const double fac = std::min(5.0, std::pow(err, 0.2) / 0.9);
        step_ = h / std::max(fac, 1.0 + 1e-3);
        last_rejected = true;
      }
    }
  }

 private:
  template <typename Rhs>
  double attempt(Rhs& rhs, double t, const State& y, const State& k1,
                 double h, State& y_new) {
    constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                     c5 = 8.0 / 9.0;
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                     a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                     a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                     a65 = -5103.0 / 18656.0;
    constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                     a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                     a76 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                     e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                     e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    State tmp, k2, k3, k4, k5, k6;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                           a54 * k4[i]);
    rhs(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                           a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, tmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      y_new[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                             a75 * k5[i] + a76 * k6[i]);
    rhs(t + h, y_new, k7_);
    stats_.rhs_evaluations += 6;

    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                            e5 * k5[i] + e6 * k6[i] + e7 * k7_[i]);
      const double scale =
          control_.abs_tol +
          control_.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      sum += (e / scale) * (e / scale);
    }

    // Dense-output coefficients for this step.
    constexpr double d1 = -12715105075.0 / 11282082432.0,
                     d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0,
                     d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0,
                     d7 = 69997945.0 / 29380423.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double diff = y_new[i] - y[i];
      const double bspl = h * k1[i] - diff;
      r1_[i] = y[i];
      r2_[i] = diff;
      r3_[i] = bspl;
      r4_[i] = diff - h * k7_[i] - bspl;
      r5_[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                    d6 * k6[i] + d7 * k7_[i]);
    }
    return std::sqrt(sum / static_cast<double>(N));
  }

  State dense(double theta, double /*h*/) const {
    const double one_minus = 1.0 - theta;
    State out;
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = r1_[i] +
               theta * (r2_[i] +
                        one_minus * (r3_[i] +
                                     theta * (r4_[i] + one_minus * r5_[i])));
    }
    return out;
  }

  StepControl control_;
  double step_;
  StepStatistics stats_;
  State k7_{};
  State r1_{}, r2_{}, r3_{}, r4_{}, r5_{};
};

}  // namespace memochaos
