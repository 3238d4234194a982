#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace memochaos {

/// Composite Gauss-Legendre rule: [a, b] is split into equal panels, each
/// integrated with a 16-point Gauss-Legendre formula. The panel count is
/// chosen so that the total number of nodes is at least n_points.
class CompositeGaussLegendre {
 public:
  static constexpr int kOrder = 16;

  explicit CompositeGaussLegendre(int n_points)
      : panels_((n_points + kOrder - 1) / kOrder) {
    if (panels_ < 1) panels_ = 1;
    compute_nodes();
  }

  int panels() const noexcept { return panels_; }

  /// For integrands concentrated near the upper limit with decay length
  /// `scale`: [a, b] is cut at b - scale, b - 2 scale, b - 4 scale, ... and
  /// every piece gets the uniform composite rule.
  template <typename F>
  double integrate_graded(double a, double b, double scale, F&& f) const {
    if (a == b) return 0.0;
    if (!(scale > 0.0) || !(scale < b - a)) return integrate(a, b, f);
    double total = 0.0;
    double hi = b;
    double width = scale;
    while (hi > a) {
      const double lo = std::max(a, hi - width);
      total += integrate(lo, hi, f);
      hi = lo;
      width *= 2.0;
    }
    return total;
  }

  template <typename F>
  double integrate(double a, double b, F&& f) const {
    if (a == b) return 0.0;
    const double width = (b - a) / panels_;
    double total = 0.0;
    for (int p = 0; p < panels_; ++p) {
      const double lo = a + p * width;
      const double mid = lo + 0.5 * width;
      double panel = 0.0;
      for (int i = 0; i < kOrder; ++i) {
        panel += weights_[i] * f(mid + 0.5 * width * nodes_[i]);
      }
      total += 0.5 * width * panel;
    }
    return total;
  }

 private:
  // Roots of P_16 by Newton iteration from the Chebyshev-like initial guess.
  void compute_nodes() {
    constexpr int n = kOrder;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes_[i] = x;
      weights_[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  int panels_;
  std::array<double, kOrder> nodes_{};
  std::array<double, kOrder> weights_{};
};

}  // namespace memochaos
