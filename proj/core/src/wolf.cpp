// Maximal Lyapunov exponent from sampled data following the fixed
// evolution time program of Wolf, Swift, Swinney and Vastano (1985).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "memochaos/chaos.hpp"
#include "memochaos/error.hpp"

namespace memochaos {

namespace {

constexpr std::size_t kMinSamples = 2000;

class PointCloud {
 public:
  PointCloud(std::span<const double> data, std::size_t dim)
      : data_(data), dim_(dim), n_(data.size() / dim) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }
  const double* at(std::size_t i) const noexcept { return data_.data() + i * dim_; }

  double distance(std::size_t i, std::size_t j) const noexcept {
    const double* x = at(i);
    const double* y = at(j);
    double s = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) s += (x[d] - y[d]) * (x[d] - y[d]);
    return std::sqrt(s);
  }

  /// Diagonal of the bounding box.
  double extent() const noexcept {
    double s = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = 0; i < n_; ++i) {
        lo = std::min(lo, at(i)[d]);
        hi = std::max(hi, at(i)[d]);
      }
      s += (hi - lo) * (hi - lo);
    }
    return std::sqrt(s);
  }

 private:
  std::span<const double> data_;
  std::size_t dim_;
  std::size_t n_;
};

bool outside_theiler(std::size_t i, std::size_t j, std::size_t window) {
  return (i > j ? i - j : j - i) > window;
}

// Nearest point to `i` farther than min_dist that can still be evolved.
std::size_t nearest_neighbor(const PointCloud& pc, std::size_t i,
                             std::size_t last_usable, std::size_t theiler,
                             double min_dist) {
  std::size_t best = pc.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= last_usable; ++k) {
    if (!outside_theiler(i, k, theiler)) continue;
    const double d = pc.distance(i, k);
    if (d > min_dist && d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

// Replacement point for the evolved pair (i, j): among admissible points
// within `radius` of i, the one whose separation vector makes the smallest
// angle with x_j - x_i (ties resolved by distance). Returns pc.size() if
// none qualifies within max_angle.
std::size_t aligned_replacement(const PointCloud& pc, std::size_t i,
                                std::size_t j, std::size_t last_usable,
                                std::size_t theiler, double min_dist,
                                double radius, double max_angle) {
  const std::size_t dim = pc.dim();
  const double* xi = pc.at(i);
  const double* xj = pc.at(j);
  const double dij = pc.distance(i, j);
  std::size_t best = pc.size();
  double best_angle = max_angle;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= last_usable; ++k) {
    if (!outside_theiler(i, k, theiler)) continue;
    const double d = pc.distance(i, k);
    if (!(d > min_dist && d < radius)) continue;
    const double* xk = pc.at(k);
    double dot = 0.0;
    for (std::size_t c = 0; c < dim; ++c) dot += (xk[c] - xi[c]) * (xj[c] - xi[c]);
    const double cosine = std::clamp(dot / (d * dij), -1.0, 1.0);
    const double angle = std::acos(cosine);
    if (angle < best_angle || (angle == best_angle && d < best_d)) {
      best_angle = angle;
      best_d = d;
      best = k;
    }
  }
  return best;
}

LyapunovEstimate wolf_on_cloud(const PointCloud& pc, double dtau,
                               const WolfConfig& config) {
  if (pc.size() < kMinSamples) {
    throw TooShort("lyapunov_wolf: need at least " +
                   std::to_string(kMinSamples) + " samples, got " +
                   std::to_string(pc.size()));
  }
  if (!(dtau > 0.0)) throw InvalidArgument("lyapunov_wolf: dtau must be > 0");

  LyapunovEstimate est;
  est.method = LyapunovMethod::wolf;

  const double extent = pc.extent();
  if (extent < 1e-10) {
    est.lambda = kCollapsedLambda;
    est.n_renorms = 1;
    return est;
  }

  const auto evolve = static_cast<std::size_t>(config.evolve_steps);
  const auto theiler = static_cast<std::size_t>(config.theiler);
  const double min_dist = config.min_sep * extent;
  const double max_dist = config.max_sep * extent;
  const std::size_t last_usable = pc.size() - 1 - evolve;

  std::size_t i = 0;
  std::size_t j = nearest_neighbor(pc, i, last_usable, theiler, min_dist);
  if (j == pc.size()) {
    throw NoNeighbor("lyapunov_wolf: no admissible initial neighbour");
  }

  double log_sum = 0.0;
  while (i <= last_usable && j <= last_usable) {
    const double d_before = pc.distance(i, j);
    i += evolve;
    j += evolve;
    const double d_after = pc.distance(i, j);
    if (d_after > 0.0) {
      const double g = std::log(d_after / d_before);
      log_sum += g;
      est.growth_log.push_back(g);
    }
    if (i > last_usable) break;

    if (d_after > max_dist || d_after <= min_dist || j > last_usable) {
      // Widen the search until an aligned point turns up; as a last resort
      // take the nearest admissible point regardless of orientation.
      std::size_t k = pc.size();
      for (double radius = max_dist; radius <= 8.0 * max_dist && k == pc.size();
           radius *= 2.0) {
        k = aligned_replacement(pc, i, j, last_usable, theiler, min_dist,
                                radius, config.max_angle);
      }
      if (k == pc.size()) {
        k = nearest_neighbor(pc, i, last_usable, theiler, min_dist);
      }
      if (k == pc.size()) break;
      j = k;
    }
  }

  est.n_renorms = est.growth_log.size();
  if (est.n_renorms == 0) {
    throw NoNeighbor("lyapunov_wolf: no renormalization interval completed");
  }
  est.lambda = log_sum / (static_cast<double>(est.n_renorms) *
                          static_cast<double>(evolve) * dtau);
  return est;
}

}  // namespace

void WolfConfig::validate() const {
  if (embed_dim < 2) throw InvalidArgument("WolfConfig: embed_dim must be >= 2");
  if (embed_delay < 0) throw InvalidArgument("WolfConfig: embed_delay must be >= 0");
  if (evolve_steps < 1) throw InvalidArgument("WolfConfig: evolve_steps must be >= 1");
  if (theiler < 0) throw InvalidArgument("WolfConfig: theiler must be >= 0");
  if (!(min_sep > 0.0 && min_sep < max_sep && max_sep < 1.0)) {
    throw InvalidArgument("WolfConfig: need 0 < min_sep < max_sep < 1");
  }
  if (!(max_angle > 0.0)) throw InvalidArgument("WolfConfig: max_angle must be > 0");
}

LyapunovEstimate lyapunov_wolf_points(std::span<const double> points,
                                      std::size_t dim, double dtau,
                                      const WolfConfig& config) {
  config.validate();
  if (dim == 0 || points.size() % dim != 0) {
    throw InvalidArgument("lyapunov_wolf_points: size not a multiple of dim");
  }
  return wolf_on_cloud(PointCloud(points, dim), dtau, config);
}

LyapunovEstimate lyapunov_wolf(const ObservableSeries& series,
                               const WolfConfig& config) {
  std::vector<double> flat;
  flat.reserve(series.z.size() * 4);
  for (const auto& z : series.z) flat.insert(flat.end(), z.begin(), z.end());
  return lyapunov_wolf_points(flat, 4, series.dtau(), config);
}

int first_autocorrelation_minimum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 4) return 1;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  if (var <= 0.0) return 1;

  const std::size_t max_lag = n / 4;
  auto acf = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) {
      s += (values[i] - mean) * (values[i + lag] - mean);
    }
    return s / var;
  };
  double prev = acf(0);
  double cur = acf(1);
  int zero_crossing = 0;
  for (std::size_t lag = 1; lag < max_lag; ++lag) {
    const double next = acf(lag + 1);
    if (zero_crossing == 0 && cur <= 0.0) zero_crossing = static_cast<int>(lag);
    if (cur < prev && cur <= next) return static_cast<int>(lag);
    prev = cur;
    cur = next;
  }
  return zero_crossing > 0 ? zero_crossing : 1;
}

LyapunovEstimate lyapunov_wolf_scalar(std::span<const double> values,
                                      double dtau, const WolfConfig& config) {
  config.validate();
  const auto dim = static_cast<std::size_t>(config.embed_dim);
  const auto delay = static_cast<std::size_t>(
      config.embed_delay > 0 ? config.embed_delay
                             : first_autocorrelation_minimum(values));
  const std::size_t span_len = (dim - 1) * delay;
  if (values.size() <= span_len) {
    throw TooShort("lyapunov_wolf_scalar: series shorter than embedding window");
  }
  const std::size_t n = values.size() - span_len;
  std::vector<double> flat;
  flat.reserve(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) flat.push_back(values[i + d * delay]);
  }
  return wolf_on_cloud(PointCloud(flat, dim), dtau, config);
}

}  // namespace memochaos
