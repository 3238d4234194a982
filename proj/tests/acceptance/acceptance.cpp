// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
// followed by indented detail lines; exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "memochaos/chaos.hpp"
#include "memochaos/entangle.hpp"
#include "memochaos/error.hpp"
#include "memochaos/format.hpp"
#include "memochaos/integrate.hpp"
#include "memochaos/model.hpp"
#include "memochaos/sweep.hpp"

using namespace memochaos;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int workers() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct Report {
  int passed = 0;
  int failed = 0;

  void line(bool ok, const std::string& name, const std::string& summary,
            const std::vector<std::string>& details = {}) {
    std::printf("%s  %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), summary.c_str());
    for (const auto& d : details) std::printf("        %s\n", d.c_str());
    std::fflush(stdout);
    (ok ? passed : failed)++;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string list(const std::vector<double>& v, const char* f = "%.3f") {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(f, v[i]);
  }
  return s + "}";
}

// Chaotic detunings of a scan according to each method.
struct ScanSets {
  std::vector<double> wolf;
  std::vector<double> benettin;
};

ScanSets chaotic_sets(const std::vector<BifurcationRow>& rows, double thr) {
  ScanSets s;
  for (const auto& r : rows) {
    if (r.record.status == PointStatus::diverged) continue;
    if (r.record.lambda_wolf > thr) s.wolf.push_back(r.sample.delta);
    if (r.record.lambda_benettin > thr) s.benettin.push_back(r.sample.delta);
  }
  return s;
}

bool any_in(const std::vector<double>& v, double lo, double hi) {
  return std::any_of(v.begin(), v.end(), [&](double d) { return d >= lo && d <= hi; });
}

bool all_in(const std::vector<double>& v, double lo, double hi) {
  return std::all_of(v.begin(), v.end(), [&](double d) { return d >= lo && d <= hi; });
}

constexpr double kEdgeEps = 1e-9;  // grid values vs decimal band edges

// ---------------------------------------------------------------------------

void coefficient_oracle(Report& rep) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> tau_d(0.0, 20.0), gam_d(0.5, 20.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    SystemParams p;
    p.kappa = 1.0;
    p.gamma = gam_d(rng);
    double tau = tau_d(rng);
    if (tau == 0.0) tau = 1e-3;
    const auto c = memory_coefficients(tau, p);
    const auto q = memory_coefficients_quadrature(tau, p, 32);
    for (auto [x, y] : {std::pair{c.f0, q.f0}, {c.f1, q.f1}, {c.f2, q.f2}}) {
      worst = std::max(worst, std::abs(x - y) / std::abs(x));
    }
  }
  const double secs = seconds_since(t0);
  rep.line(worst < 1e-8 && secs < 1.0, "coefficient oracle",
           fmt("max relative error %.2e over 100 random (tau, gamma) (< 1e-8), %.3f s (< 1 s)",
               worst, secs));
}

void markov_limit(Report& rep) {
  SystemParams p;
  p.gamma = 1e4;
  p.kappa = 1.0;
  const auto f = memory_coefficients(1.0, p);
  const double e0 = std::abs(f.f0.real() - 0.5);
  const double e1 = std::abs(f.f1);
  const double e2 = std::abs(f.f2);
  rep.line(e0 < 1e-3 && e1 < 1e-3 && e2 < 1e-3, "markov limit",
           fmt("|f0-0.5|=%.1e |f1|=%.1e |f2|=%.1e (each < 1e-3)", e0, e1, e2));
}

void realness(Report& rep) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pd(0.8, 1.6), dd(-1.4, -0.4), lg(std::log(0.8),
                                                                        std::log(10.0));
  IntegratorConfig cfg;  // tau in [0, 3000]
  double worst = 0.0;
  int diverged = 0;
  std::vector<SystemParams> pts(20);
  for (auto& p : pts) {
    p.pump = pd(rng);
    p.delta = dd(rng);
    p.gamma = std::exp(lg(rng));
  }
  std::vector<double> per(pts.size(), 0.0);
  std::vector<int> bad(pts.size(), 0);
  parallel_for(pts.size(), workers(), [&](std::size_t i) {
    try {
      const Trajectory t = integrate(pts[i], vacuum_state(), cfg);
      for (const auto& s : t.states) {
        per[i] = std::max({per[i], std::abs(s.na.imag()), std::abs(s.nb.imag())});
      }
    } catch (const DivergenceError&) {
      bad[i] = 1;
    }
  });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    worst = std::max(worst, per[i]);
    diverged += bad[i];
  }
  rep.line(worst < 1e-8 && diverged == 0, "realness invariant",
           fmt("max |Im na|, |Im nb| = %.2e over 20 random points, tau in [0, 3000] "
               "(< 1e-8); %d diverged",
               worst, diverged));
}

void memory_time_triptych(Report& rep, const AnalysisConfig& a) {
  struct Case {
    double gamma;
    bool chaotic;
  };
  bool ok = true;
  std::vector<std::string> details;
  for (Case c : {Case{10.0, false}, Case{2.0, false}, Case{0.8, true}}) {
    const auto t0 = Clock::now();
    const auto r = analyze_point(1.25, -0.70, c.gamma, a);
    const double secs = seconds_since(t0);
    const bool w = r.record.lambda_wolf > a.chaos_threshold;
    const bool b = r.record.lambda_benettin > a.chaos_threshold;
    const bool good = w == c.chaotic && b == c.chaotic && secs <= 60.0;
    ok = ok && good;
    details.push_back(fmt("gamma=%-4g wolf=%+.4f benettin=%+.4f expected %s, %.1f s%s",
                          c.gamma, r.record.lambda_wolf, r.record.lambda_benettin,
                          c.chaotic ? "chaotic" : "regular", secs, good ? "" : "  <--"));
  }
  rep.line(ok, "memory-time triptych (P=1.25, Delta=-0.70)",
           "gamma=10,2 regular and gamma=0.8 chaotic under both methods, <= 60 s/point",
           details);
}

void single_band(Report& rep, const AnalysisConfig& a) {
  const auto t0 = Clock::now();
  const auto rows = run_bifurcation_scan(1.37, -1.2, -0.4, 161, 10.0, a, workers());
  const double secs = seconds_since(t0);
  const auto sets = chaotic_sets(rows, a.chaos_threshold);
  const bool ok = !sets.wolf.empty() && all_in(sets.wolf, -1.08 - kEdgeEps, -0.87 + kEdgeEps) &&
                  any_in(sets.wolf, -1.03 - kEdgeEps, -0.92 + kEdgeEps);
  rep.line(ok, "single chaotic band (P=1.37, gamma=10, 161 points)",
           fmt("%zu chaotic detunings, all in [-1.08,-0.87] and some in [-1.03,-0.92]; "
               "%.0f s with %d workers",
               sets.wolf.size(), secs, workers()),
           {"wolf:     " + list(sets.wolf), "benettin: " + list(sets.benettin)});
}

void two_bands(Report& rep, const AnalysisConfig& a) {
  const auto rows = run_bifurcation_scan(1.37, -1.2, -0.4, 161, 2.0, a, workers());
  const auto sets = chaotic_sets(rows, a.chaos_threshold);
  const bool band1 = any_in(sets.wolf, -1.18 - kEdgeEps, -0.94 + kEdgeEps);
  const bool band2 = any_in(sets.wolf, -0.88 - kEdgeEps, -0.47 + kEdgeEps);
  // regular point in [-0.83,-0.52] with chaotic points of the band on both sides
  std::vector<double> gaps;
  for (const auto& r : rows) {
    const double d = r.sample.delta;
    if (d < -0.83 - kEdgeEps || d > -0.52 + kEdgeEps) continue;
    if (r.record.lambda_wolf > a.chaos_threshold) continue;
    const bool left = any_in(sets.wolf, -0.88 - kEdgeEps, d - kEdgeEps);
    const bool right = any_in(sets.wolf, d + kEdgeEps, -0.47 + kEdgeEps);
    if (left && right) gaps.push_back(d);
  }
  rep.line(band1 && band2 && !gaps.empty(), "two chaotic bands (P=1.37, gamma=2)",
           fmt("chaos in [-1.18,-0.94]: %s, in [-0.88,-0.47]: %s, regular points inside "
               "the second band: %zu",
               band1 ? "yes" : "no", band2 ? "yes" : "no", gaps.size()),
           {"wolf:     " + list(sets.wolf), "benettin: " + list(sets.benettin),
            "regular inside band 2: " + list(gaps)});
}

// Smallest P on the 0.01 grid whose detuning row holds a chaotic point.
struct Threshold {
  double p = std::nan("");
  std::vector<double> deltas;
  double lambda = 0.0;
  std::size_t points = 0;
};

Threshold pump_threshold(double gamma, const AnalysisConfig& a) {
  Threshold th;
  for (int k = 0; k <= 80; ++k) {
    const double p = grid_value(0.8, 1.6, 81, k);
    std::vector<double> lam(101, 0.0);
    parallel_for(lam.size(), workers(), [&](std::size_t j) {
      const double d = grid_value(-1.4, -0.4, 101, static_cast<int>(j));
      try {
        lam[j] = lyapunov_benettin(a.params_at(p, d, gamma), vacuum_state(), a.integ,
                                   a.benettin)
                     .lambda;
      } catch (const DivergenceError&) {
        lam[j] = std::nan("");
      }
    });
    th.points += lam.size();
    for (std::size_t j = 0; j < lam.size(); ++j) {
      if (lam[j] > a.chaos_threshold) {
        th.deltas.push_back(grid_value(-1.4, -0.4, 101, static_cast<int>(j)));
        th.lambda = std::max(th.lambda, lam[j]);
      }
    }
    if (!th.deltas.empty()) {
      th.p = p;
      break;
    }
  }
  return th;
}

void pump_thresholds(Report& rep, const AnalysisConfig& a) {
  const auto t0 = Clock::now();
  const Threshold t10 = pump_threshold(10.0, a);
  const Threshold t1 = pump_threshold(1.0, a);
  const bool ok10 = std::abs(t10.p - 1.37) <= 0.05 + kEdgeEps;
  const bool ok1 = std::abs(t1.p - 1.08) <= 0.05 + kEdgeEps;
  rep.line(ok10 && ok1, "pump thresholds",
           fmt("threshold(gamma=10) = %.2f (1.37 +- 0.05), threshold(gamma=1) = %.2f "
               "(1.08 +- 0.05); %.0f s",
               t10.p, t1.p, seconds_since(t0)),
           {fmt("gamma=10: first chaotic row has %zu detunings %s, max lambda %.4f",
                t10.deltas.size(), list(t10.deltas, "%.2f").c_str(), t10.lambda),
            fmt("gamma=1:  first chaotic row has %zu detunings %s, max lambda %.4f",
                t1.deltas.size(), list(t1.deltas, "%.2f").c_str(), t1.lambda),
            "rows scanned upward from P=0.80 on Delta in [-1.4,-0.4] step 0.01, "
            "classified by the two-trajectory exponent"});
}

void chaos_entanglement(Report& rep, const AnalysisConfig& a) {
  const auto c = analyze_point(1.4, -1.0, 10.0, a);
  const auto r = analyze_point(1.4, -1.1, 10.0, a);
  const bool roles = c.record.lambda_wolf > a.chaos_threshold &&
                     r.record.lambda_wolf <= a.chaos_threshold;
  const bool ok = roles && c.record.en > r.record.en;
  rep.line(ok, "chaos-entanglement coupling (P=1.4, gamma=10)",
           fmt("En(-1.0) = %.4e %s En(-1.1) = %.4e", c.record.en,
               c.record.en > r.record.en ? ">" : "<=", r.record.en),
           {fmt("Delta=-1.0: wolf %+.4f benettin %+.4f (%s)", c.record.lambda_wolf,
                c.record.lambda_benettin,
                c.record.lambda_wolf > a.chaos_threshold ? "chaotic" : "regular"),
            fmt("Delta=-1.1: wolf %+.4f benettin %+.4f (%s)", r.record.lambda_wolf,
                r.record.lambda_benettin,
                r.record.lambda_wolf > a.chaos_threshold ? "chaotic" : "regular")});
}

// Indices that are the strict maximum of the window [i-w, i+w].
std::vector<std::size_t> window_maxima(const std::vector<double>& v, std::size_t w) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (!std::isfinite(v[i])) continue;
    const std::size_t lo = i >= w ? i - w : 0;
    const std::size_t hi = std::min(v.size() - 1, i + w);
    bool top = true;
    for (std::size_t j = lo; j <= hi && top; ++j) {
      if (j != i && std::isfinite(v[j]) && v[j] >= v[i]) top = false;
    }
    if (top) out.push_back(i);
  }
  return out;
}

void coincident_maxima(Report& rep, const AnalysisConfig& a) {
  const auto rows = run_bifurcation_scan(1.3, -1.2, -0.4, 161, 10.0, a, workers());
  std::vector<double> en, le;
  for (const auto& r : rows) {
    en.push_back(r.record.en);
    le.push_back(r.record.lambda_wolf);
  }
  // strict 3-point local maxima; the +-5 step variant is reported only
  const auto en_max = window_maxima(en, 1);
  const auto le_max = window_maxima(le, 1);
  std::vector<double> en_wide;
  for (auto i : window_maxima(en, 5)) en_wide.push_back(rows[i].sample.delta);
  std::vector<double> matched, en_d, le_d;
  for (auto i : en_max) en_d.push_back(rows[i].sample.delta);
  for (auto i : le_max) le_d.push_back(rows[i].sample.delta);
  for (auto i : en_max) {
    for (auto j : le_max) {
      if ((i > j ? i - j : j - i) <= 1) {
        matched.push_back(rows[i].sample.delta);
        break;
      }
    }
  }
  rep.line(matched.size() >= 2, "coincident En and LE maxima (P=1.3, gamma=10)",
           fmt("%zu En maxima coincide with LE maxima within one step (>= 2)",
               matched.size()),
           {"coincident: " + list(matched), "En maxima:  " + list(en_d),
            "LE maxima:  " + list(le_d),
            "En maxima over +-5 steps: " + list(en_wide),
            fmt("En range over the scan: [%.3e, %.3e]",
                *std::min_element(en.begin(), en.end()),
                *std::max_element(en.begin(), en.end()))});
}

struct GridResult {
  GridSpec grid;
  std::vector<SweepRecord> records;
};

GridResult grid21(double gamma, const AnalysisConfig& a) {
  GridSpec g{0.8, 1.6, 21, -1.4, -0.4, 21, gamma};
  SweepOptions o;
  o.workers = workers();
  return {g, run_sweep(g, a, o)};
}

void memory_entanglement(Report& rep, const GridResult& g10, const GridResult& g1,
                         double thr) {
  const int n = g10.grid.delta_steps;
  const auto chaotic = [thr](const SweepRecord& r) {
    return r.status != PointStatus::diverged && r.lambda_wolf > thr;
  };
  // union of both chaotic sets, dilated by one grid cell
  std::set<std::size_t> hood;
  for (const auto* g : {&g10, &g1}) {
    for (std::size_t k = 0; k < g->records.size(); ++k) {
      if (!chaotic(g->records[k])) continue;
      const int i = static_cast<int>(k) / n, j = static_cast<int>(k) % n;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const int ii = i + di, jj = j + dj;
          if (ii >= 0 && ii < g->grid.p_steps && jj >= 0 && jj < n) {
            hood.insert(static_cast<std::size_t>(ii * n + jj));
          }
        }
      }
    }
  }
  double s10 = 0.0, s1 = 0.0;
  std::size_t m = 0;
  for (auto k : hood) {
    if (!std::isfinite(g10.records[k].en) || !std::isfinite(g1.records[k].en)) continue;
    s10 += g10.records[k].en;
    s1 += g1.records[k].en;
    ++m;
  }
  const double mean10 = m ? s10 / m : 0.0, mean1 = m ? s1 / m : 0.0;
  rep.line(m > 0 && mean1 > mean10, "memory-enhanced entanglement",
           fmt("mean En near chaotic regions: gamma=1 %.4e vs gamma=10 %.4e over %zu "
               "matching grid points",
               mean1, mean10, m),
           {"21x21 grid, P in [0.8,1.6], Delta in [-1.4,-0.4]; neighbourhood = chaotic "
            "points of either map dilated by one cell"});
}

void cross_validation(Report& rep, const GridResult& g10) {
  std::size_t considered = 0, agree = 0, chaotic = 0, close = 0;
  double worst = 0.0, sum_dev = 0.0;
  std::vector<std::string> outliers;
  for (const auto& r : g10.records) {
    if (r.status == PointStatus::diverged || !std::isfinite(r.lambda_wolf)) continue;
    if (std::abs(r.lambda_benettin) <= 0.01) continue;
    ++considered;
    if ((r.lambda_wolf > 0) == (r.lambda_benettin > 0)) ++agree;
    if (r.lambda_benettin > 0.01) {
      ++chaotic;
      const double dev = std::abs(r.lambda_wolf - r.lambda_benettin) / r.lambda_benettin;
      sum_dev += dev;
      worst = std::max(worst, dev);
      if (dev <= 0.2) {
        ++close;
      } else {
        outliers.push_back(fmt("P=%.2f Delta=%.2f wolf %.4f benettin %.4f (%.0f%%)", r.p,
                               r.delta, r.lambda_wolf, r.lambda_benettin, 100 * dev));
      }
    }
  }
  const double frac = considered ? double(agree) / considered : 0.0;
  const bool ok = considered > 0 && frac >= 0.9 && close == chaotic;
  std::vector<std::string> details = {
      fmt("sign agreement %zu/%zu = %.1f%% (>= 90%%), points with |lambda_benettin| > 0.01",
          agree, considered, 100 * frac),
      fmt("chaotic points within 20%%: %zu/%zu, mean deviation %.1f%%, worst %.1f%%", close,
          chaotic, chaotic ? 100 * sum_dev / chaotic : 0.0, 100 * worst)};
  details.insert(details.end(), outliers.begin(), outliers.end());
  rep.line(ok, "wolf/benettin cross-validation (21x21, gamma=10)",
           fmt("sign agreement %.1f%%, %zu/%zu chaotic magnitudes within 20%%", 100 * frac,
               close, chaotic),
           details);
}

void entanglement_units(Report& rep) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ph(0.0, 2 * std::numbers::pi);
  bool nonneg = true;
  for (int i = 0; i < 100000; ++i) {
    MomentState s{};
    s.na = u(rng);
    s.nb = u(rng);
    s.abd = {u(rng), u(rng)};
    nonneg = nonneg && npt(s) >= 0.0;
  }
  MomentState s{};
  s.na = 0.41;
  s.nb = 0.27;
  s.abd = {0.12, 0.33};
  double phase_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    MomentState r = s;
    r.abd *= std::polar(1.0, ph(rng));
    phase_err = std::max(phase_err, std::abs(d_ho(r) - d_ho(s)));
  }
  EntanglementSeries sin_series;
  const double dt = 0.01;
  const int n = static_cast<int>(std::llround(100 * std::numbers::pi / dt));
  for (int k = 0; k <= n; ++k) {
    sin_series.taus.push_back(k * dt);
    sin_series.n_values.push_back(std::abs(std::sin(k * dt)));
  }
  const double avg_err = std::abs(average_npt(sin_series).en - 2.0 / std::numbers::pi);
  const bool ok = nonneg && phase_err < 1e-12 && avg_err < dt * dt;
  rep.line(ok, "entanglement unit properties",
           fmt("N >= 0 on 1e5 random states: %s; phase invariance max diff %.1e (< 1e-12); "
               "|<|sin|> - 2/pi| = %.1e (< dt^2 = %.0e)",
               nonneg ? "yes" : "no", phase_err, avg_err, dt * dt));
}

std::string sweep_csv(const std::vector<SweepRecord>& r) {
  std::ostringstream s;
  write_sweep_csv(s, r);
  return s.str();
}

void determinism(Report& rep, const AnalysisConfig& a) {
  const GridSpec g{1.3, 1.4, 4, -1.05, -0.9, 6, 10.0};
  SweepOptions one, eight;
  one.workers = 1;
  eight.workers = 8;
  const std::string r1 = sweep_csv(run_sweep(g, a, one));
  const std::string r8 = sweep_csv(run_sweep(g, a, eight));

  const auto dir = std::filesystem::temp_directory_path() / "memochaos_acceptance";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  SweepOptions part;
  part.workers = 8;
  part.checkpoint = dir / "ck.json";
  part.checkpoint_every = 2;
  part.stop_after = 3;
  bool interrupted = false;
  try {
    run_sweep(g, a, part);
  } catch (const SweepInterrupted&) {
    interrupted = true;
  }
  part.stop_after.reset();
  const std::string resumed = sweep_csv(run_sweep(g, a, part));
  std::filesystem::remove_all(dir);
  rep.line(r1 == r8 && interrupted && resumed == r1, "determinism",
           fmt("workers 1 vs 8 byte-identical: %s; interrupted+resumed byte-identical: %s "
               "(%zu-point grid)",
               r1 == r8 ? "yes" : "no", interrupted && resumed == r1 ? "yes" : "no",
               g.size()));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  Report rep;
  const AnalysisConfig a;  // default physics, integrator and estimator settings
  std::printf("memochaos acceptance suite (%d worker threads)\n", workers());

  coefficient_oracle(rep);
  markov_limit(rep);
  realness(rep);
  memory_time_triptych(rep, a);
  single_band(rep, a);
  two_bands(rep, a);
  pump_thresholds(rep, a);
  chaos_entanglement(rep, a);
  coincident_maxima(rep, a);
  const GridResult g10 = grid21(10.0, a);
  const GridResult g1 = grid21(1.0, a);
  memory_entanglement(rep, g10, g1, a.chaos_threshold);
  cross_validation(rep, g10);
  entanglement_units(rep);
  determinism(rep, a);

  std::printf("%d passed, %d failed, %.0f s\n", rep.passed, rep.failed, seconds_since(t0));
  return rep.failed == 0 ? 0 : 1;
}
