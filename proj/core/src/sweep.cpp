#include "memochaos/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "memochaos/error.hpp"

namespace memochaos {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double grid_value(double lo, double hi, int steps, int i) noexcept {
  if (steps <= 1) return lo;
  if (i == steps - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

void GridSpec::validate() const {
  if (!(std::isfinite(p_min) && std::isfinite(p_max) && p_min < p_max)) {
    throw InvalidArgument("GridSpec: need p_min < p_max");
  }
  if (!(std::isfinite(delta_min) && std::isfinite(delta_max) &&
        delta_min < delta_max)) {
    throw InvalidArgument("GridSpec: need delta_min < delta_max");
  }
  if (p_steps < 2 || delta_steps < 2) {
    throw InvalidArgument("GridSpec: steps must be >= 2");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("GridSpec: gamma must be > 0");
  }
  if (p_min < 0.0) throw InvalidArgument("GridSpec: p_min must be >= 0");
}

double GridSpec::p_at(int i) const noexcept {
  return grid_value(p_min, p_max, p_steps, i);
}

double GridSpec::delta_at(int j) const noexcept {
  return grid_value(delta_min, delta_max, delta_steps, j);
}

std::string_view to_string(PointStatus status) noexcept {
  switch (status) {
    case PointStatus::ok:
      return "ok";
    case PointStatus::diverged:
      return "diverged";
    case PointStatus::flagged:
      return "flagged";
  }
  return "ok";
}

PointStatus parse_status(std::string_view text) {
  if (text == "ok") return PointStatus::ok;
  if (text == "diverged") return PointStatus::diverged;
  if (text == "flagged") return PointStatus::flagged;
  throw InvalidArgument("unknown status '" + std::string(text) + "'");
}

void AnalysisConfig::validate() const {
  physics.validate();
  integ.validate();
  wolf.validate();
  benettin.validate();
  if (!(chaos_threshold >= 0.0)) {
    throw InvalidArgument("AnalysisConfig: chaos_threshold must be >= 0");
  }
  if (!(peak_tol >= 0.0)) throw InvalidArgument("AnalysisConfig: peak_tol must be >= 0");
}

SystemParams AnalysisConfig::params_at(double p, double delta,
                                       double gamma) const {
  SystemParams params = physics;
  params.pump = p;
  params.delta = delta;
  params.gamma = gamma;
  return params;
}

PointAnalysis analyze_point(double p, double delta, double gamma,
                            const AnalysisConfig& analysis) {
  PointAnalysis out;
  SweepRecord& rec = out.record;
  rec.p = p;
  rec.delta = delta;
  rec.gamma = gamma;
  out.bifurcation.delta = delta;

  const SystemParams params = analysis.params_at(p, delta, gamma);
  const double transient = analysis.integ.t_transient;
  try {
    const Trajectory traj = integrate(params, vacuum_state(), analysis.integ);

    try {
      out.wolf = lyapunov_wolf(observables(traj, transient), analysis.wolf);
      rec.lambda_wolf = out.wolf.lambda;
    } catch (const NoNeighbor&) {
      rec.lambda_wolf = kNaN;
      rec.status = PointStatus::flagged;
    } catch (const TooShort&) {
      rec.lambda_wolf = kNaN;
      rec.status = PointStatus::flagged;
    }

    out.bifurcation = bifurcation_points(traj, transient, analysis.peak_tol);

    const EntanglementSeries ent = entanglement_series(traj, transient);
    out.entanglement = average_npt(ent);
    rec.en = out.entanglement.en;
    if (average_not_stationary(ent, analysis.stationarity_tol)) {
      rec.status = PointStatus::flagged;
    }

    out.benettin =
        lyapunov_benettin(params, vacuum_state(), analysis.integ, analysis.benettin);
    rec.lambda_benettin = out.benettin.lambda;
  } catch (const DivergenceError&) {
    rec.lambda_wolf = kNaN;
    rec.lambda_benettin = kNaN;
    rec.en = kNaN;
    rec.status = PointStatus::diverged;
    out.bifurcation.peak_values.clear();
  }
  return out;
}

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& task) {
  if (workers < 1) throw InvalidArgument("parallel_for: workers must be >= 1");
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  const auto count = static_cast<std::size_t>(workers);
  if (count == 1 || n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(count);
    for (std::size_t w = 0; w < count; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

std::vector<SweepRecord> run_sweep(const GridSpec& grid,
                                   const AnalysisConfig& analysis,
                                   const SweepOptions& options) {
  grid.validate();
  analysis.validate();
  if (options.workers < 1) throw InvalidArgument("run_sweep: workers must be >= 1");

  const std::string hash = grid_hash(grid, analysis);
  CheckpointPlan plan;
  if (options.checkpoint) {
    plan = checkpoint_resume(*options.checkpoint, grid, analysis);
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) plan.remaining.push_back(i);
  }

  std::mutex collector_mutex;
  std::map<std::size_t, SweepRecord>& completed = plan.completed;
  std::size_t fresh = 0;
  std::size_t since_flush = 0;
  std::atomic<bool> stop{false};

  const auto flush = [&] {
    if (options.checkpoint) checkpoint_write(completed, *options.checkpoint, hash);
    since_flush = 0;
  };

  const auto task = [&](std::size_t k) {
    if (stop.load()) return;
    const std::size_t index = plan.remaining[k];
    const int i = static_cast<int>(index / static_cast<std::size_t>(grid.delta_steps));
    const int j = static_cast<int>(index % static_cast<std::size_t>(grid.delta_steps));
    const PointAnalysis result =
        analyze_point(grid.p_at(i), grid.delta_at(j), grid.gamma, analysis);

    std::lock_guard lock(collector_mutex);
    completed.emplace(index, result.record);
    ++fresh;
    if (++since_flush >= options.checkpoint_every) flush();
    if (options.progress) options.progress(completed.size(), grid.size());
    if (options.stop_after && fresh >= *options.stop_after) stop = true;
  };

  parallel_for(plan.remaining.size(), options.workers, task);

  {
    std::lock_guard lock(collector_mutex);
    if (since_flush > 0 || (options.checkpoint && completed.size() == grid.size())) {
      flush();
    }
  }
  if (completed.size() < grid.size()) {
    throw SweepInterrupted("run_sweep: stopped after " + std::to_string(fresh) +
                           " new points (" + std::to_string(completed.size()) +
                           "/" + std::to_string(grid.size()) + " complete)");
  }

  std::vector<SweepRecord> records;
  records.reserve(grid.size());
  for (auto& [index, rec] : completed) records.push_back(rec);
  return records;
}

std::vector<BifurcationRow> run_bifurcation_scan(double p, double delta_min,
                                                 double delta_max,
                                                 int delta_steps, double gamma,
                                                 const AnalysisConfig& analysis,
                                                 int workers) {
  analysis.validate();
  if (delta_steps < 1) throw InvalidArgument("bifurcation scan: steps must be >= 1");
  if (delta_steps > 1 && !(delta_min < delta_max)) {
    throw InvalidArgument("bifurcation scan: need delta_min < delta_max");
  }
  if (!(p >= 0.0) || !(gamma > 0.0)) {
    throw InvalidArgument("bifurcation scan: need P >= 0 and gamma > 0");
  }

  std::vector<BifurcationRow> rows(static_cast<std::size_t>(delta_steps));
  parallel_for(rows.size(), workers, [&](std::size_t k) {
    const double delta =
        grid_value(delta_min, delta_max, delta_steps, static_cast<int>(k));
    PointAnalysis a = analyze_point(p, delta, gamma, analysis);
    rows[k] = {std::move(a.bifurcation), std::move(a.wolf), std::move(a.benettin),
               a.entanglement, a.record};
  });
  return rows;
}

}  // namespace memochaos
