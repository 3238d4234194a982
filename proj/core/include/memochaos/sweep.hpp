#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memochaos/chaos.hpp"
#include "memochaos/entangle.hpp"
#include "memochaos/error.hpp"
#include "memochaos/integrate.hpp"
#include "memochaos/model.hpp"

namespace memochaos {

inline constexpr std::string_view kToolVersion = "memochaos-1.0";

/// Inclusive uniform (P, Delta) grid at fixed gamma.
struct GridSpec {
  double p_min = 0.8;
  double p_max = 1.6;
  int p_steps = 81;
  double delta_min = -1.4;
  double delta_max = -0.4;
  int delta_steps = 101;
  double gamma = 10.0;

  void validate() const;
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(p_steps) * static_cast<std::size_t>(delta_steps);
  }
  double p_at(int i) const noexcept;
  double delta_at(int j) const noexcept;
};

/// Value of the i-th point of an inclusive uniform grid.
double grid_value(double lo, double hi, int steps, int i) noexcept;

enum class PointStatus { ok, diverged, flagged };

std::string_view to_string(PointStatus status) noexcept;
PointStatus parse_status(std::string_view text);

struct SweepRecord {
  double p = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double lambda_wolf = 0.0;
  double lambda_benettin = 0.0;
  double en = 0.0;
  PointStatus status = PointStatus::ok;
};

/// Everything that determines a single-point result apart from (P, Delta,
/// gamma): fixed physics, integrator, estimator settings.
struct AnalysisConfig {
  SystemParams physics;  ///< sigma, kappa, gamma_m are taken from here
  IntegratorConfig integ;
  WolfConfig wolf;
  BenettinConfig benettin;
  double chaos_threshold = kChaosThreshold;
  double peak_tol = 1e-6;
  /// Relative En drift (first half vs full window) that flags a point.
  double stationarity_tol = 0.1;

  void validate() const;
  SystemParams params_at(double p, double delta, double gamma) const;
};

/// Full single-point result: vacuum start, one sampled trajectory for Wolf,
/// bifurcation peaks and En, plus an independent two-trajectory Benettin run.
struct PointAnalysis {
  SweepRecord record;
  BifurcationSample bifurcation;
  LyapunovEstimate wolf;
  LyapunovEstimate benettin;
  EntanglementSummary entanglement;
};

/// Divergence is reported through record.status = diverged (lambdas and En
/// NaN), never thrown.
PointAnalysis analyze_point(double p, double delta, double gamma,
                            const AnalysisConfig& analysis);

/// Thrown by run_sweep when SweepOptions::stop_after is reached; the
/// checkpoint (if any) has been flushed.
class SweepInterrupted : public Error {
 public:
  using Error::Error;
};

struct SweepOptions {
  int workers = 1;
  /// When set, completed records are periodically written here, and an
  /// existing checkpoint is resumed.
  std::optional<std::filesystem::path> checkpoint;
  std::size_t checkpoint_every = 8;
  /// Stop scheduling once this many new points are done (simulated
  /// interruption). Points already in flight still complete and are kept.
  std::optional<std::size_t> stop_after;
  /// Called (serialized) after every completed point with (done, total).
  std::function<void(std::size_t, std::size_t)> progress;
};

/// One record per grid point, row-major (P outer, Delta inner), identical
/// for any worker count.
std::vector<SweepRecord> run_sweep(const GridSpec& grid,
                                   const AnalysisConfig& analysis,
                                   const SweepOptions& options = {});

/// Runs `task(i)` for i in [0, n) on `workers` threads; exceptions from a
/// task are rethrown on the caller after all threads stop.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& task);

struct BifurcationRow {
  BifurcationSample sample;
  LyapunovEstimate wolf;
  LyapunovEstimate benettin;
  EntanglementSummary entanglement;
  SweepRecord record;
};

/// Fresh vacuum-start analysis for each Delta on the inclusive grid.
std::vector<BifurcationRow> run_bifurcation_scan(double p, double delta_min,
                                                 double delta_max,
                                                 int delta_steps, double gamma,
                                                 const AnalysisConfig& analysis,
                                                 int workers = 1);

// ---------------------------------------------------------------------------
// Serialization

/// Hex digest identifying the grid together with every analysis setting.
std::string grid_hash(const GridSpec& grid, const AnalysisConfig& analysis);

/// Header `P,Delta,gamma,lambda_wolf,lambda_benettin,En,status`.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_sweep_csv(std::istream& in);

/// Bifurcation peaks, header `delta,peak_value`.
void write_bifurcation_csv(std::ostream& out,
                           const std::vector<BifurcationRow>& rows);
/// Per-Delta summary of a scan, in the sweep CSV schema.
void write_scan_summary_csv(std::ostream& out,
                            const std::vector<BifurcationRow>& rows);

struct CheckpointPlan {
  std::map<std::size_t, SweepRecord> completed;
  std::vector<std::size_t> remaining;
};

/// Atomically writes {grid_hash, version, records:[...]} (write + rename).
void checkpoint_write(const std::map<std::size_t, SweepRecord>& completed,
                      const std::filesystem::path& path,
                      const std::string& hash);

/// Loads a checkpoint and lists the grid indices still to compute. A
/// missing or zero-length file schedules the full grid. Throws HashMismatch
/// if the file belongs to a different grid/config and CorruptCheckpoint if
/// it cannot be parsed or its records do not fit the grid.
CheckpointPlan checkpoint_resume(const std::filesystem::path& path,
                                 const GridSpec& grid,
                                 const AnalysisConfig& analysis);

}  // namespace memochaos
