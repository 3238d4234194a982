#include "memochaos/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "memochaos/chaos.hpp"
#include "memochaos/entangle.hpp"
#include "memochaos/error.hpp"
#include "memochaos/format.hpp"
#include "memochaos/integrate.hpp"
#include "memochaos/sweep.hpp"

namespace memochaos::cli {

namespace {

// Shortest text that parses back to the same double.
std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string range_text(const Range& r) {
  return shortest(r.min) + ":" + shortest(r.max) + ":" + std::to_string(r.count);
}

// Settings shared by every subcommand. Bound straight into the library
// config structs so defaults live in one place.
struct Common {
  AnalysisConfig analysis;

  void add_to(CLI::App& app) {
    auto& phys = analysis.physics;
    auto& integ = analysis.integ;
    auto& wolf = analysis.wolf;
    auto& ben = analysis.benettin;
    app.add_option("--sigma", phys.sigma, "Quantum-classical scaling g0/kappa")
        ->capture_default_str();
    app.add_option("--kappa", phys.kappa, "Optical damping rate")->capture_default_str();
    app.add_option("--gamma-m", phys.gamma_m, "Mechanical damping")->capture_default_str();
    app.add_option("--t-end", integ.t_end, "Integration horizon (tau)")->capture_default_str();
    app.add_option("--t-transient", integ.t_transient, "Discarded transient (tau)")
        ->capture_default_str();
    app.add_option("--rel-tol", integ.rel_tol, "Integrator relative tolerance")
        ->capture_default_str();
    app.add_option("--abs-tol", integ.abs_tol, "Integrator absolute tolerance")
        ->capture_default_str();
    app.add_option("--max-step", integ.max_step, "Largest integrator step")
        ->capture_default_str();
    app.add_option("--dtau", integ.sample_dtau, "Sampling interval")->capture_default_str();
    app.add_option("--seed", ben.seed, "Seed of the Benettin perturbation direction")
        ->capture_default_str();
    app.add_option("--d0", ben.d0, "Benettin initial separation")->capture_default_str();
    app.add_option("--renorm-dtau", ben.renorm_dtau, "Benettin renormalization interval")
        ->capture_default_str();
    app.add_option("--wolf-evolve", wolf.evolve_steps, "Wolf evolution steps")
        ->capture_default_str();
    app.add_option("--wolf-min-sep", wolf.min_sep, "Wolf minimum separation (fraction of extent)")
        ->capture_default_str();
    app.add_option("--wolf-max-sep", wolf.max_sep, "Wolf replacement separation (fraction of extent)")
        ->capture_default_str();
    app.add_option("--wolf-theiler", wolf.theiler, "Wolf Theiler window (samples)")
        ->capture_default_str();
    app.add_option("--wolf-max-angle", wolf.max_angle, "Wolf replacement angle (rad)")
        ->capture_default_str();
    app.add_option("--threshold", analysis.chaos_threshold, "Chaos threshold on lambda")
        ->capture_default_str();
    app.add_option("--peak-tol", analysis.peak_tol, "Fixed-point peak-to-peak tolerance")
        ->capture_default_str();
  }

  std::string echo_args() const {
    const auto& phys = analysis.physics;
    const auto& integ = analysis.integ;
    const auto& wolf = analysis.wolf;
    const auto& ben = analysis.benettin;
    std::ostringstream s;
    s << " --sigma " << shortest(phys.sigma) << " --kappa " << shortest(phys.kappa)
      << " --gamma-m " << shortest(phys.gamma_m) << " --t-end " << shortest(integ.t_end)
      << " --t-transient " << shortest(integ.t_transient) << " --rel-tol "
      << shortest(integ.rel_tol) << " --abs-tol " << shortest(integ.abs_tol)
      << " --max-step " << shortest(integ.max_step) << " --dtau "
      << shortest(integ.sample_dtau) << " --seed " << ben.seed << " --d0 "
      << shortest(ben.d0) << " --renorm-dtau " << shortest(ben.renorm_dtau)
      << " --wolf-evolve " << wolf.evolve_steps << " --wolf-min-sep "
      << shortest(wolf.min_sep) << " --wolf-max-sep " << shortest(wolf.max_sep)
      << " --wolf-theiler " << wolf.theiler << " --wolf-max-angle "
      << shortest(wolf.max_angle) << " --threshold "
      << shortest(analysis.chaos_threshold) << " --peak-tol "
      << shortest(analysis.peak_tol);
    return s.str();
  }
};

// Comment header reproducing the run: `# args:` holds every setting that
// affects the file contents (paths and worker count excluded).
std::string echo_header(const std::string& command, const std::string& args,
                        std::uint64_t seed) {
  std::ostringstream s;
  s << "# " << kToolVersion << '\n'
    << "# seed: " << seed << '\n'
    << "# args: " << command << args << '\n';
  return s.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << contents;
  f.flush();
  if (!f) throw IoError("failed writing " + path);
}

void emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    write_file(path, contents);
  }
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

struct PointArgs {
  double p = 1.25;
  double delta = -0.7;
  double gamma = 10.0;

  void add_to(CLI::App& app) {
    app.add_option("--P", p, "Pumping parameter")->capture_default_str();
    app.add_option("--delta", delta, "Detuning")->capture_default_str();
    app.add_option("--gamma", gamma, "Inverse memory time of the bath")
        ->capture_default_str();
  }

  std::string echo() const {
    return " --P " + shortest(p) + " --delta " + shortest(delta) + " --gamma " +
           shortest(gamma);
  }
};

int cmd_trajectory(const PointArgs& pt, const Common& common,
                   const std::string& output, const std::string& npt_output,
                   std::ostream& out) {
  common.analysis.validate();
  const SystemParams params = common.analysis.params_at(pt.p, pt.delta, pt.gamma);
  params.validate();
  const Trajectory traj = integrate(params, vacuum_state(), common.analysis.integ);

  const std::string header = echo_header(
      "trajectory", pt.echo() + common.echo_args(), common.analysis.benettin.seed);
  std::ostringstream csv;
  csv << header;
  write_trajectory_csv(csv, traj);
  emit(output, csv.str(), out);

  if (!npt_output.empty()) {
    std::ostringstream ncsv;
    ncsv << header;
    write_npt_csv(ncsv, entanglement_series(traj, 0.0));
    emit(npt_output, ncsv.str(), out);
  }
  return kExitOk;
}

int cmd_lyapunov(const PointArgs& pt, const Common& common,
                 const std::string& json_path, std::ostream& out) {
  const AnalysisConfig& a = common.analysis;
  a.validate();
  a.params_at(pt.p, pt.delta, pt.gamma).validate();
  const PointAnalysis result = analyze_point(pt.p, pt.delta, pt.gamma, a);
  const SweepRecord& r = result.record;
  if (r.status == PointStatus::diverged) {
    throw DivergenceError(0.0, "trajectory diverged at P=" + shortest(pt.p) +
                                   " Delta=" + shortest(pt.delta));
  }
  const bool chaotic_wolf = std::isfinite(r.lambda_wolf) && r.lambda_wolf > a.chaos_threshold;
  const bool chaotic_ben = r.lambda_benettin > a.chaos_threshold;

  out << echo_header("lyapunov", pt.echo() + common.echo_args(), a.benettin.seed)
      << "P               " << format_sci(r.p) << '\n'
      << "Delta           " << format_sci(r.delta) << '\n'
      << "gamma           " << format_sci(r.gamma) << '\n'
      << "lambda_wolf     " << format_sci(r.lambda_wolf) << "  ("
      << result.wolf.n_renorms << " renormalizations)\n"
      << "lambda_benettin " << format_sci(r.lambda_benettin) << "  ("
      << result.benettin.n_renorms << " renormalizations)\n"
      << "En              " << format_sci(r.en) << '\n'
      << "threshold       " << format_sci(a.chaos_threshold) << '\n'
      << "chaotic         " << (chaotic_wolf ? "true" : "false")
      << (chaotic_wolf != chaotic_ben ? "  (methods disagree)" : "") << '\n'
      << "status          " << to_string(r.status) << '\n';

  if (!json_path.empty()) {
    const nlohmann::json doc = {
        {"P", r.p},
        {"Delta", r.delta},
        {"gamma", r.gamma},
        {"lambda_wolf", number_or_null(r.lambda_wolf)},
        {"lambda_benettin", number_or_null(r.lambda_benettin)},
        {"threshold", a.chaos_threshold},
        {"chaotic", chaotic_wolf},
        {"seed", a.benettin.seed},
        {"version", std::string(kToolVersion)},
        {"args", "lyapunov" + pt.echo() + common.echo_args()},
    };
    write_file(json_path, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_bifurcation(double p, double gamma, const Range& delta,
                    const Common& common, int workers, const std::string& output,
                    const std::string& summary, std::ostream& out) {
  const AnalysisConfig& a = common.analysis;
  const auto rows = run_bifurcation_scan(p, delta.min, delta.max, delta.count,
                                         gamma, a, workers);
  const std::string header = echo_header(
      "bifurcation",
      " --P " + shortest(p) + " --gamma " + shortest(gamma) + " --delta " +
          range_text(delta) + common.echo_args(),
      a.benettin.seed);
  std::ostringstream peaks;
  peaks << header;
  write_bifurcation_csv(peaks, rows);
  emit(output, peaks.str(), out);
  if (!summary.empty()) {
    std::ostringstream s;
    s << header;
    write_scan_summary_csv(s, rows);
    emit(summary, s.str(), out);
  }
  return kExitOk;
}

int cmd_sweep(const Range& p, const Range& delta, double gamma,
              const Common& common, int workers, const std::string& output,
              const std::string& checkpoint, const std::string& resume,
              std::size_t checkpoint_every, bool quiet, std::ostream& out,
              std::ostream& err) {
  GridSpec grid{p.min, p.max, p.count, delta.min, delta.max, delta.count, gamma};
  grid.validate();

  SweepOptions opts;
  opts.workers = workers;
  opts.checkpoint_every = checkpoint_every;
  if (!resume.empty()) {
    if (!std::filesystem::exists(resume)) {
      throw IoError("checkpoint to resume does not exist: " + resume);
    }
    opts.checkpoint = resume;
  } else if (!checkpoint.empty()) {
    opts.checkpoint = checkpoint;
  }
  if (!quiet) {
    opts.progress = [&err, checkpoint_every](std::size_t done, std::size_t total) {
      if (done % checkpoint_every == 0 || done == total) {
        err << "[memochaos] " << done << "/" << total << " points\n";
        err.flush();
      }
    };
  }

  const auto records = run_sweep(grid, common.analysis, opts);
  std::ostringstream csv;
  csv << echo_header("sweep",
                     " --gamma " + shortest(gamma) + " --p " + range_text(p) +
                         " --delta " + range_text(delta) + common.echo_args(),
                     common.analysis.benettin.seed);
  write_sweep_csv(csv, records);
  emit(output, csv.str(), out);
  return kExitOk;
}

// CLI11 treats anything starting with '-' after an option as a new flag
// unless it parses as a number; ranges such as "-1.2:-0.4:161" need help.
std::vector<std::string> join_negative_ranges(const std::vector<std::string>& args) {
  std::vector<std::string> joined;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    const bool is_option = a.rfind("--", 0) == 0 && a.find('=') == std::string::npos;
    if (is_option && i + 1 < args.size() && args[i + 1].size() > 1 &&
        args[i + 1][0] == '-' && args[i + 1].find(':') != std::string::npos) {
      joined.push_back(a + "=" + args[i + 1]);
      ++i;
    } else {
      joined.push_back(a);
    }
  }
  return joined;
}

}  // namespace

Range parse_range(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (first == std::string_view::npos || second == std::string_view::npos ||
      text.find(':', second + 1) != std::string_view::npos) {
    throw InvalidArgument("range '" + std::string(text) + "' is not min:max:count");
  }
  Range r;
  r.min = parse_double(text.substr(0, first));
  r.max = parse_double(text.substr(first + 1, second - first - 1));
  const std::string count(text.substr(second + 1));
  std::size_t used = 0;
  long n = 0;
  try {
    n = std::stol(count, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (count.empty() || used != count.size() || n < 1 || n > 1000000) {
    throw InvalidArgument("range '" + std::string(text) + "': bad count");
  }
  r.count = static_cast<int>(n);
  if (!std::isfinite(r.min) || !std::isfinite(r.max) ||
      (r.count > 1 && !(r.min < r.max)) || (r.count == 1 && r.min != r.max)) {
    throw InvalidArgument("range '" + std::string(text) + "': need min < max");
  }
  return r;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Chaos and entanglement in a non-Markovian optomechanical cavity",
               "memochaos"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  int workers = 1;
  if (const char* env = std::getenv("MEMOCHAOS_WORKERS"); env != nullptr && *env) {
    const std::string_view text(env);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), workers);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || workers < 1) {
      err << "memochaos: MEMOCHAOS_WORKERS must be a positive integer, got '" << text
          << "'\n";
      return kExitUsage;
    }
  }
  const auto add_workers = [&workers](CLI::App* sub) {
    sub->add_option("--workers,-j", workers,
                    "Worker threads (default from MEMOCHAOS_WORKERS)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  // trajectory
  auto* traj = app.add_subcommand("trajectory", "Integrate one point and write the sampled moments");
  PointArgs traj_pt;
  Common traj_common;
  std::string traj_out, traj_npt;
  traj_pt.add_to(*traj);
  traj_common.add_to(*traj);
  traj->add_option("--output,-o", traj_out, "Trajectory CSV (default: stdout)");
  traj->add_option("--npt-output", traj_npt, "Also write the negativity series N(tau)");

  // lyapunov
  auto* lyap = app.add_subcommand("lyapunov", "Maximal Lyapunov exponent of one point, both methods");
  PointArgs lyap_pt;
  Common lyap_common;
  std::string lyap_json;
  lyap_pt.add_to(*lyap);
  lyap_common.add_to(*lyap);
  lyap->add_option("--json", lyap_json, "Write the result as JSON");

  // bifurcation
  auto* bif = app.add_subcommand("bifurcation", "Detuning scan: peaks of Re<b1>, LE and En");
  double bif_p = 1.37, bif_gamma = 10.0;
  std::string bif_delta = "-1.2:-0.4:161", bif_out, bif_summary;
  Common bif_common;
  bif->add_option("--P", bif_p, "Pumping parameter")->capture_default_str();
  bif->add_option("--gamma", bif_gamma, "Inverse memory time")->capture_default_str();
  bif->add_option("--delta", bif_delta, "Detuning range min:max:count")->capture_default_str();
  bif_common.add_to(*bif);
  add_workers(bif);
  bif->add_option("--output,-o", bif_out, "Peaks CSV (delta,peak_value)")->required();
  bif->add_option("--summary", bif_summary, "Per-detuning LE/En summary CSV");

  // sweep
  auto* sw = app.add_subcommand("sweep", "P-Delta grid of LE and En");
  double sw_gamma = 10.0;
  std::string sw_p = "0.8:1.6:81", sw_delta = "-1.4:-0.4:101", sw_out, sw_ckpt, sw_resume;
  std::size_t sw_every = 8;
  bool sw_quiet = false;
  Common sw_common;
  sw->add_option("--gamma", sw_gamma, "Inverse memory time")->capture_default_str();
  sw->add_option("--p", sw_p, "Pump range min:max:count")->capture_default_str();
  sw->add_option("--delta", sw_delta, "Detuning range min:max:count")->capture_default_str();
  sw_common.add_to(*sw);
  add_workers(sw);
  sw->add_option("--output,-o", sw_out, "Sweep CSV")->required();
  auto* ck = sw->add_option("--checkpoint", sw_ckpt, "Checkpoint file (resumed if present)");
  sw->add_option("--resume", sw_resume, "Resume from an existing checkpoint")->excludes(ck);
  sw->add_option("--checkpoint-every", sw_every, "Points between checkpoint writes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sw->add_flag("--quiet,-q", sw_quiet, "No progress log");

  std::vector<std::string> args = join_negative_ranges(raw_args);
  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "memochaos: " << e.what() << '\n';
    err << "Run with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (*traj) return cmd_trajectory(traj_pt, traj_common, traj_out, traj_npt, out);
    if (*lyap) return cmd_lyapunov(lyap_pt, lyap_common, lyap_json, out);
    if (*bif) {
      return cmd_bifurcation(bif_p, bif_gamma, parse_range(bif_delta), bif_common,
                             workers, bif_out, bif_summary, out);
    }
    if (*sw) {
      return cmd_sweep(parse_range(sw_p), parse_range(sw_delta), sw_gamma, sw_common,
                       workers, sw_out, sw_ckpt, sw_resume, sw_every, sw_quiet, out,
                       err);
    }
  } catch (const InvalidArgument& e) {
    err << "memochaos: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "memochaos: divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const HashMismatch& e) {
    err << "memochaos: " << e.what() << '\n';
    return kExitIo;
  } catch (const CorruptCheckpoint& e) {
    err << "memochaos: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "memochaos: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "memochaos: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace memochaos::cli
