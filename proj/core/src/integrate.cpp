#include "memochaos/integrate.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "memochaos/dopri5.hpp"
#include "memochaos/error.hpp"
#include "memochaos/format.hpp"

namespace memochaos {

namespace {

using RealState = std::array<double, MomentState::kRealDim>;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void IntegratorConfig::validate() const {
  const auto fail = [](const std::string& what) {
    throw InvalidArgument("IntegratorConfig: " + what);
  };
  if (!positive_finite(rel_tol)) fail("rel_tol must be > 0");
  if (!positive_finite(abs_tol)) fail("abs_tol must be > 0");
  if (!positive_finite(max_step)) fail("max_step must be > 0");
  if (!positive_finite(sample_dtau)) fail("sample_dtau must be > 0");
  if (!positive_finite(t_end)) fail("t_end must be > 0");
  if (!positive_finite(t_transient)) fail("t_transient must be > 0");
  if (!(t_transient < t_end)) fail("t_transient must be < t_end");
  if (sample_dtau > 10.0 * max_step) fail("sample_dtau must be <= 10*max_step");
}

std::size_t IntegratorConfig::sample_intervals() const {
  return static_cast<std::size_t>(std::floor(t_end / sample_dtau + 1e-9));
}

Trajectory integrate_from(const SystemParams& params, const MomentState& initial,
                          double tau0, std::size_t n_intervals, double dtau,
                          const IntegratorConfig& config) {
  params.validate();
  if (!initial.is_finite()) {
    throw InvalidArgument("integrate: initial state is not finite");
  }

  Trajectory traj;
  traj.params = params;
  traj.taus.reserve(n_intervals + 1);
  traj.states.reserve(n_intervals + 1);

  auto rhs = [&params](double t, const RealState& y, RealState& dydt) {
    const auto s = MomentState::from_real(y);
    dydt = moment_derivatives(s, memory_coefficients(t, params), params)
               .to_real();
  };
  auto observer = [&traj](std::size_t, double t, const RealState& y) {
    traj.taus.push_back(t);
    traj.states.push_back(MomentState::from_real(y));
  };
  auto guard = [](double t, const RealState& y) {
    for (std::size_t i = 0; i < y.size(); i += 2) {
      const double m = std::hypot(y[i], y[i + 1]);
      if (!std::isfinite(m) || m > kDivergenceBound) {
        throw DivergenceError(t, "trajectory diverged at tau=" +
                                     std::to_string(t));
      }
    }
  };

  DormandPrince5<MomentState::kRealDim> stepper(
      {config.rel_tol, config.abs_tol, config.max_step, 0.0});
  RealState y = initial.to_real();
  stepper.integrate_uniform(rhs, y, tau0, dtau, n_intervals, observer, guard);
  return traj;
}

Trajectory integrate(const SystemParams& params, const MomentState& initial,
                     const IntegratorConfig& config) {
  config.validate();
  return integrate_from(params, initial, 0.0, config.sample_intervals(),
                        config.sample_dtau, config);
}

Trajectory resume(const Trajectory& trajectory, double extra_time,
                  const IntegratorConfig& config) {
  if (trajectory.empty()) throw InvalidArgument("resume: empty trajectory");
  if (!(extra_time >= 0.0) || !std::isfinite(extra_time)) {
    throw InvalidArgument("resume: extra_time must be finite and >= 0");
  }
  const double tau0 = trajectory.taus.back();
  const MomentState& last = trajectory.states.back();
  if (!last.is_finite() || last.max_abs() > kDivergenceBound) {
    throw DivergenceError(tau0, "resume: trajectory already diverged");
  }
  if (extra_time == 0.0) return trajectory;

  const double dtau = config.sample_dtau;
  const auto n = static_cast<std::size_t>(std::floor(extra_time / dtau + 1e-9));
  Trajectory tail =
      integrate_from(trajectory.params, last, tau0, n, dtau, config);

  Trajectory out = trajectory;
  out.taus.insert(out.taus.end(), tail.taus.begin() + 1, tail.taus.end());
  out.states.insert(out.states.end(), tail.states.begin() + 1,
                    tail.states.end());
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "tau,re_a,im_a,re_b,im_b,re_na,im_na,re_nb,im_nb,re_aa,im_aa,"
         "re_bb,im_bb,re_ab,im_ab,re_abd,im_abd\n";
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    out << format_sci(trajectory.taus[i]);
    for (double v : trajectory.states[i].to_real()) out << ',' << format_sci(v);
    out << '\n';
  }
}

}  // namespace memochaos
