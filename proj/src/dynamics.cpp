#include "hidsym/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <boost/numeric/odeint.hpp>

namespace hidsym {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, kPhaseDim>;
using GeoState = std::array<double, 8>;

State to_state(const PhasePoint& p) {
  State s;
  const Vec7 y = p.coords();
  std::copy(y.data(), y.data() + kPhaseDim, s.begin());
  return s;
}

PhasePoint to_point(const State& s) { return PhasePoint::from_coords(Eigen::Map<const Vec7>(s.data())); }

TrajectorySample make_sample(double s, const State& x, const std::vector<Monitor>& monitors) {
  TrajectorySample out;
  out.s = s;
  out.p = to_point(x);
  out.monitors.reserve(monitors.size());
  for (const Monitor& m : monitors) out.monitors.push_back(m.f(out.p));
  return out;
}

double state_distance(const State& a, const State& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

State rk4_endpoint(const StructurePtr& s, const PhasePoint& p0, double s_end, double h) {
  auto system = [&s](const State& x, State& dxdt, double) {
    const Vec7 g = s->gamma_hat(to_point(x));
    std::copy(g.data(), g.data() + kPhaseDim, dxdt.begin());
  };
  odeint::runge_kutta4<State> stepper;
  State x = to_state(p0);
  const auto n = static_cast<std::size_t>(std::llround(s_end / h));
  for (std::size_t k = 0; k < n; ++k) stepper.do_step(system, x, static_cast<double>(k) * h, h);
  return x;
}

}  // namespace

void StepControl::validate() const {
  if (!(tolerance > 0.0)) throw ParameterError("step control: tolerance must be positive");
  if (!(initial_step > 0.0)) throw ParameterError("step control: initial step must be positive");
  if (!(min_step > 0.0) || min_step > initial_step) throw ParameterError("step control: need 0 < min_step <= initial_step");
  if (!(sample_interval >= 0.0)) throw ParameterError("step control: sample interval must be non-negative");
  if (max_steps == 0) throw ParameterError("step control: max_steps must be positive");
}

std::string to_string(Integrator m) { return m == Integrator::Dopri5 ? "dopri5" : "rk4"; }

Integrator integrator_from_string(const std::string& name) {
  if (name == "dopri5") return Integrator::Dopri5;
  if (name == "rk4") return Integrator::Rk4;
  throw ParameterError("unknown integrator '" + name + "' (expected dopri5 or rk4)");
}

std::vector<Monitor> multivector_monitors(const std::vector<SymmetricMultivectorField>& fields, StructurePtr s) {
  std::vector<Monitor> out;
  out.reserve(fields.size());
  for (const auto& K : fields) out.push_back({K.name(), phase_function_from_multivector(K, s)});
  return out;
}

Trajectory integrate(StructurePtr s, const PhasePoint& p0, double s_end, const StepControl& control,
                     const std::vector<Monitor>& monitors) {
  control.validate();
  if (!(s_end > 0.0) || !std::isfinite(s_end)) throw ParameterError("integrate: s_end must be positive");
  s->frame(p0);  // throws for inadmissible p0

  Trajectory traj;
  for (const Monitor& m : monitors) traj.monitor_names.push_back(m.name);
  traj.method = control.method;
  traj.step = control.initial_step;
  traj.tolerance = control.method == Integrator::Dopri5 ? control.tolerance : 0.0;

  auto system = [&s](const State& x, State& dxdt, double) {
    const Vec7 g = s->gamma_hat(to_point(x));
    std::copy(g.data(), g.data() + kPhaseDim, dxdt.begin());
  };

  State x = to_state(p0);
  double t = 0.0;
  traj.samples.push_back(make_sample(t, x, monitors));

  const bool grid = control.sample_interval > 0.0;
  std::size_t next_index = 1;
  auto next_sample = [&]() { return grid ? std::min(s_end, static_cast<double>(next_index) * control.sample_interval) : s_end; };
  const double eps = 1e-12 * std::max(1.0, s_end);

  auto exit_with = [&traj](std::string reason) {
    traj.exited = true;
    traj.exit_reason = std::move(reason);
  };

  if (control.method == Integrator::Rk4) {
    odeint::runge_kutta4<State> stepper;
    const double h = control.initial_step;
    while (t < s_end - eps && traj.accepted_steps < control.max_steps) {
      const double target = next_sample();
      const double dt = std::min(h, target - t);
      State trial = x;
      try {
        stepper.do_step(system, trial, t, dt);
      } catch (const Error& e) {
        exit_with(e.what());
        break;
      }
      ++traj.accepted_steps;
      t = (std::abs(target - (t + dt)) <= eps) ? target : t + dt;
      if (!s->admissible(to_point(trial))) {
        exit_with("left the admissible domain at s = " + std::to_string(t));
        break;
      }
      x = trial;
      if (!grid || t == target) {
        traj.samples.push_back(make_sample(t, x, monitors));
        if (grid) ++next_index;
      }
    }
    return traj;
  }

  auto controlled = odeint::make_controlled(control.tolerance, control.tolerance, odeint::runge_kutta_dopri5<State>());
  double dt_free = control.initial_step;
  while (t < s_end - eps) {
    if (traj.accepted_steps + traj.rejected_steps >= control.max_steps) {
      exit_with("step budget exhausted at s = " + std::to_string(t));
      break;
    }
    const double target = next_sample();
    const bool clamped = dt_free >= target - t;
    double dt = clamped ? target - t : dt_free;
    State trial = x;
    double t_trial = t;
    odeint::controlled_step_result result;
    try {
      result = controlled.try_step(system, trial, t_trial, dt);
    } catch (const Error&) {
      // A stage left the domain: shrink and retry.
      controlled.reset();
      result = odeint::fail;
      dt *= 0.5;
    }
    if (result == odeint::fail) {
      ++traj.rejected_steps;
      dt_free = dt;
      if (dt_free < control.min_step) {
        exit_with("step size underflow near s = " + std::to_string(t));
        break;
      }
      continue;
    }
    if (!s->admissible(to_point(trial))) {
      exit_with("left the admissible domain at s = " + std::to_string(t_trial));
      break;
    }
    ++traj.accepted_steps;
    if (!clamped) dt_free = dt;
    x = trial;
    t = clamped ? target : t_trial;
    if (!grid || clamped) {
      traj.samples.push_back(make_sample(t, x, monitors));
      if (grid) ++next_index;
    }
  }
  return traj;
}

std::vector<DriftEntry> monitor(const Trajectory& trajectory) {
  std::vector<DriftEntry> out;
  if (trajectory.samples.empty()) return out;
  for (std::size_t k = 0; k < trajectory.monitor_names.size(); ++k) {
    DriftEntry e;
    e.name = trajectory.monitor_names[k];
    e.initial = trajectory.samples.front().monitors[k];
    for (const auto& sample : trajectory.samples) {
      e.max_abs_drift = std::max(e.max_abs_drift, std::abs(sample.monitors[k] - e.initial));
    }
    e.relative_drift = e.max_abs_drift / std::max(1.0, std::abs(e.initial));
    out.push_back(e);
  }
  return out;
}

std::vector<DriftEntry> monitor(const Trajectory& trajectory, const std::vector<Monitor>& monitors) {
  if (trajectory.samples.empty()) throw ParameterError("monitor: empty trajectory");
  Trajectory copy;
  copy.samples.reserve(trajectory.samples.size());
  for (const Monitor& m : monitors) copy.monitor_names.push_back(m.name);
  for (const auto& sample : trajectory.samples) {
    TrajectorySample s{sample.s, sample.p, {}};
    for (const Monitor& m : monitors) s.monitors.push_back(m.f(sample.p));
    copy.samples.push_back(std::move(s));
  }
  return monitor(copy);
}

double geodesic_residual(const Trajectory& trajectory, const PhaseStructure& s, double tolerance) {
  if (trajectory.samples.size() < 2) return 0.0;
  const SpacetimeMetric& metric = s.metric();
  const TrajectorySample& first = trajectory.samples.front();
  const Vec4 u0 = s.gamma_hat(first.p).head<4>();

  GeoState y;
  for (int i = 0; i < 4; ++i) {
    y[static_cast<std::size_t>(i)] = first.p.x[i];
    y[static_cast<std::size_t>(4 + i)] = u0[i];
  }
  auto system = [&metric](const GeoState& z, GeoState& dz, double) {
    const Vec4 x(z[0], z[1], z[2], z[3]);
    const Vec4 u(z[4], z[5], z[6], z[7]);
    const auto chr = christoffel_symbols(metric, x);
    for (std::size_t n = 0; n < 4; ++n) {
      dz[n] = u[static_cast<Eigen::Index>(n)];
      dz[4 + n] = -u.dot(chr[n] * u);
    }
  };

  std::vector<double> times;
  times.reserve(trajectory.samples.size());
  for (const auto& sample : trajectory.samples) times.push_back(sample.s);

  double worst = 0.0;
  std::size_t index = 0;
  auto observer = [&](const GeoState& z, double) {
    const Vec4& x = trajectory.samples[index].p.x;
    for (int n = 0; n < 4; ++n) {
      worst = std::max(worst, std::abs(z[static_cast<std::size_t>(n)] - x[n]) / std::max(1.0, std::abs(x[n])));
    }
    ++index;
  };
  odeint::integrate_times(odeint::make_dense_output(tolerance, tolerance, odeint::runge_kutta_dopri5<GeoState>()),
                          system, y, times.begin(), times.end(), 1e-3, observer);
  return worst;
}

ConvergenceStudy convergence_study(StructurePtr s, const PhasePoint& p0, double s_end, double h) {
  if (!(h > 0.0) || !(s_end > 0.0)) throw ParameterError("convergence_study: need positive h and s_end");
  ConvergenceStudy c;
  c.steps = {h, h / 2.0, h / 4.0};
  std::vector<State> ends;
  for (double step : c.steps) ends.push_back(rk4_endpoint(s, p0, s_end, step));
  c.differences = {state_distance(ends[0], ends[1]), state_distance(ends[1], ends[2])};
  c.ratio = c.differences[0] / c.differences[1];
  return c;
}

void write_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "s,x0,x1,x2,x3,v1,v2,v3";
  for (const auto& name : trajectory.monitor_names) os << ',' << name;
  os << '\n';
  os << std::setprecision(17);
  for (const auto& sample : trajectory.samples) {
    os << sample.s;
    for (int i = 0; i < 4; ++i) os << ',' << sample.p.x[i];
    for (int i = 0; i < 3; ++i) os << ',' << sample.p.v[i];
    for (double m : sample.monitors) os << ',' << m;
    os << '\n';
  }
}

}  // namespace hidsym
