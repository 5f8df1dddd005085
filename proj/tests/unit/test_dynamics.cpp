#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hidsym/dynamics.hpp"
#include "test_support.hpp"

using namespace hidsym;

namespace {

PhasePoint kerr_bound_orbit() {
  PhasePoint p;
  p.x << 0.0, 8.0, 1.2, 0.3;
  p.v << 0.01, 0.004, 0.046;
  return p;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

}  // namespace

TEST_CASE("circular schwarzschild orbit at r = 6M stays circular for ten orbits") {
  const double M = 1.0, r = 6.0;
  const auto s = gravitational_structure(metric_catalog("schwarzschild", {{"M", M}}));
  const double omega = std::sqrt(M / (r * r * r));  // d phi / dt
  const double dtau_dt = std::sqrt(1.0 - 3.0 * M / r);
  const double s_end = 10.0 * 2.0 * M_PI / omega * dtau_dt;
  PhasePoint p;
  p.x << 0.0, r, M_PI / 2.0, 0.0;
  p.v << 0.0, 0.0, omega;
  StepControl control;
  control.sample_interval = 1.0;
  const Trajectory tr = integrate(s, p, s_end, control);
  REQUIRE_FALSE(tr.exited);
  double dr = 0.0;
  for (const auto& q : tr.samples) dr = std::max(dr, std::abs(q.p.x[1] - r));
  CHECK(dr <= 1e-6);
  const auto& last = tr.samples.back();
  CHECK(last.s == doctest::Approx(s_end).epsilon(1e-14));
  CHECK(last.p.x[0] == doctest::Approx(s_end / dtau_dt).epsilon(1e-8));
  CHECK(last.p.x[3] == doctest::Approx(20.0 * M_PI).epsilon(1e-8));
  CHECK(geodesic_residual(tr, *s) <= 1e-6);
}

TEST_CASE("kerr bound orbit conserves all four Killing quantities") {
  const auto metric = metric_catalog("kerr");
  const auto s = gravitational_structure(metric);
  std::vector<SymmetricMultivectorField> fields;
  for (const auto& name : {"Ghat", "dt", "dphi", "carter"}) fields.push_back(killing_field(metric, name));
  StepControl control;
  control.tolerance = 1e-10;
  const Trajectory tr = integrate(s, kerr_bound_orbit(), 100.0, control, multivector_monitors(fields, s));
  REQUIRE_FALSE(tr.exited);
  CHECK(tr.monitor_names == std::vector<std::string>{"Ghat", "dt", "dphi", "carter"});
  for (const auto& d : monitor(tr)) {
    INFO(d.name);
    CHECK(d.relative_drift <= 1e-8);
  }
  // Bound: the radius oscillates without escaping or plunging.
  double rmin = 1e9, rmax = 0.0;
  for (const auto& q : tr.samples) rmin = std::min(rmin, q.p.x[1]), rmax = std::max(rmax, q.p.x[1]);
  CHECK(rmin > 7.0);
  CHECK(rmax < 9.0);
  CHECK(geodesic_residual(tr, *s) <= 1e-6);

  const auto control_drift =
      monitor(tr, multivector_monitors({killing_field(metric, "radial_control")}, s)).front();
  CHECK(control_drift.name == "radial_control");
  CHECK(control_drift.relative_drift > 1e-3);
}

TEST_CASE("fixed-step RK4 converges at fourth order") {
  const auto s = gravitational_structure(metric_catalog("kerr"));
  const ConvergenceStudy c = convergence_study(s, kerr_bound_orbit(), 20.0, 1.0);
  REQUIRE(c.steps.size() == 3);
  CHECK(c.steps[1] == doctest::Approx(0.5));
  CHECK(c.ratio >= 12.0);
  CHECK(c.ratio <= 20.0);
}

TEST_CASE("trajectory CSV") {
  const auto metric = metric_catalog("schwarzschild");
  const auto s = gravitational_structure(metric);
  PhasePoint p;
  p.x << 0.0, 10.0, 1.0, 0.0;
  p.v << 0.0, 0.0, 0.02;
  StepControl control;
  control.method = Integrator::Rk4;
  control.initial_step = 0.1;
  control.sample_interval = 0.5;
  const Trajectory tr = integrate(s, p, 5.0, control, multivector_monitors({killing_field(metric, "dt")}, s));
  CHECK(tr.samples.size() == 11);
  std::ostringstream os;
  write_csv(os, tr);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "s,x0,x1,x2,x3,v1,v2,v3,dt");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    const auto cells = split(line);
    REQUIRE(cells.size() == 9);
    CHECK(std::stod(cells[0]) == doctest::Approx(0.5 * static_cast<double>(rows)));
    ++rows;
  }
  CHECK(rows == tr.samples.size());
  // Values are written with round-trip precision.
  CHECK(std::stod(split(os.str().substr(os.str().find('\n') + 1))[2]) == tr.samples.front().p.x[1]);
}

TEST_CASE("integration is deterministic") {
  const auto metric = metric_catalog("kerr");
  const auto s = gravitational_structure(metric);
  StepControl control;
  const auto a = integrate(s, kerr_bound_orbit(), 10.0, control);
  const auto b = integrate(s, kerr_bound_orbit(), 10.0, control);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].s == b.samples[i].s);
    CHECK(a.samples[i].p.coords() == b.samples[i].p.coords());
  }
  CHECK(a.accepted_steps == b.accepted_steps);
}

TEST_CASE("flow leaving the chart is truncated, not thrown") {
  const auto s = gravitational_structure(metric_catalog("schwarzschild"));
  PhasePoint p;
  p.x << 0.0, 3.0, 1.2, 0.0;
  p.v << -0.3, 0.0, 0.0;
  StepControl control;
  control.tolerance = 1e-8;
  const Trajectory tr = integrate(s, p, 50.0, control);
  CHECK(tr.exited);
  CHECK_FALSE(tr.exit_reason.empty());
  CHECK(tr.samples.back().s < 50.0);
  for (const auto& q : tr.samples) CHECK(s->admissible(q.p));
}

TEST_CASE("charged particle in a magnetic field gyrates") {
  // Uniform B along z: F_12 = B. The fibre flow rotates the velocity at the
  // cyclotron rate q B / (2 m gamma) in coordinate time.
  const auto metric = metric_catalog("minkowski");
  ScaleConstants sc;
  sc.q = 1.0;
  const double B = 0.4;
  const auto s = joined_structure(metric, sc, constant_em_field({{"F12", B}}));
  PhasePoint p;
  p.v << 0.3, 0.0, 0.0;
  const double gamma = 1.0 / std::sqrt(1.0 - 0.09);
  StepControl control;
  control.sample_interval = 0.5;
  const auto tr = integrate(s, p, 30.0, control, multivector_monitors({killing_field(metric, "Ghat")}, s));
  const double rate = sc.q * B / (2.0 * sc.m * gamma);
  for (const auto& q : tr.samples) {
    CHECK(q.p.v.norm() == doctest::Approx(0.3).epsilon(1e-9));
    const double phase = std::atan2(q.p.v[1], q.p.v[0]);
    const double expected = std::remainder(-rate * q.p.x[0], 2.0 * M_PI);
    CHECK(std::abs(std::remainder(phase - expected, 2.0 * M_PI)) < 1e-7);
  }
  CHECK(monitor(tr).front().relative_drift <= 1e-9);
}

TEST_CASE("step control and integrator names") {
  StepControl bad;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  StepControl small;
  small.min_step = 1.0;
  CHECK_THROWS_AS(small.validate(), ParameterError);
  CHECK(integrator_from_string("rk4") == Integrator::Rk4);
  CHECK(to_string(Integrator::Dopri5) == "dopri5");
  CHECK_THROWS_AS(integrator_from_string("euler"), ParameterError);
  const auto s = gravitational_structure(metric_catalog("minkowski"));
  PhasePoint p;
  p.v << 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(integrate(s, p, 1.0, StepControl{}), TimelikeViolation);
}
