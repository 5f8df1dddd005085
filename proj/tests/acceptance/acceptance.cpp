// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failing criteria (capped at 1), so ctest fails if any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "hidsym/dynamics.hpp"
#include "hidsym/electromagnetic.hpp"
#include "hidsym/scenario.hpp"

using namespace hidsym;

namespace {

const std::vector<std::string> kMetrics{"minkowski", "schwarzschild", "kerr"};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::vector<PhasePoint> points(const PhaseStructure& s, std::size_t n, std::uint64_t seed) {
  SampleSpec spec;
  spec.count = n;
  spec.seed = seed;
  return sample_points(s, spec);
}

int failures = 0;

void run(int id, const std::string& title, double time_limit, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit > 0.0 && secs >= time_limit) {
    out.pass = false;
    out.detail << " [runtime over " << time_limit << " s]";
  }
  if (!out.pass) ++failures;
  std::cout << (out.pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << id << "  " << title << " |"
            << out.detail.str() << " | " << std::fixed << std::setprecision(3) << secs << " s" << std::defaultfloat
            << std::endl;
}

// 1 --------------------------------------------------------------------------
void normalization(Outcome& out) {
  for (const auto& name : kMetrics) {
    const auto s = gravitational_structure(metric_catalog(name));
    double worst = 0.0;
    for (const auto& p : points(*s, 200, 101)) {
      const PhaseFrame f = s->frame(p);
      const ContactMap cm = contact_map(f);
      const TimeForm tf = time_form(f);
      const double c = s->scales().c0;
      const Mat4 G_hat_inv = rescaled_metrics(s->metric(), s->scales(), p.x).G_hat_inv;
      worst = std::max({worst, std::abs(cm.d.dot(f.g * cm.d) + c * c), std::abs(tf.tau.dot(cm.d) - 1.0),
                        std::abs(-tf.tau_hat.dot(G_hat_inv * tf.tau_hat) - 1.0)});
    }
    out.detail << " " << name << "=" << worst;
    out.require(worst <= 1e-12, name + " normalization");
  }
}

// 2 --------------------------------------------------------------------------
void contact_pair(Outcome& out) {
  for (const auto& name : kMetrics) {
    const auto s = gravitational_structure(metric_catalog(name));
    double exact = 0.0, duality = 0.0, volume = 1e300;
    for (const auto& p : points(*s, 50, 102)) {
      const ContactPairReport r = verify_contact_pair(*s, p);
      exact = std::max(exact, r.omega_exact);
      duality = std::max(duality, r.duality.max());
      volume = std::min(volume, std::abs(r.volume_form));
    }
    out.detail << " " << name << " exact=" << exact << " dual=" << duality << " vol>=" << volume;
    out.require(exact <= 1e-6 && duality <= 1e-9 && volume > 1e-8, name);
  }
}

// 3 --------------------------------------------------------------------------
void jacobi_pair(Outcome& out) {
  for (const auto& name : kMetrics) {
    const auto s = gravitational_structure(metric_catalog(name));
    double worst = 0.0;
    for (const auto& p : points(*s, 20, 103)) {
      const JacobiPairReport r = verify_jacobi_pair(*s, p);
      worst = std::max({worst, r.reeb_bracket, r.lambda_bracket});
    }
    out.detail << " " << name << "=" << worst;
    out.require(worst <= 1e-6, name);
  }
}

// 4 --------------------------------------------------------------------------
// Oracle: canonical bracket on T*M of the momentum polynomials, by differences.
void schouten_oracle(Outcome& out) {
  using Eight = Eigen::Matrix<double, 8, 1>;
  auto momentum = [](const SymmetricMultivectorField& K) {
    return [K](const Eight& z) {
      const MultiIndexArray c = K.components(z.head<4>());
      double total = 0.0;
      for (std::size_t flat = 0; flat < c.size(); ++flat) {
        double term = c.data()[flat];
        for (std::size_t i : c.unflatten(flat)) term *= z[4 + static_cast<Eigen::Index>(i)];
        total += term;
      }
      return total;
    };
  };
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> ux(-3.0, 3.0), up(-1.0, 1.0);
  for (auto [k, l] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 2}}) {
    const auto K = polynomial_field(k, 1000 + static_cast<std::uint64_t>(k));
    const auto L = polynomial_field(l, 2000 + static_cast<std::uint64_t>(l));
    const auto F = momentum(K), G = momentum(L);
    const auto B = schouten_sym_field(K, L);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      Eight z;
      for (int a = 0; a < 4; ++a) z[a] = ux(rng);
      for (int a = 4; a < 8; ++a) z[a] = up(rng);
      double oracle = 0.0;
      for (std::size_t mu = 0; mu < 4; ++mu) {
        oracle += partial_derivative(F, z, 4 + mu) * partial_derivative(G, z, mu) -
                  partial_derivative(F, z, mu) * partial_derivative(G, z, 4 + mu);
      }
      const double got = pi_star(B, z.head<4>(), z.tail<4>());
      worst = std::max(worst, std::abs(got - oracle) / std::max(1.0, std::abs(oracle)));
    }
    out.detail << " (" << k << "," << l << ")=" << worst;
    out.require(worst <= 1e-8, "degrees " + std::to_string(k) + "," + std::to_string(l));
  }
}

// 5 --------------------------------------------------------------------------
void killing_suite(Outcome& out) {
  for (const auto& name : kMetrics) {
    const auto metric = metric_catalog(name);
    const auto s = gravitational_structure(metric);
    const auto pts = points(*s, 20, 105);
    const auto names = killing_field_names(metric);
    double worst = 0.0, closure = 0.0;
    for (const auto& kn : names) {
      const auto K = killing_field(metric, kn);
      for (const auto& p : pts) worst = std::max(worst, killing_residual(K, metric, p.x).max_abs());
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) {
        const auto B = schouten_sym_field(killing_field(metric, names[i]), killing_field(metric, names[j]));
        for (std::size_t n = 0; n < 5; ++n) closure = std::max(closure, killing_residual(B, metric, pts[n].x).max_abs());
      }
    }
    out.detail << " " << name << "(" << names.size() << ") K=" << worst << " closure=" << closure;
    out.require(worst <= 1e-8 && closure <= 1e-7, name);
  }
  out.require(killing_field_names(metric_catalog("minkowski")).size() == 10, "ten minkowski fields");
}

// 6 --------------------------------------------------------------------------
void hidden_symmetry_suite(Outcome& out) {
  double proj = 0.0, cons = 0.0, lie = 0.0, k1 = 0.0, reeb = 0.0;
  for (const auto& name : kMetrics) {
    const auto metric = metric_catalog(name);
    const auto s = gravitational_structure(metric);
    const auto pts = points(*s, 50, 106);
    for (const auto& kn : killing_field_names(metric)) {
      const auto K = killing_field(metric, kn);
      const HiddenSymmetry h = hidden_symmetry_from_multivector(K, s);
      for (const auto& p : pts) {
        proj = std::max(proj, projectability_residual(h.projection, *s, p).cwiseAbs().maxCoeff());
        cons = std::max(cons, conservation_residual(h.projection, *s, p).max());
        lie = std::max(lie, symmetry_residuals(h.lift, *s, p).tau);
        if (K.degree() == 1) {
          const MultiIndexArray c = K.components(p.x);
          for (int a = 0; a < 4; ++a) k1 = std::max(k1, std::abs(h.projection(p)[a] - c(a)));
        }
      }
    }
    const HiddenSymmetry g = hidden_symmetry_from_multivector(killing_field(metric, "Ghat"), s);
    for (const auto& p : pts) reeb = std::max(reeb, (g.lift(p) - g.generator(p) * s->gamma_hat(p)).cwiseAbs().maxCoeff());
  }
  out.detail << " proj=" << proj << " cons=" << cons << " L_X tau=" << lie << " k1=" << k1 << " Ghat=" << reeb;
  out.require(proj <= 1e-9, "projectability");
  out.require(cons <= 1e-8, "conservation");
  out.require(lie <= 1e-6, "Lie derivative");
  out.require(k1 <= 1e-10, "k = 1 projection");
  out.require(reeb <= 1e-10, "Reeb multiple");
}

// 7 --------------------------------------------------------------------------
void reeb_identity(Outcome& out) {
  const auto metric = metric_catalog("kerr");
  const auto s = gravitational_structure(metric);
  const auto G = unscaled_inverse_metric_field(metric, s->scales());
  const auto pts = points(*s, 20, 107);
  double plus = 0.0, minus = 1e300, killing_min = 1e300;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto K = polynomial_field(2, 7000 + i);
    const auto& p = pts[i];
    killing_min = std::min(killing_min, killing_residual(K, metric, p.x).max_abs());
    const PhaseFunction f = phase_function_from_multivector(K, s);
    const double lhs = f.gradient_finite_difference(p).dot(s->gamma_hat(p));
    const double rhs = 0.5 * contract_all(schouten_sym(K, G, p.x), s->tau_hat(p).head<4>());
    plus = std::max(plus, std::abs(lhs - rhs));
    minus = std::min(minus, std::abs(lhs + rhs));
  }
  out.detail << " sign=+ residual=" << plus << " opposite>=" << minus << " min|K residual|=" << killing_min;
  out.require(killing_min > 1e-3, "fields are non-Killing");
  out.require(plus <= 1e-7, "+ sign");
  out.require(minus > 1e-7, "sign determined");
}

// 8 --------------------------------------------------------------------------
void homomorphism(Outcome& out) {
  struct Pair {
    std::string metric, K, L;
  };
  for (const auto& [m, k, l] :
       {Pair{"kerr", "dt", "dphi"}, Pair{"minkowski", "boost_x", "dx"}, Pair{"kerr", "carter", "dt"}}) {
    const auto metric = metric_catalog(m);
    const auto s = gravitational_structure(metric);
    const auto rep = verify_homomorphism(killing_field(metric, k), killing_field(metric, l), s, points(*s, 25, 108));
    const double worst = rep.max().lift_bracket;
    out.detail << " " << m << "[" << k << "," << l << "]=" << worst;
    out.require(rep.points.size() == 25 && worst <= 1e-5, m + " " + k + " " + l);
  }
}

// 9 --------------------------------------------------------------------------
void dynamics(Outcome& out) {
  const auto metric = metric_catalog("kerr");
  const auto s = gravitational_structure(metric);
  PhasePoint p;
  p.x << 0.0, 8.0, 1.2, 0.3;
  p.v << 0.01, 0.004, 0.046;
  std::vector<SymmetricMultivectorField> fields;
  for (const auto& n : {"Ghat", "dt", "dphi", "carter"}) fields.push_back(killing_field(metric, n));
  StepControl control;
  control.tolerance = 1e-10;
  const Trajectory tr = integrate(s, p, 100.0, control, multivector_monitors(fields, s));
  out.require(!tr.exited, "orbit stays in the chart");
  for (const auto& d : monitor(tr)) {
    out.detail << " " << d.name << "=" << d.relative_drift;
    out.require(d.relative_drift <= 1e-8, d.name + " drift");
  }
  const auto control_drift = monitor(tr, multivector_monitors({killing_field(metric, "radial_control")}, s)).front();
  out.detail << " radial_control=" << control_drift.relative_drift;
  out.require(control_drift.relative_drift > 1e-3, "non-Killing monitor drifts");
  const ConvergenceStudy c = convergence_study(s, p, 20.0, 1.0);
  out.detail << " rk4 ratio=" << c.ratio;
  out.require(c.ratio >= 12.0 && c.ratio <= 20.0, "fourth-order convergence");
}

// 10 -------------------------------------------------------------------------
void em_suite(Outcome& out) {
  const auto metric = metric_catalog("minkowski");
  ScaleConstants sc;
  sc.q = 0.5;
  const EMField em = constant_em_field({{"F01", 0.3}, {"F02", -0.1}, {"F03", 0.05}, {"F12", 0.2}, {"F13", -0.15}, {"F23", 0.4}});
  const JoinedStructure js(metric, sc, em);
  const auto grav = gravitational_structure(metric, sc);
  const auto pts = points(*grav, 20, 110);
  double closed = 0.0, duality = 0.0, acpj = 0.0;
  for (const auto& p : pts) {
    const AcpjReport r = verify_acpj_pair(js, p);
    closed = std::max(closed, r.omega_closed);
    duality = std::max(duality, r.duality.max());
    acpj = std::max({acpj, r.reeb_bracket, r.lambda_bracket});
  }
  ScaleConstants neutral = sc;
  neutral.q = 0.0;
  const auto joined0 = joined_structure(metric, neutral, em);
  const auto grav0 = gravitational_structure(metric, neutral);
  bool exact = true;
  for (const auto& p : pts) {
    const auto a = joined0->evaluate(p), b = grav0->evaluate(p);
    exact = exact && a.tau_hat == b.tau_hat && a.Omega == b.Omega && a.gamma_hat == b.gamma_hat && a.Lambda == b.Lambda;
  }
  out.detail << " dOmega=" << closed << " duality=" << duality << " acpj=" << acpj << " q0_exact=" << exact;
  out.require(closed <= 1e-7, "d Omega");
  out.require(duality <= 1e-8, "duality");
  out.require(acpj <= 1e-6, "acpj brackets");
  out.require(exact, "q = 0 reduction");
}

// 11 -------------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void determinism(Outcome& out) {
  const auto base = std::filesystem::temp_directory_path() / "hidsym_acceptance_determinism";
  std::filesystem::remove_all(base);
  std::size_t compared = 0;
  for (const char* file : {"minkowski_structures.json", "kerr_carter.json", "minkowski_em.json"}) {
    const auto config = ScenarioConfig::from_file(std::filesystem::path(HIDSYM_CONFIG_DIR) / file);
    const auto a = base / (std::string(file) + ".a"), b = base / (std::string(file) + ".b");
    run_scenario(config, a);
    run_scenario(config, b);
    for (const auto& entry : std::filesystem::directory_iterator(a)) {
      ++compared;
      out.require(slurp(entry.path()) == slurp(b / entry.path().filename()),
                  std::string(file) + "/" + entry.path().filename().string());
    }
  }
  out.detail << " files compared=" << compared;
  out.require(compared > 0, "reports written");
  std::filesystem::remove_all(base);
}

}  // namespace

int main() {
  std::cout << std::setprecision(3);
  run(1, "normalization", 5.0, normalization);
  run(2, "contact pair", 30.0, contact_pair);
  run(3, "Jacobi pair", 0.0, jacobi_pair);
  run(4, "Schouten oracle", 0.0, schouten_oracle);
  run(5, "Killing suite", 0.0, killing_suite);
  run(6, "hidden-symmetry suite", 0.0, hidden_symmetry_suite);
  run(7, "Reeb derivative sign", 0.0, reeb_identity);
  run(8, "homomorphism suite", 0.0, homomorphism);
  run(9, "dynamics suite", 60.0, dynamics);
  run(10, "EM suite", 0.0, em_suite);
  run(11, "determinism", 0.0, determinism);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILING") << std::endl;
  return failures == 0 ? 0 : 1;
}
