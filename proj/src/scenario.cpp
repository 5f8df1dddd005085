#include "hidsym/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include "hidsym/dynamics.hpp"
#include "hidsym/multivector.hpp"
#include "hidsym/symmetry.hpp"

namespace hidsym {

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::vector<std::string>& task_kinds() {
  static const std::vector<std::string> kinds = {"check-structures", "check-killing", "build-symmetry",
                                                 "verify-homomorphism", "integrate", "verify-em"};
  return kinds;
}

bool spherical_chart(const SpacetimeMetric& m) {
  if (m.name() != "minkowski") return true;
  const auto it = m.params().find("spherical");
  return it != m.params().end() && it->second != 0.0;
}

Vec4 vec4(const MultiIndexArray& a) { return Vec4(a(0), a(1), a(2), a(3)); }

/// Parallel map over points; results keep the input order.
template <class R, class Fn>
std::vector<R> sweep(const std::vector<PhasePoint>& points, unsigned threads, Fn fn) {
  std::vector<R> out(points.size());
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
  if (n == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = fn(points[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < points.size(); i += n) out[i] = fn(points[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t k) {
  std::vector<double> c;
  c.reserve(rows.size());
  for (const auto& r : rows) c.push_back(r[k]);
  return c;
}

Mat4 parse_mat4(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 4) throw ConfigError(what + ": expected a 4x4 array");
  Mat4 m;
  for (int a = 0; a < 4; ++a) {
    const Json& row = j[static_cast<std::size_t>(a)];
    if (!row.is_array() || row.size() != 4) throw ConfigError(what + ": expected a 4x4 array");
    for (int b = 0; b < 4; ++b) m(a, b) = row[static_cast<std::size_t>(b)].get<double>();
  }
  return m;
}

void reject_unknown_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

Params parse_params(const Json& j, const std::string& where) {
  if (j.is_null()) return {};
  if (!j.is_object()) throw ConfigError(where + ": params must be an object");
  Params p;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ConfigError(where + ": parameter '" + key + "' must be a number");
    p[key] = value.get<double>();
  }
  return p;
}

StepControl step_control_from(const Json& o) {
  StepControl control;
  control.method = integrator_from_string(o.value("method", std::string("dopri5")));
  control.tolerance = o.value("tolerance", control.tolerance);
  control.initial_step = o.value("step", control.initial_step);
  control.min_step = std::min(control.min_step, control.initial_step);
  control.sample_interval = o.value("sample_interval", control.sample_interval);
  return control;
}

EMField build_em(const EMSpec& spec, const SpacetimeMetric& metric) {
  if (spec.name == "linear") return linear_em_field(spec.C, spec.D);
  return em_field_catalog(spec.name, spec.params, metric);
}

struct Context {
  const ScenarioConfig& config;
  SpacetimeMetric metric;
  StructurePtr gravity;
  std::optional<EMField> em;
  std::vector<PhasePoint> points;

  ResidualReport report(std::string identity, const std::string& tolerance_key, const std::vector<double>& values,
                        Comparison c = Comparison::AtMost) const {
    return summarize(std::move(identity), metric, config.sample.seed, config.tolerance(tolerance_key), values, c);
  }
};

std::vector<std::string> field_names_or_all(const TaskSpec& task, const SpacetimeMetric& metric) {
  if (!task.args.empty()) return task.args;
  return killing_field_names(metric);
}

// --- tasks -------------------------------------------------------------------

TaskResult task_check_structures(const Context& ctx) {
  TaskResult out{"check-structures", {}, {}, {}};
  const PhaseStructure& s = *ctx.gravity;
  const ScaleConstants sc = ctx.config.scales;
  const auto rows = sweep<std::vector<double>>(ctx.points, ctx.config.threads, [&s, &sc](const PhasePoint& p) {
    const PhaseFrame f = s.frame(p);
    const ContactMap cm = contact_map(f);
    const TimeForm tf = time_form(f);
    const double G_hat = std::pow(sc.hbar0 / (sc.m * sc.c0), 2);
    const double norm = std::max({std::abs(cm.d.dot(f.g * cm.d) + f.c * f.c), std::abs(tf.tau.dot(cm.d) - 1.0),
                                  std::abs(-G_hat * tf.tau_hat.dot(f.ginv * tf.tau_hat) - 1.0)});
    const ContactPairReport c = verify_contact_pair(s, p);
    const JacobiPairReport j = verify_jacobi_pair(s, p);
    return std::vector<double>{norm,           c.omega_exact,    c.duality.max(), c.volume_form,
                               j.reeb_bracket, j.lambda_bracket, c.volume_bivector};
  });
  out.reports.push_back(ctx.report("normalization", "normalization", column(rows, 0)));
  out.reports.push_back(ctx.report("contact.omega_exact", "omega_exact", column(rows, 1)));
  out.reports.push_back(ctx.report("contact.duality", "duality", column(rows, 2)));
  ResidualReport vol = ctx.report("contact.volume_form", "volume_form", column(rows, 3), Comparison::AtLeast);
  const auto vb = column(rows, 6);
  vol.details["volume_bivector_min"] =
      std::abs(*std::min_element(vb.begin(), vb.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }));
  out.reports.push_back(vol);
  out.reports.push_back(ctx.report("jacobi.reeb_bracket", "jacobi", column(rows, 4)));
  out.reports.push_back(ctx.report("jacobi.lambda_bracket", "jacobi", column(rows, 5)));
  return out;
}

TaskResult task_check_killing(const Context& ctx, const TaskSpec& task) {
  TaskResult out{"check-killing", {}, {}, {}};
  const auto names = field_names_or_all(task, ctx.metric);
  std::vector<SymmetricMultivectorField> fields;
  for (const auto& n : names) fields.push_back(killing_field(ctx.metric, n, ctx.config.scales));
  const SpacetimeMetric& metric = ctx.metric;
  for (const auto& K : fields) {
    const auto r = sweep<double>(ctx.points, ctx.config.threads,
                                 [&K, &metric](const PhasePoint& p) { return killing_residual(K, metric, p.x).max_abs(); });
    out.reports.push_back(ctx.report("killing." + K.name(), "killing", r));
  }
  if (task.args.empty() && fields.size() > 1) {
    std::vector<SymmetricMultivectorField> brackets;
    for (std::size_t a = 0; a < fields.size(); ++a) {
      for (std::size_t b = a + 1; b < fields.size(); ++b) brackets.push_back(schouten_sym_field(fields[a], fields[b]));
    }
    const auto r = sweep<double>(ctx.points, ctx.config.threads, [&brackets, &metric](const PhasePoint& p) {
      double worst = 0.0;
      for (const auto& B : brackets) worst = std::max(worst, killing_residual(B, metric, p.x).max_abs());
      return worst;
    });
    ResidualReport closure = ctx.report("killing.closure", "killing_closure", r);
    closure.details["pairs"] = brackets.size();
    out.reports.push_back(closure);
  }
  return out;
}

TaskResult task_build_symmetry(const Context& ctx, const TaskSpec& task) {
  TaskResult out{"build-symmetry", {}, {}, {}};
  const StructurePtr s = ctx.gravity;
  for (const auto& name : task.args) {
    const SymmetricMultivectorField K = killing_field(ctx.metric, name, ctx.config.scales);
    const HiddenSymmetry h = hidden_symmetry_from_multivector(K, s, ctx.points);
    if (h.warning) out.warnings.push_back(*h.warning);
    const bool vector = K.degree() == 1;
    const bool reeb = name == "Ghat";
    const auto rows = sweep<std::vector<double>>(ctx.points, ctx.config.threads, [&](const PhasePoint& p) {
      const ConservationResidual cr = conservation_residual(h.projection, *s, p);
      const SymmetryResiduals sr = symmetry_residuals(h.lift, *s, p);
      const Vec4 proj = h.projection(p);
      std::vector<double> row{projectability_residual(h.projection, *s, p).cwiseAbs().maxCoeff(),
                              cr.max(),
                              sr.tau,
                              sr.omega,
                              (h.lift.projection(p) - proj).cwiseAbs().maxCoeff(),
                              0.0,
                              0.0};
      if (vector) row[5] = (proj - vec4(K.components(p.x))).cwiseAbs().maxCoeff();
      if (reeb) row[6] = (h.lift(p) + s->gamma_hat(p)).cwiseAbs().maxCoeff();
      return row;
    });
    const std::string base = "symmetry." + name + ".";
    out.reports.push_back(ctx.report(base + "projectability", "projectability", column(rows, 0)));
    out.reports.push_back(ctx.report(base + "conservation", "conservation", column(rows, 1)));
    out.reports.push_back(ctx.report(base + "lie_tau", "lie_tau", column(rows, 2)));
    out.reports.push_back(ctx.report(base + "lie_omega", "lie_omega", column(rows, 3)));
    out.reports.push_back(ctx.report(base + "lift_projects", "projection", column(rows, 4)));
    if (vector) out.reports.push_back(ctx.report(base + "projection_equals_K", "projection", column(rows, 5)));
    if (reeb) out.reports.push_back(ctx.report(base + "reeb_multiple", "projection", column(rows, 6)));
    for (auto& r : out.reports) {
      if (r.identity.rfind(base, 0) == 0) {
        r.details["degree"] = K.degree();
        r.details["killing"] = h.killing;
        if (h.killing_residual) r.details["killing_residual"] = *h.killing_residual;
      }
    }
  }
  return out;
}

TaskResult task_verify_homomorphism(const Context& ctx, const TaskSpec& task) {
  TaskResult out{"verify-homomorphism", {}, {}, {}};
  const SymmetricMultivectorField K = killing_field(ctx.metric, task.args.at(0), ctx.config.scales);
  const SymmetricMultivectorField L = killing_field(ctx.metric, task.args.at(1), ctx.config.scales);
  const StructurePtr s = ctx.gravity;
  const auto per_point = sweep<HomomorphismPointResidual>(ctx.points, ctx.config.threads, [&](const PhasePoint& p) {
    return verify_homomorphism(K, L, s, std::span<const PhasePoint>(&p, 1)).points.front();
  });
  bool killing_k = true;
  bool killing_l = true;
  for (const PhasePoint& p : ctx.points) {
    killing_k = killing_k && killing_residual(K, ctx.metric, p.x).max_abs() < kKillingTolerance;
    killing_l = killing_l && killing_residual(L, ctx.metric, p.x).max_abs() < kKillingTolerance;
  }
  auto pick = [&per_point](double HomomorphismPointResidual::*field) {
    std::vector<double> v;
    for (const auto& r : per_point) v.push_back(r.*field);
    return v;
  };
  const std::string base = "homomorphism." + K.name() + "," + L.name() + ".";
  if (killing_k && killing_l) {
    out.reports.push_back(ctx.report(base + "lift_bracket", "homomorphism", pick(&HomomorphismPointResidual::lift_bracket)));
    out.reports.push_back(ctx.report(base + "poisson", "poisson", pick(&HomomorphismPointResidual::poisson)));
    out.reports.push_back(
        ctx.report(base + "projected_bracket", "homomorphism", pick(&HomomorphismPointResidual::projected_bracket)));
  } else {
    out.warnings.push_back("non-Killing input: reporting the general bracket identity and correction terms");
  }
  out.reports.push_back(
      ctx.report(base + "general_bracket", "general_bracket", pick(&HomomorphismPointResidual::general_bracket)));
  out.reports.push_back(ctx.report(base + "correction", "homomorphism", pick(&HomomorphismPointResidual::correction)));
  for (auto& r : out.reports) {
    r.details["killing_K"] = killing_k;
    r.details["killing_L"] = killing_l;
  }
  return out;
}

TaskResult task_integrate(const Context& ctx, const TaskSpec& task, const std::filesystem::path& dir,
                          const std::string& stem) {
  TaskResult out{"integrate", {}, {}, {}};
  const Json& o = task.options;
  const bool charged = ctx.em && ctx.config.scales.q != 0.0;
  const StructurePtr s = ctx.em ? joined_structure(ctx.metric, ctx.config.scales, *ctx.em) : ctx.gravity;

  PhasePoint p0;
  if (o.contains("x")) {
    const auto x = o.at("x").get<std::vector<double>>();
    const auto v = o.at("v").get<std::vector<double>>();
    if (x.size() != 4 || v.size() != 3) throw ConfigError("integrate: x needs 4 and v needs 3 components");
    p0.x = Vec4(x[0], x[1], x[2], x[3]);
    p0.v = Vec3(v[0], v[1], v[2]);
  } else {
    if (ctx.points.empty()) throw ConfigError("integrate: no initial point and no samples");
    p0 = ctx.points.front();
  }
  const StepControl control = step_control_from(o);
  const double s_end = o.value("s_end", 100.0);

  std::vector<std::string> names;
  if (o.contains("monitors")) {
    names = o.at("monitors").get<std::vector<std::string>>();
  } else {
    names.push_back("Ghat");
    for (const auto& n : killing_field_names(ctx.metric)) names.push_back(n);
  }
  std::vector<SymmetricMultivectorField> fields;
  for (const auto& n : names) fields.push_back(killing_field(ctx.metric, n, ctx.config.scales));

  const Trajectory traj = integrate(s, p0, s_end, control, multivector_monitors(fields, s));
  if (traj.exited) out.warnings.push_back("trajectory truncated: " + traj.exit_reason);

  const std::filesystem::path csv = dir / (stem + ".csv");
  {
    std::ofstream f(csv);
    if (!f) throw ConfigError("cannot write " + csv.string());
    write_csv(f, traj);
  }
  out.files.push_back(csv.filename().string());

  const auto drift = monitor(traj);
  for (std::size_t k = 0; k < drift.size(); ++k) {
    const auto& K = fields[k];
    bool killing = !charged;
    for (const auto& sample : traj.samples) {
      if (!killing) break;
      killing = killing_residual(K, ctx.metric, sample.p.x).max_abs() < kKillingTolerance;
    }
    const std::vector<double> v{drift[k].relative_drift};
    ResidualReport r = ctx.report("drift." + drift[k].name, "drift", v);
    r.points = traj.samples.size();
    r.details["initial"] = drift[k].initial;
    r.details["max_abs_drift"] = drift[k].max_abs_drift;
    r.details["expected_conserved"] = killing;
    if (!killing) {
      // Reported only; a non-conserved monitor is not a failure.
      r.pass = true;
      r.details["monitor_only"] = true;
    }
    out.reports.push_back(r);
  }
  if (!charged) {
    const std::vector<double> g{geodesic_residual(traj, *s, std::min(1e-12, control.tolerance * 1e-2))};
    ResidualReport r = ctx.report("integrate.geodesic", "geodesic", g);
    r.points = traj.samples.size();
    out.reports.push_back(r);
  }
  for (auto& r : out.reports) {
    r.details["method"] = to_string(traj.method);
    r.details["tolerance"] = traj.tolerance;
    r.details["s_end"] = s_end;
    r.details["samples"] = traj.samples.size();
    r.details["exited"] = traj.exited;
  }
  return out;
}

TaskResult task_verify_em(const Context& ctx) {
  TaskResult out{"verify-em", {}, {}, {}};
  if (!ctx.em) throw ConfigError("verify-em needs an 'em' section");
  const EMField& em = *ctx.em;
  const JoinedStructure joined(ctx.metric, ctx.config.scales, em);
  ScaleConstants neutral = ctx.config.scales;
  neutral.q = 0.0;
  const JoinedStructure uncharged(ctx.metric, neutral, em);
  const PhaseStructure& gravity = *ctx.gravity;

  const auto rows = sweep<std::vector<double>>(ctx.points, ctx.config.threads, [&](const PhasePoint& p) {
    const AcpjReport r = verify_acpj_pair(joined, p);
    const StructureEvaluation a = uncharged.evaluate(p);
    const StructureEvaluation b = gravity.evaluate(p);
    const double q0 = std::max({(a.tau_hat - b.tau_hat).cwiseAbs().maxCoeff(), (a.Omega - b.Omega).cwiseAbs().maxCoeff(),
                                (a.gamma_hat - b.gamma_hat).cwiseAbs().maxCoeff(),
                                (a.Lambda - b.Lambda).cwiseAbs().maxCoeff()});
    return std::vector<double>{em.closedness_residual(p.x),
                               r.omega_closed,
                               r.duality.max(),
                               r.reeb_bracket,
                               r.lambda_bracket,
                               r.volume_form,
                               r.omega_linearity,
                               r.lambda_split,
                               q0,
                               r.reeb_bracket_flipped,
                               r.lambda_bracket_flipped,
                               em.antisymmetry_residual(p.x)};
  });
  out.reports.push_back(ctx.report("em.closedness", "em_closedness", column(rows, 0)));
  out.reports.push_back(ctx.report("em.antisymmetry", "em_antisymmetry", column(rows, 11)));
  out.reports.push_back(ctx.report("em.omega_closed", "em_omega_closed", column(rows, 1)));
  out.reports.push_back(ctx.report("em.duality", "em_duality", column(rows, 2)));
  ResidualReport reeb = ctx.report("em.reeb_bracket", "acpj", column(rows, 3));
  const auto flipped_reeb = column(rows, 9);
  reeb.details["opposite_sign_max"] = *std::max_element(flipped_reeb.begin(), flipped_reeb.end());
  out.reports.push_back(reeb);
  ResidualReport lambda = ctx.report("em.lambda_bracket", "acpj", column(rows, 4));
  const auto flipped_lambda = column(rows, 10);
  lambda.details["opposite_sign_max"] = *std::max_element(flipped_lambda.begin(), flipped_lambda.end());
  out.reports.push_back(lambda);
  out.reports.push_back(ctx.report("em.volume_form", "volume_form", column(rows, 5), Comparison::AtLeast));
  out.reports.push_back(ctx.report("em.omega_linearity", "em_linearity", column(rows, 6)));
  out.reports.push_back(ctx.report("em.lambda_split", "em_linearity", column(rows, 7)));
  out.reports.push_back(ctx.report("em.q0_reduction", "em_q0", column(rows, 8)));
  for (auto& r : out.reports) {
    r.details["em"] = em.name();
    r.details["q"] = ctx.config.scales.q;
  }
  return out;
}

TaskSpec parse_task(const Json& j) {
  TaskSpec t;
  if (j.is_string()) {
    std::istringstream is(j.get<std::string>());
    is >> t.kind;
    for (std::string a; is >> a;) t.args.push_back(a);
  } else if (j.is_object()) {
    if (!j.contains("task") || !j.at("task").is_string()) throw ConfigError("task object needs a string 'task'");
    t.kind = j.at("task").get<std::string>();
    if (j.contains("args")) t.args = j.at("args").get<std::vector<std::string>>();
    for (const auto& [key, value] : j.items()) {
      if (key != "task" && key != "args") t.options[key] = value;
    }
  } else {
    throw ConfigError("tasks must be strings or objects");
  }
  const auto& kinds = task_kinds();
  if (std::find(kinds.begin(), kinds.end(), t.kind) == kinds.end()) {
    throw ConfigError("unknown task '" + t.kind + "'");
  }
  if (t.kind == "verify-homomorphism" && t.args.size() != 2) {
    throw ConfigError("verify-homomorphism needs two field names");
  }
  if (t.kind == "build-symmetry" && t.args.empty()) throw ConfigError("build-symmetry needs a field name");
  const std::vector<std::string> integrate_keys = {"x", "v", "s_end", "method", "tolerance", "step", "sample_interval",
                                                   "monitors"};
  if (t.kind == "integrate") {
    reject_unknown_keys(t.options, integrate_keys, "integrate");
  } else if (!t.options.empty()) {
    throw ConfigError("task '" + t.kind + "' takes no options");
  }
  return t;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << std::setw(2) << j << '\n';
}

}  // namespace

// ---------------------------------------------------------------------------

SampleBox default_box(const SpacetimeMetric& metric) {
  SampleBox b;
  if (spherical_chart(metric)) {
    b = {{{-5.0, 5.0}, {4.0, 12.0}, {0.4, kPi - 0.4}, {0.0, 2.0 * kPi}, {-0.3, 0.3}, {-0.03, 0.03}, {-0.03, 0.03}}};
  } else {
    b = {{{-5.0, 5.0}, {-5.0, 5.0}, {-5.0, 5.0}, {-5.0, 5.0}, {-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}}};
  }
  return b;
}

std::vector<PhasePoint> sample_points(const PhaseStructure& s, const SampleSpec& spec) {
  const SampleBox box = spec.box ? *spec.box : default_box(s.metric());
  std::mt19937_64 rng(spec.seed);
  auto uniform = [&rng](const Range& r) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return r.lo + (r.hi - r.lo) * u;
  };
  std::vector<PhasePoint> out;
  out.reserve(spec.count);
  const std::size_t budget = spec.count * spec.max_attempts_per_point;
  std::size_t attempts = 0;
  while (out.size() < spec.count) {
    if (attempts++ >= budget) {
      throw ConfigError("sample box yields too few admissible points (" + std::to_string(out.size()) + " of " +
                        std::to_string(spec.count) + ")");
    }
    Vec7 y;
    for (int a = 0; a < kPhaseDim; ++a) y[a] = uniform(box[static_cast<std::size_t>(a)]);
    const PhasePoint p = PhasePoint::from_coords(y);
    if (s.admissible(p)) out.push_back(p);
  }
  return out;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t = {
      {"normalization", 1e-12}, {"omega_exact", 1e-6},     {"duality", 1e-9},        {"volume_form", 1e-8},
      {"jacobi", 1e-6},         {"killing", 1e-8},         {"killing_closure", 1e-7}, {"projectability", 1e-9},
      {"conservation", 1e-8},   {"lie_tau", 1e-6},         {"lie_omega", 1e-5},      {"projection", 1e-10},
      {"homomorphism", 1e-5},   {"poisson", 1e-7},         {"general_bracket", 1e-7}, {"drift", 1e-8},
      {"geodesic", 1e-6},       {"em_closedness", 1e-8},   {"em_antisymmetry", 1e-14}, {"em_omega_closed", 1e-7},
      {"em_duality", 1e-8},     {"acpj", 1e-6},            {"em_linearity", 1e-12},  {"em_q0", 0.0},
  };
  return t;
}

double ScenarioConfig::tolerance(const std::string& key) const {
  const auto it = tolerances.find(key);
  if (it != tolerances.end()) return it->second;
  const auto def = default_tolerances().find(key);
  if (def == default_tolerances().end()) throw ConfigError("no tolerance named '" + key + "'");
  return def->second;
}

ScenarioConfig ScenarioConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(j, {"metric", "scales", "em", "sample", "tolerances", "tasks", "output_dir", "threads"}, "config");
  ScenarioConfig c;
  try {
    if (!j.contains("metric")) throw ConfigError("config: missing 'metric'");
    const Json& m = j.at("metric");
    if (m.is_string()) {
      c.metric_name = m.get<std::string>();
    } else {
      reject_unknown_keys(m, {"name", "params"}, "metric");
      c.metric_name = m.at("name").get<std::string>();
      c.metric_params = parse_params(m.value("params", Json()), "metric");
    }

    if (j.contains("scales")) {
      const Json& s = j.at("scales");
      reject_unknown_keys(s, {"c0", "hbar0", "m", "q"}, "scales");
      c.scales.c0 = s.value("c0", c.scales.c0);
      c.scales.hbar0 = s.value("hbar0", c.scales.hbar0);
      c.scales.m = s.value("m", c.scales.m);
      c.scales.q = s.value("q", c.scales.q);
    }

    if (j.contains("em") && !j.at("em").is_null()) {
      const Json& e = j.at("em");
      reject_unknown_keys(e, {"name", "params", "C", "D"}, "em");
      EMSpec spec;
      spec.name = e.at("name").get<std::string>();
      spec.params = parse_params(e.value("params", Json()), "em");
      if (spec.name == "linear") {
        spec.C = parse_mat4(e.at("C"), "em.C");
        if (e.contains("D")) {
          const Json& d = e.at("D");
          if (!d.is_array() || d.size() != 4) throw ConfigError("em.D: expected four 4x4 arrays");
          for (std::size_t n = 0; n < 4; ++n) spec.D[n] = parse_mat4(d[n], "em.D");
        } else {
          spec.D.fill(Mat4::Zero());
        }
      }
      c.em = spec;
    }

    if (j.contains("sample")) {
      const Json& s = j.at("sample");
      reject_unknown_keys(s, {"count", "seed", "ranges"}, "sample");
      c.sample.count = s.value("count", c.sample.count);
      c.sample.seed = s.value("seed", c.sample.seed);
      if (s.contains("ranges")) {
        static const std::array<const char*, kPhaseDim> keys = {"x0", "x1", "x2", "x3", "v1", "v2", "v3"};
        // Missing keys fall back to the metric's default box.
        c.sample.box = default_box(metric_catalog(c.metric_name, c.metric_params));
        const Json& r = s.at("ranges");
        for (const auto& [key, value] : r.items()) {
          const auto it = std::find_if(keys.begin(), keys.end(), [&key](const char* k) { return key == k; });
          if (it == keys.end()) throw ConfigError("sample.ranges: unknown coordinate '" + key + "'");
          const auto v = value.get<std::vector<double>>();
          if (v.size() != 2 || !(v[0] <= v[1])) throw ConfigError("sample.ranges." + key + ": expected [lo, hi]");
          (*c.sample.box)[static_cast<std::size_t>(it - keys.begin())] = {v[0], v[1]};
        }
      }
    }

    if (j.contains("tolerances")) {
      for (const auto& [key, value] : j.at("tolerances").items()) {
        if (default_tolerances().count(key) == 0) throw ConfigError("tolerances: unknown identity '" + key + "'");
        const double t = value.get<double>();
        if (!(t >= 0.0)) throw ConfigError("tolerances." + key + " must be non-negative");
        c.tolerances[key] = t;
      }
    }

    if (!j.contains("tasks") || !j.at("tasks").is_array()) throw ConfigError("config: 'tasks' must be an array");
    for (const Json& t : j.at("tasks")) c.tasks.push_back(parse_task(t));

    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("threads")) {
      const int t = j.at("threads").get<int>();
      if (t < 0) throw ConfigError("threads must be non-negative");
      c.threads = t == 0 ? std::max(1u, std::thread::hardware_concurrency()) : static_cast<unsigned>(t);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  // Semantic validation: metric, scales, EM field, field names.
  const SpacetimeMetric metric = metric_catalog(c.metric_name, c.metric_params);
  c.scales.validate();
  if (c.sample.count == 0) throw ConfigError("sample.count must be positive");
  std::optional<EMField> em;
  if (c.em) em = build_em(*c.em, metric);
  for (const TaskSpec& t : c.tasks) {
    if (t.kind == "verify-em" && !c.em) throw ConfigError("verify-em needs an 'em' section");
    for (const auto& name : t.args) killing_field(metric, name, c.scales);
    if (t.kind == "integrate") {
      try {
        const Json& o = t.options;
        if (o.contains("monitors")) {
          for (const auto& name : o.at("monitors").get<std::vector<std::string>>()) killing_field(metric, name, c.scales);
        }
        step_control_from(o).validate();
        if (!(o.value("s_end", 100.0) > 0.0)) throw ConfigError("integrate: s_end must be positive");
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("integrate: ") + e.what());
      }
    }
  }
  return c;
}

ScenarioConfig ScenarioConfig::from_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

bool TaskResult::pass() const {
  return std::all_of(reports.begin(), reports.end(), [](const ResidualReport& r) { return r.pass; });
}

Json TaskResult::to_json() const {
  Json j;
  j["task"] = task;
  j["pass"] = pass();
  j["reports"] = Json::array();
  for (const auto& r : reports) j["reports"].push_back(hidsym::to_json(r));
  if (!files.empty()) j["files"] = files;
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

Json RunResult::to_json() const {
  Json j;
  j["exit_code"] = exit_code;
  j["pass"] = exit_code == kExitPass;
  j["tasks"] = Json::array();
  for (const auto& t : tasks) j["tasks"].push_back(t.to_json());
  return j;
}

RunResult run_scenario(const ScenarioConfig& config, const std::filesystem::path& output_dir) {
  const SpacetimeMetric metric = metric_catalog(config.metric_name, config.metric_params);
  Context ctx{config, metric, gravitational_structure(metric, config.scales), std::nullopt, {}};
  if (config.em) ctx.em = build_em(*config.em, metric);
  ctx.points = sample_points(*ctx.gravity, config.sample);
  if (ctx.em) {
    std::vector<Vec4> xs;
    for (const auto& p : ctx.points) xs.push_back(p.x);
    ctx.em->require_closed(xs);
  }

  std::filesystem::create_directories(output_dir);
  RunResult run;
  run.output_dir = output_dir;
  for (std::size_t i = 0; i < config.tasks.size(); ++i) {
    const TaskSpec& t = config.tasks[i];
    std::ostringstream stem;
    stem << std::setw(2) << std::setfill('0') << (i + 1) << '-' << t.kind;
    TaskResult result;
    if (t.kind == "check-structures") {
      result = task_check_structures(ctx);
    } else if (t.kind == "check-killing") {
      result = task_check_killing(ctx, t);
    } else if (t.kind == "build-symmetry") {
      result = task_build_symmetry(ctx, t);
    } else if (t.kind == "verify-homomorphism") {
      result = task_verify_homomorphism(ctx, t);
    } else if (t.kind == "integrate") {
      result = task_integrate(ctx, t, output_dir, stem.str());
    } else {
      result = task_verify_em(ctx);
    }
    if (!t.args.empty()) {
      for (const auto& a : t.args) result.task += " " + a;
    }
    const std::string file = stem.str() + ".json";
    Json j = result.to_json();
    j["seed"] = config.sample.seed;
    j["metric"] = metric.name();
    j["params"] = metric.params();
    write_json(output_dir / file, j);
    result.files.insert(result.files.begin(), file);
    if (!result.pass()) run.exit_code = kExitResidualFailure;
    run.tasks.push_back(std::move(result));
  }
  write_json(output_dir / "summary.json", run.to_json());
  return run;
}

int run_config_file(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_override,
                    std::ostream& out, std::ostream& err) {
  ScenarioConfig config;
  try {
    config = ScenarioConfig::from_file(config_path);
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  std::filesystem::path dir = "hidsym-out";
  if (out_override) {
    dir = *out_override;
  } else if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    dir = env;
  } else if (config.output_dir) {
    dir = *config.output_dir;
  }

  RunResult result;
  try {
    result = run_scenario(config, dir);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ClosednessError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitResidualFailure;
  }

  for (const auto& t : result.tasks) {
    out << (t.pass() ? "PASS " : "FAIL ") << t.task << '\n';
    for (const auto& r : t.reports) {
      out << "  " << (r.pass ? "ok   " : "FAIL ") << r.identity << "  max=" << r.max_residual
          << (r.comparison == Comparison::AtLeast ? "  min=" + std::to_string(r.min_residual) : std::string())
          << "  tol=" << r.tolerance << '\n';
    }
    for (const auto& w : t.warnings) err << "warning: " << w << '\n';
  }
  out << "reports written to " << result.output_dir.string() << '\n';
  return result.exit_code;
}

std::vector<CatalogEntry> list_catalog(const std::string& kind, const std::optional<std::string>& arg) {
  if (kind == "metrics") return metric_catalog_entries();
  if (kind == "em-fields") return em_field_entries();
  if (kind == "killing-fields") {
    std::vector<std::string> metrics;
    if (arg) {
      metrics.push_back(*arg);
    } else {
      for (const auto& e : metric_catalog_entries()) metrics.push_back(e.name);
    }
    std::vector<CatalogEntry> out;
    for (const auto& name : metrics) {
      const SpacetimeMetric m = metric_catalog(name);
      for (auto e : killing_field_entries(m)) {
        if (!arg) e.name = name + ":" + e.name;
        out.push_back(e);
      }
    }
    return out;
  }
  if (kind == "identities") {
    return {
        {"contact.duality", "Reeb normalization, kernels and mutual inverse of (tau_hat, Omega) and (gamma_hat, Lambda)"},
        {"contact.omega_exact", "Omega = -d tau_hat (finite-difference exterior derivative)"},
        {"contact.volume_form", "tau_hat ^ Omega^3 is nonzero"},
        {"drift.<field>", "relative drift of K(tau_hat) along an integrated motion"},
        {"em.lambda_bracket", "[Lambda, Lambda] = 2 gamma_hat ^ (Lambda# (x) Lambda#)(d tau_hat) for the joined pair"},
        {"em.omega_closed", "d Omega = 0 for the joined 2-form"},
        {"em.q0_reduction", "joined structure with q = 0 equals the gravitational one exactly"},
        {"em.reeb_bracket", "[gamma_hat, Lambda] = -gamma_hat ^ Lambda#(L_gamma_hat tau_hat) for the joined pair"},
        {"homomorphism.<K>,<L>.general_bracket", "Poisson bracket of K(tau_hat), L(tau_hat) with Reeb corrections"},
        {"homomorphism.<K>,<L>.lift_bracket", "[X[K], X[L]] = X[[K, L]] for Killing K, L"},
        {"integrate.geodesic", "integrated track against the second-order geodesic equation"},
        {"jacobi.lambda_bracket", "[Lambda, Lambda] = 2 gamma_hat ^ Lambda"},
        {"jacobi.reeb_bracket", "[gamma_hat, Lambda] = 0"},
        {"killing.<field>", "symmetrized covariant derivative of a Killing multivector vanishes"},
        {"killing.closure", "Schouten brackets of Killing fields are Killing"},
        {"normalization", "g(d, d) = -c^2, tau(d) = 1, -G_hat(tau_hat, tau_hat) = 1"},
        {"symmetry.<field>.conservation", "gamma_hat . tau_hat(X) = 0 for the generalized field of K"},
        {"symmetry.<field>.lie_tau", "L_X tau_hat = 0 for the Hamilton-Jacobi lift"},
        {"symmetry.<field>.projectability", "breve_G0_rho d^0_j X^rho = 0"},
    };
  }
  throw ConfigError("unknown catalog kind '" + kind + "' (expected metrics, killing-fields, em-fields, identities)");
}

}  // namespace hidsym
