#include "hidsym/electromagnetic.hpp"

#include <algorithm>
#include <cmath>

#include "hidsym/multivector.hpp"
#include "phase_util.hpp"

namespace hidsym {

using detail::mat_array;
using detail::point_from;
using detail::to_vector;
using detail::vec_array;

namespace {

constexpr std::array<const char*, 6> kComponentNames = {"F01", "F02", "F03", "F12", "F13", "F23"};
constexpr std::array<std::pair<int, int>, 6> kComponentIndices = {{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

double max_cyclic(const std::array<Mat4, 4>& d) {
  double worst = 0.0;
  for (int l = 0; l < 4; ++l) {
    for (int m = l + 1; m < 4; ++m) {
      for (int n = m + 1; n < 4; ++n) {
        const double c = d[static_cast<std::size_t>(l)](m, n) + d[static_cast<std::size_t>(m)](n, l) +
                         d[static_cast<std::size_t>(n)](l, m);
        worst = std::max(worst, std::abs(c));
      }
    }
  }
  return worst;
}

}  // namespace

EMField::EMField(std::string name, Params params, Eval F, DerivativeEval dF, double closedness_margin, DiffConfig cfg)
    : name_(std::move(name)),
      params_(std::move(params)),
      F_(std::move(F)),
      dF_(std::move(dF)),
      margin_(closedness_margin),
      diff_(cfg) {
  if (!F_) throw ParameterError("EMField: missing evaluator");
  if (!(margin_ > 0.0)) throw ParameterError("EMField: closedness margin must be positive");
  diff_.validate();
}

Mat4 EMField::F(const Vec4& x) const {
  const Mat4 out = F_(x);
  if (!out.allFinite()) throw EvaluationDomainError("EMField '" + name_ + "': non-finite value");
  return out;
}

std::array<Mat4, 4> EMField::dF(const Vec4& x) const {
  if (dF_) return dF_(x);
  std::array<Mat4, 4> d;
  for (std::size_t r = 0; r < 4; ++r) d[r] = partial_derivative(F_, x, r, diff_);
  return d;
}

double EMField::antisymmetry_residual(const Vec4& x) const {
  const Mat4 f = F(x);
  return (f + f.transpose()).cwiseAbs().maxCoeff();
}

double EMField::closedness_residual(const Vec4& x) const { return max_cyclic(dF(x)); }

void EMField::require_closed(std::span<const Vec4> points) const {
  for (const Vec4& x : points) {
    const double r = closedness_residual(x);
    if (!(r <= margin_)) {
      throw ClosednessError("EMField '" + name_ + "' is not closed: |dF| = " + std::to_string(r) + " exceeds " +
                            std::to_string(margin_));
    }
  }
}

EMField constant_em_field(const Params& components) {
  Mat4 F = Mat4::Zero();
  for (const auto& [key, value] : components) {
    const auto it = std::find_if(kComponentNames.begin(), kComponentNames.end(),
                                 [&key](const char* n) { return key == n; });
    if (it == kComponentNames.end()) throw ParameterError("constant EM field: unknown component '" + key + "'");
    if (!std::isfinite(value)) throw ParameterError("constant EM field: component '" + key + "' is not finite");
    const auto [a, b] = kComponentIndices[static_cast<std::size_t>(it - kComponentNames.begin())];
    F(a, b) = value;
    F(b, a) = -value;
  }
  return EMField(
      "constant", components, [F](const Vec4&) { return F; },
      [](const Vec4&) {
        std::array<Mat4, 4> d;
        d.fill(Mat4::Zero());
        return d;
      });
}

EMField coulomb_em_field(double charge) {
  if (!std::isfinite(charge)) throw ParameterError("coulomb EM field: Q must be finite");
  auto F = [charge](const Vec4& x) {
    Mat4 f = Mat4::Zero();
    f(0, 1) = -charge / (x[1] * x[1]);
    f(1, 0) = -f(0, 1);
    return f;
  };
  auto dF = [charge](const Vec4& x) {
    std::array<Mat4, 4> d;
    d.fill(Mat4::Zero());
    d[1](0, 1) = 2.0 * charge / (x[1] * x[1] * x[1]);
    d[1](1, 0) = -d[1](0, 1);
    return d;
  };
  return EMField("coulomb", {{"Q", charge}}, F, dF);
}

EMField linear_em_field(const Mat4& C, const std::array<Mat4, 4>& D, double closedness_margin) {
  if ((C + C.transpose()).cwiseAbs().maxCoeff() > 0.0) throw ParameterError("linear EM field: C is not antisymmetric");
  for (const Mat4& d : D) {
    if ((d + d.transpose()).cwiseAbs().maxCoeff() > 0.0) {
      throw ParameterError("linear EM field: D is not antisymmetric");
    }
  }
  const double r = max_cyclic(D);
  if (r > closedness_margin) {
    throw ClosednessError("linear EM field is not closed: |dF| = " + std::to_string(r));
  }
  auto F = [C, D](const Vec4& x) {
    Mat4 f = C;
    for (std::size_t n = 0; n < 4; ++n) f += x[static_cast<Eigen::Index>(n)] * D[n];
    return f;
  };
  return EMField("linear", {}, F, [D](const Vec4&) { return D; }, closedness_margin);
}

EMField em_field_catalog(const std::string& name, const Params& params, const SpacetimeMetric& metric) {
  if (name == "constant") return constant_em_field(params);
  if (name == "coulomb") {
    const auto sph = metric.params().find("spherical");
    const bool spherical =
        metric.name() != "minkowski" || (sph != metric.params().end() && sph->second != 0.0);
    if (!spherical) throw ParameterError("coulomb EM field needs a (t, r, theta, phi) chart");
    for (const auto& [key, value] : params) {
      if (key != "Q") throw ParameterError("coulomb EM field: unknown parameter '" + key + "'");
      (void)value;
    }
    const auto it = params.find("Q");
    return coulomb_em_field(it == params.end() ? 0.1 : it->second);
  }
  throw ParameterError("unknown EM field '" + name + "'");
}

std::vector<CatalogEntry> em_field_entries() {
  return {
      {"constant", "constant components F01..F23 in the metric chart; closed for any chart"},
      {"coulomb", "radial field F_tr = -Q/r^2 on a (t, r, theta, phi) chart (param Q, default 0.1)"},
      {"linear", "config only: F = C + x^n D_n, rejected unless dF = 0"},
  };
}

// ---------------------------------------------------------------------------

Mat34 em_connection(const PhaseFrame& f, const Mat4& F_hat) {
  const double ca = f.c * f.alpha0;
  const double a2 = f.alpha0 * f.alpha0;
  const Vec4 contracted = F_hat.transpose() * f.breve_delta0;  // F_hat_{rho mu} breve_delta0^rho
  Mat4 bracket = F_hat;                                       // (lambda, mu)
  bracket -= a2 * f.breve_g0 * contracted.transpose();
  return -(f.breve_G_up * bracket.transpose()) / (2.0 * ca);
}

Vec3 lorentz_force(const PhaseFrame& f, const Mat4& F_hat) { return em_connection(f, F_hat) * f.breve_delta0; }

Mat7 em_two_vector(const PhaseFrame& f, const Mat4& F_hat) {
  const Mat34 nu_G = nu_tau(f).forward * f.ginv * (f.scales.hbar0 / f.scales.m);
  Mat7 out = Mat7::Zero();
  out.bottomRightCorner<3, 3>() = nu_G * F_hat * nu_G.transpose();
  return out;
}

// ---------------------------------------------------------------------------

JoinedStructure::JoinedStructure(SpacetimeMetric metric, ScaleConstants scales, EMField em)
    : PhaseStructure(std::move(metric), scales), em_(std::move(em)) {}

std::string JoinedStructure::description() const {
  return "joined structure on " + metric_.name() + " with EM field " + em_.name();
}

Mat4 JoinedStructure::F_hat(const Vec4& x) const { return scales_.q / (2.0 * scales_.hbar0) * em_.F(x); }

Mat34 JoinedStructure::connection(const PhasePoint& p, const PhaseFrame& f) const {
  Mat34 Gamma = PhaseStructure::connection(p, f);
  if (scales_.q != 0.0) Gamma += em_connection(f, F_hat(p.x));
  return Gamma;
}

StructurePtr joined_structure(const SpacetimeMetric& metric, const ScaleConstants& scales, const EMField& em) {
  return std::make_shared<const JoinedStructure>(metric, scales, em);
}

StructureEvaluation joined_structures(const SpacetimeMetric& metric, const ScaleConstants& scales, const EMField& em,
                                      const PhasePoint& p) {
  em.require_closed(std::span<const Vec4>(&p.x, 1));
  return JoinedStructure(metric, scales, em).evaluate(p);
}

double AcpjReport::max() const {
  return std::max({omega_closed, omega_linearity, lambda_split, duality.max(), reeb_bracket, lambda_bracket});
}

AcpjReport verify_acpj_pair(const JoinedStructure& s, const PhasePoint& p, const DiffConfig& cfg) {
  AcpjReport r;
  const StructureEvaluation e = s.evaluate(p);
  const PhaseFrame f = s.frame(p);
  const Vec7 y = p.coords();

  const MultiIndexArray dOmega =
      exterior_derivative_2form([&s](const Vec7& z) { return s.Omega(PhasePoint::from_coords(z)); }, y, cfg);
  r.omega_closed = dOmega.max_abs();
  r.volume_form = top_wedge_coefficient(e.tau_hat, e.Omega);
  r.duality = duality_residuals(e);

  const Mat34 Gamma_g = s.PhaseStructure::connection(p, f);
  Mat7 F_pull = Mat7::Zero();
  F_pull.topLeftCorner<4, 4>() = s.F_hat(p.x);
  r.omega_linearity = (e.Omega - phase_two_form(f, Gamma_g) - F_pull).cwiseAbs().maxCoeff();
  r.lambda_split =
      (e.Lambda - phase_two_vector(f, Gamma_g) - em_two_vector(f, s.F_hat(p.x))).cwiseAbs().maxCoeff();

  // L_gamma tau_hat = i_gamma d tau_hat since tau_hat(gamma_hat) = 1.
  const Mat7 dtau =
      exterior_derivative_1form([&s](const Vec7& z) { return s.tau_hat(PhasePoint::from_coords(z)); }, y, cfg);
  const Vec7 lie_tau = dtau.transpose() * e.gamma_hat;  // (i_X B)_b = X^a B_ab
  const Vec7 lambda_sharp = e.Lambda.transpose() * lie_tau;
  const Mat7 lambda_lambda = e.Lambda.transpose() * dtau * e.Lambda;

  const SkewMultivectorField gamma(
      kPhaseDim, 1, [&s](const std::vector<double>& z) { return vec_array(s.gamma_hat(point_from(z))); }, cfg);
  const SkewMultivectorField Lambda(
      kPhaseDim, 2, [&s](const std::vector<double>& z) { return mat_array(s.Lambda(point_from(z))); }, cfg);
  const std::vector<double> yv = to_vector(y);
  const MultiIndexArray g = vec_array(e.gamma_hat);

  const MultiIndexArray gl = schouten_skew(gamma, Lambda, yv);
  const MultiIndexArray gl_rhs = wedge(g, vec_array(lambda_sharp));
  r.reeb_bracket = max_abs_diff(gl, gl_rhs * -1.0);
  r.reeb_bracket_flipped = max_abs_diff(gl, gl_rhs);

  const MultiIndexArray ll = schouten_skew(Lambda, Lambda, yv);
  const MultiIndexArray ll_rhs = wedge(g, mat_array(lambda_lambda));
  r.lambda_bracket = max_abs_diff(ll, ll_rhs * 2.0);
  r.lambda_bracket_flipped = max_abs_diff(ll, ll_rhs * -2.0);
  return r;
}

}  // namespace hidsym
