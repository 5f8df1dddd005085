#include "hidsym/phase_space.hpp"

#include <cmath>
#include <sstream>

#include "hidsym/multivector.hpp"
#include "phase_util.hpp"

namespace hidsym {

using detail::basis7;
using detail::mat_array;
using detail::point_from;
using detail::to_vector;
using detail::vec_array;
using detail::wedge7;

Vec7 PhasePoint::coords() const {
  Vec7 y;
  y << x, v;
  return y;
}

PhasePoint PhasePoint::from_coords(const Vec7& y) {
  PhasePoint p;
  p.x = y.head<4>();
  p.v = y.tail<3>();
  return p;
}

PhaseFrame phase_frame(const SpacetimeMetric& metric, const ScaleConstants& scales, const PhasePoint& p) {
  scales.validate();
  PhaseFrame f;
  f.scales = scales;
  f.c = scales.c0;
  f.g = metric.g(p.x);
  f.ginv = f.g.inverse();
  f.breve_delta0 << 1.0, p.v;
  f.breve_delta.setZero();
  for (int i = 0; i < 3; ++i) {
    f.breve_delta(i, i + 1) = 1.0;
    f.breve_delta(i, 0) = -p.v[i];
  }
  f.breve_g0 = f.g * f.breve_delta0;
  f.hat_g00 = f.breve_g0.dot(f.breve_delta0);
  if (!(f.hat_g00 < 0.0)) {
    std::ostringstream os;
    os << "phase point not timelike: g(breve_delta0, breve_delta0) = " << f.hat_g00;
    throw TimelikeViolation(os.str(), f.hat_g00);
  }
  f.alpha0 = 1.0 / std::sqrt(-f.hat_g00);
  const double k = scales.m / scales.hbar0;
  f.hat_G00 = k * f.hat_g00;
  f.breve_G0 = k * f.breve_g0;
  f.breve_G_up = f.breve_delta * (f.ginv / k);
  const Mat4 G = k * f.g;
  for (int i = 0; i < 3; ++i) {
    f.breve_G_dn.row(i) = G.row(i + 1) + f.alpha0 * f.alpha0 * f.breve_g0[i + 1] * f.breve_G0.transpose();
  }
  return f;
}

ContactMap contact_map(const PhaseFrame& f) {
  ContactMap d;
  d.d = f.c * f.alpha0 * f.breve_delta0;
  d.d_hat = f.scales.hbar0 / (f.scales.m * f.c * f.c) * d.d;
  return d;
}

TimeForm time_form(const PhaseFrame& f) {
  TimeForm t;
  t.tau = -(f.alpha0 / f.c) * f.breve_g0;
  t.tau_hat = f.scales.m * f.c * f.c / f.scales.hbar0 * t.tau;
  return t;
}

NuTau nu_tau(const PhaseFrame& f) {
  const double ca = f.c * f.alpha0;
  const Vec4 tau = time_form(f).tau;
  NuTau n;
  n.forward = f.breve_delta / ca;
  for (int i = 0; i < 3; ++i) {
    for (int l = 0; l < 4; ++l) {
      n.inverse(l, i) = ca * ((l == i + 1 ? 1.0 : 0.0) - ca * tau[i + 1] * f.breve_delta0[l]);
    }
  }
  return n;
}

Mat4 complementary_contact_map(const PhaseFrame& f) {
  return Mat4::Identity() - contact_map(f).d * time_form(f).tau.transpose();
}

Mat34 phase_connection(const std::array<Mat4, 4>& chr, const PhaseFrame& f) {
  // K_lambda^rho_sigma = -Gamma^rho_{lambda sigma}
  Mat4 K_dot;  // (rho, lambda) -> K_lambda^rho_sigma breve_delta0^sigma
  for (int rho = 0; rho < 4; ++rho) K_dot.row(rho) = -(chr[static_cast<std::size_t>(rho)] * f.breve_delta0).transpose();
  return f.breve_delta * K_dot;
}

Mat34 phase_connection(const SpacetimeMetric& metric, const PhaseFrame& f, const Vec4& x) {
  metric.require_domain(x);
  return phase_connection(christoffel_symbols(f.ginv, metric.dg(x)), f);
}

DynamicalConnection dynamical_connection(const PhaseFrame& f, const Mat34& Gamma) {
  DynamicalConnection d;
  d.gamma = Gamma * f.breve_delta0;
  const double ca = f.c * f.alpha0;
  d.full << ca * f.breve_delta0, ca * d.gamma;
  d.gamma_hat = f.scales.hbar0 / (f.scales.m * f.c * f.c) * d.full;
  return d;
}

Mat7 phase_two_form(const PhaseFrame& f, const Mat34& Gamma) {
  Mat7 Omega = Mat7::Zero();
  const double ca = f.c * f.alpha0;
  for (int i = 0; i < 3; ++i) {
    Vec7 theta = basis7(4 + i);
    for (int l = 0; l < 4; ++l) theta[l] -= Gamma(i, l);
    Vec7 dmu = Vec7::Zero();
    for (int mu = 0; mu < 4; ++mu) dmu[mu] = f.breve_G_dn(i, mu);
    Omega += ca * wedge7(theta, dmu);
  }
  return Omega;
}

Mat7 phase_two_vector(const PhaseFrame& f, const Mat34& Gamma) {
  Mat7 Lambda = Mat7::Zero();
  const double ca = f.c * f.alpha0;
  for (int j = 0; j < 3; ++j) {
    Vec7 horizontal = Vec7::Zero();
    for (int l = 0; l < 4; ++l) {
      horizontal[l] += f.breve_G_up(j, l);
      for (int i = 0; i < 3; ++i) horizontal[4 + i] += f.breve_G_up(j, l) * Gamma(i, l);
    }
    Lambda += wedge7(horizontal, basis7(4 + j)) / ca;
  }
  return Lambda;
}

// ---------------------------------------------------------------------------

PhaseStructure::PhaseStructure(SpacetimeMetric metric, ScaleConstants scales)
    : metric_(std::move(metric)), scales_(scales) {
  scales_.validate();
}

std::string PhaseStructure::description() const { return "gravitational structure on " + metric_.name(); }

bool PhaseStructure::admissible(const PhasePoint& p) const {
  if (!metric_.in_domain(p.x)) return false;
  Vec4 d;
  d << 1.0, p.v;
  return d.dot(metric_.g(p.x) * d) < 0.0;
}

PhaseFrame PhaseStructure::frame(const PhasePoint& p) const {
  metric_.require_domain(p.x);
  return phase_frame(metric_, scales_, p);
}

Mat34 PhaseStructure::connection(const PhasePoint& p, const PhaseFrame& f) const {
  return phase_connection(metric_, f, p.x);
}

StructureEvaluation PhaseStructure::evaluate(const PhasePoint& p) const {
  const PhaseFrame f = frame(p);
  const Mat34 Gamma = connection(p, f);
  StructureEvaluation s;
  s.tau_hat.setZero();
  s.tau_hat.head<4>() = time_form(f).tau_hat;
  s.Omega = phase_two_form(f, Gamma);
  s.gamma_hat = dynamical_connection(f, Gamma).gamma_hat;
  s.Lambda = phase_two_vector(f, Gamma);
  return s;
}

Vec7 PhaseStructure::tau_hat(const PhasePoint& p) const {
  Vec7 t = Vec7::Zero();
  t.head<4>() = time_form(frame(p)).tau_hat;
  return t;
}

Vec7 PhaseStructure::gamma_hat(const PhasePoint& p) const {
  const PhaseFrame f = frame(p);
  return dynamical_connection(f, connection(p, f)).gamma_hat;
}

Mat7 PhaseStructure::Omega(const PhasePoint& p) const {
  const PhaseFrame f = frame(p);
  return phase_two_form(f, connection(p, f));
}

Mat7 PhaseStructure::Lambda(const PhasePoint& p) const {
  const PhaseFrame f = frame(p);
  return phase_two_vector(f, connection(p, f));
}

Mat47 PhaseStructure::tau_hat_jacobian(const PhasePoint& p) const {
  const PhaseFrame f = frame(p);
  const MetricDerivative dg = metric_.dg(p.x);
  const double kappa = scales_.m * f.c / scales_.hbar0;
  const double a3 = f.alpha0 * f.alpha0 * f.alpha0;
  Mat47 J;
  for (int rho = 0; rho < 4; ++rho) {
    const Mat4& d = dg[static_cast<std::size_t>(rho)];
    const Vec4 dg0 = d * f.breve_delta0;
    const double dalpha = 0.5 * a3 * f.breve_delta0.dot(dg0);
    J.col(rho) = -kappa * (dalpha * f.breve_g0 + f.alpha0 * dg0);
  }
  for (int j = 0; j < 3; ++j) {
    const double dalpha = a3 * f.breve_g0[j + 1];
    J.col(4 + j) = -kappa * (dalpha * f.breve_g0 + f.alpha0 * f.g.col(j + 1));
  }
  return J;
}

StructurePtr gravitational_structure(const SpacetimeMetric& metric, const ScaleConstants& scales) {
  return std::make_shared<const PhaseStructure>(metric, scales);
}

// ---------------------------------------------------------------------------

Mat7 exterior_derivative_1form(const OneFormField& beta, const Vec7& y, const DiffConfig& cfg) {
  Mat7 d;  // d(a, b) = d_a beta_b
  for (int a = 0; a < kPhaseDim; ++a) d.row(a) = partial_derivative(beta, y, a, cfg).transpose();
  return d - d.transpose();
}

MultiIndexArray exterior_derivative_2form(const TwoFormField& beta, const Vec7& y, const DiffConfig& cfg) {
  std::array<Mat7, kPhaseDim> d;
  for (int a = 0; a < kPhaseDim; ++a) d[static_cast<std::size_t>(a)] = partial_derivative(beta, y, a, cfg);
  MultiIndexArray out = MultiIndexArray::uniform(3, kPhaseDim);
  for (int a = 0; a < kPhaseDim; ++a) {
    for (int b = 0; b < kPhaseDim; ++b) {
      for (int c = 0; c < kPhaseDim; ++c) {
        out(a, b, c) = d[static_cast<std::size_t>(a)](b, c) + d[static_cast<std::size_t>(b)](c, a) +
                       d[static_cast<std::size_t>(c)](a, b);
      }
    }
  }
  return out;
}

double pfaffian(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (n != a.cols()) throw DimensionMismatch("pfaffian: matrix not square");
  if (n % 2 != 0) return 0.0;
  if (n == 0) return 1.0;
  double total = 0.0;
  for (Eigen::Index j = 1; j < n; ++j) {
    if (a(0, j) == 0.0) continue;
    Eigen::MatrixXd minor(n - 2, n - 2);
    Eigen::Index r = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (i == j) continue;
      Eigen::Index c = 0;
      for (Eigen::Index k = 1; k < n; ++k) {
        if (k == j) continue;
        minor(r, c++) = a(i, k);
      }
      ++r;
    }
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    total += sign * a(0, j) * pfaffian(minor);
  }
  return total;
}

double top_wedge_coefficient(const Vec7& one, const Mat7& two) {
  double total = 0.0;
  for (int a = 0; a < kPhaseDim; ++a) {
    if (one[a] == 0.0) continue;
    Eigen::MatrixXd minor(6, 6);
    int r = 0;
    for (int i = 0; i < kPhaseDim; ++i) {
      if (i == a) continue;
      int c = 0;
      for (int k = 0; k < kPhaseDim; ++k) {
        if (k == a) continue;
        minor(r, c++) = two(i, k);
      }
      ++r;
    }
    total += (a % 2 == 0 ? 1.0 : -1.0) * one[a] * pfaffian(minor);
  }
  return 6.0 * total;
}

double DualityResiduals::max() const {
  return std::max({reeb_normalization, reeb_kernel, lambda_kernel, lambda_inverse, omega_inverse});
}

DualityResiduals duality_residuals(const StructureEvaluation& s) {
  DualityResiduals r;
  r.reeb_normalization = std::abs(s.tau_hat.dot(s.gamma_hat) - 1.0);
  r.reeb_kernel = (s.gamma_hat.transpose() * s.Omega).cwiseAbs().maxCoeff();
  r.lambda_kernel = (s.tau_hat.transpose() * s.Lambda).cwiseAbs().maxCoeff();
  r.lambda_inverse = (s.Lambda * s.Omega * s.Lambda - s.Lambda).cwiseAbs().maxCoeff();
  r.omega_inverse = (s.Omega * s.Lambda * s.Omega - s.Omega).cwiseAbs().maxCoeff();
  return r;
}

ContactPairReport verify_contact_pair(const PhaseStructure& s, const PhasePoint& p, const DiffConfig& cfg) {
  ContactPairReport r;
  const StructureEvaluation e = s.evaluate(p);
  const Mat7 dtau = exterior_derivative_1form(
      [&s](const Vec7& y) { return s.tau_hat(PhasePoint::from_coords(y)); }, p.coords(), cfg);
  r.omega_exact = (e.Omega + dtau).cwiseAbs().maxCoeff();
  r.volume_form = top_wedge_coefficient(e.tau_hat, e.Omega);
  r.volume_bivector = top_wedge_coefficient(e.gamma_hat, e.Lambda);
  r.duality = duality_residuals(e);
  return r;
}

JacobiPairReport verify_jacobi_pair(const PhaseStructure& s, const PhasePoint& p, const DiffConfig& cfg) {
  const SkewMultivectorField gamma(
      kPhaseDim, 1, [&s](const std::vector<double>& y) { return vec_array(s.gamma_hat(point_from(y))); }, cfg);
  const SkewMultivectorField Lambda(
      kPhaseDim, 2, [&s](const std::vector<double>& y) { return mat_array(s.Lambda(point_from(y))); }, cfg);
  const std::vector<double> y = to_vector(p.coords());
  JacobiPairReport r;
  r.reeb_bracket = schouten_skew(gamma, Lambda, y).max_abs();
  const MultiIndexArray ll = schouten_skew(Lambda, Lambda, y);
  const MultiIndexArray rhs = wedge(gamma.components(y), Lambda.components(y)) * 2.0;
  r.lambda_bracket = max_abs_diff(ll, rhs);
  return r;
}

JacobiPairReport verify_jacobi_pair(const SpacetimeMetric& metric, const ScaleConstants& scales, const PhasePoint& p,
                                    const DiffConfig& cfg) {
  return verify_jacobi_pair(PhaseStructure(metric, scales), p, cfg);
}

}  // namespace hidsym
