#include "hidsym/symmetry.hpp"

#include <algorithm>
#include <cmath>

namespace hidsym {

namespace {

/// K^{l r2..rk} t_{r2} ... t_{rk}
Vec4 contract_tail(const MultiIndexArray& K, const Vec4& t) {
  Vec4 out = Vec4::Zero();
  const std::size_t block = K.size() / 4;
  for (std::size_t lam = 0; lam < 4; ++lam) {
    double total = 0.0;
    for (std::size_t r = 0; r < block; ++r) {
      double term = K.data()[lam * block + r];
      if (term == 0.0) continue;
      std::size_t rem = r;
      for (std::size_t s = 1; s < K.rank(); ++s) {
        term *= t[static_cast<Eigen::Index>(rem % 4)];
        rem /= 4;
      }
      total += term;
    }
    out[static_cast<Eigen::Index>(lam)] = total;
  }
  return out;
}

/// K^{l r r3..rk} w_r t_{r3} ... t_{rk} for k >= 2
Vec4 contract_tail_with(const MultiIndexArray& K, const Vec4& t, const Vec4& w) {
  Vec4 out = Vec4::Zero();
  const std::size_t block = K.size() / 4;
  for (std::size_t lam = 0; lam < 4; ++lam) {
    double total = 0.0;
    for (std::size_t r = 0; r < block; ++r) {
      double term = K.data()[lam * block + r];
      if (term == 0.0) continue;
      std::size_t rem = r;
      term *= w[static_cast<Eigen::Index>(rem % 4)];
      rem /= 4;
      for (std::size_t s = 2; s < K.rank(); ++s) {
        term *= t[static_cast<Eigen::Index>(rem % 4)];
        rem /= 4;
      }
      total += term;
    }
    out[static_cast<Eigen::Index>(lam)] = total;
  }
  return out;
}

/// Slice the derivative slot rho of a (4, 4, ..., 4) array.
MultiIndexArray derivative_slice(const MultiIndexArray& d, std::size_t rho) {
  std::vector<std::size_t> dims(d.dims().begin() + 1, d.dims().end());
  MultiIndexArray out(dims);
  const std::size_t block = out.size();
  std::copy(d.data().begin() + static_cast<std::ptrdiff_t>(rho * block),
            d.data().begin() + static_cast<std::ptrdiff_t>((rho + 1) * block), out.data().begin());
  return out;
}

double max_abs(const Vec7& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

// ---------------------------------------------------------------------------

PhaseFunction::PhaseFunction(Eval eval, Grad grad, DiffConfig cfg)
    : eval_(std::move(eval)), grad_(std::move(grad)), diff_(cfg) {
  if (!eval_) throw ParameterError("PhaseFunction: missing evaluator");
  diff_.validate();
}

PhaseFunction PhaseFunction::constant(double value) {
  return PhaseFunction([value](const PhasePoint&) { return value; }, [](const PhasePoint&) { return Vec7::Zero().eval(); });
}

Vec7 PhaseFunction::gradient(const PhasePoint& p) const {
  return grad_ ? grad_(p) : gradient_finite_difference(p);
}

Vec7 PhaseFunction::gradient_finite_difference(const PhasePoint& p) const {
  Vec7 g;
  const Vec7 y = p.coords();
  auto f = [this](const Vec7& z) { return eval_(PhasePoint::from_coords(z)); };
  for (int a = 0; a < kPhaseDim; ++a) g[a] = partial_derivative(f, y, static_cast<std::size_t>(a), diff_);
  return g;
}

GeneralizedVectorField::GeneralizedVectorField(Eval eval, Jacobian jac, DiffConfig cfg)
    : eval_(std::move(eval)), jac_(std::move(jac)), diff_(cfg) {
  if (!eval_) throw ParameterError("GeneralizedVectorField: missing evaluator");
  diff_.validate();
}

GeneralizedVectorField GeneralizedVectorField::from_spacetime(const SymmetricMultivectorField& K) {
  if (K.degree() != 1) throw UnsupportedDegree("from_spacetime: degree-1 field required");
  auto eval = [K](const PhasePoint& p) {
    const MultiIndexArray c = K.components(p.x);
    return Vec4(c(0), c(1), c(2), c(3));
  };
  auto jac = [K](const PhasePoint& p) {
    const MultiIndexArray d = K.dcomponents(p.x);
    Mat47 J = Mat47::Zero();
    for (int l = 0; l < 4; ++l) {
      for (int r = 0; r < 4; ++r) J(l, r) = d(r, l);
    }
    return J;
  };
  return GeneralizedVectorField(eval, jac);
}

Mat47 GeneralizedVectorField::jacobian(const PhasePoint& p) const {
  return jac_ ? jac_(p) : jacobian_finite_difference(p);
}

Mat47 GeneralizedVectorField::jacobian_finite_difference(const PhasePoint& p) const {
  Mat47 J;
  const Vec7 y = p.coords();
  auto f = [this](const Vec7& z) -> Vec4 { return eval_(PhasePoint::from_coords(z)); };
  for (int a = 0; a < kPhaseDim; ++a) J.col(a) = partial_derivative(f, y, static_cast<std::size_t>(a), diff_);
  return J;
}

PhaseVectorField::PhaseVectorField(Eval eval, DiffConfig cfg) : eval_(std::move(eval)), diff_(cfg) {
  if (!eval_) throw ParameterError("PhaseVectorField: missing evaluator");
  diff_.validate();
}

Mat7 PhaseVectorField::jacobian(const PhasePoint& p) const {
  Mat7 J;
  const Vec7 y = p.coords();
  auto f = [this](const Vec7& z) -> Vec7 { return eval_(PhasePoint::from_coords(z)); };
  for (int b = 0; b < kPhaseDim; ++b) J.col(b) = partial_derivative(f, y, static_cast<std::size_t>(b), diff_);
  return J;
}

// ---------------------------------------------------------------------------

double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const PhaseStructure& s, const PhasePoint& p) {
  return f.gradient(p).dot(s.Lambda(p) * g.gradient(p));
}

double reeb_derivative(const PhaseFunction& f, const PhaseStructure& s, const PhasePoint& p) {
  return s.gamma_hat(p).dot(f.gradient(p));
}

PhaseVectorField hamilton_jacobi_lift(const PhaseFunction& f, StructurePtr s) {
  return PhaseVectorField([f, s](const PhasePoint& p) -> Vec7 {
    const StructureEvaluation e = s->evaluate(p);
    return e.Lambda.transpose() * f.gradient(p) + f(p) * e.gamma_hat;
  });
}

PhaseVectorField generator_lift(const PhaseFunction& f, const PhaseFunction& h, StructurePtr s) {
  return PhaseVectorField([f, h, s](const PhasePoint& p) -> Vec7 {
    const StructureEvaluation e = s->evaluate(p);
    return e.Lambda.transpose() * f.gradient(p) + h(p) * (-e.gamma_hat);
  });
}

PhaseFunction tau_of(const GeneralizedVectorField& Xbar, StructurePtr s) {
  auto eval = [Xbar, s](const PhasePoint& p) { return s->tau_hat(p).head<4>().dot(Xbar(p)); };
  auto grad = [Xbar, s](const PhasePoint& p) -> Vec7 {
    const Vec4 t = s->tau_hat(p).head<4>();
    return s->tau_hat_jacobian(p).transpose() * Xbar(p) + Xbar.jacobian(p).transpose() * t;
  };
  return PhaseFunction(eval, grad);
}

Vec3 projectability_residual(const GeneralizedVectorField& Xbar, const PhaseStructure& s, const PhasePoint& p) {
  const PhaseFrame f = s.frame(p);
  const Mat47 J = Xbar.jacobian(p);
  Vec3 r;
  for (int j = 0; j < 3; ++j) r[j] = f.breve_G0.dot(J.col(4 + j));
  return r;
}

double ConservationResidual::max() const { return std::max(std::abs(general), std::abs(reeb_derivative)); }

ConservationResidual conservation_residual(const GeneralizedVectorField& Xbar, const PhaseStructure& s,
                                           const PhasePoint& p) {
  const PhaseFrame f = s.frame(p);
  const MetricDerivative dg = s.metric().dg(p.x);
  const Mat47 J = Xbar.jacobian(p);
  const Vec4 X = Xbar(p);
  const double k = s.scales().m / s.scales().hbar0;
  const Vec4& d0 = f.breve_delta0;

  Vec4 d_hat_g00;  // d_sigma hat_g00 at fixed x_0
  std::array<Vec4, 4> d_breve_G0;  // [sigma] -> d_sigma breve_G0_rho
  for (int sg = 0; sg < 4; ++sg) {
    const Mat4& d = dg[static_cast<std::size_t>(sg)];
    d_hat_g00[sg] = d0.dot(d * d0);
    d_breve_G0[static_cast<std::size_t>(sg)] = k * (d * d0);
  }
  const Mat4 Jx = J.leftCols<4>();  // (sigma, rho) = d_rho X^sigma

  ConservationResidual r;
  r.projected = f.breve_g0.dot(Jx * d0) + 0.5 * X.dot(d_hat_g00);

  // Correction term from the x_0-dependence of X.
  double correction = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double a = f.breve_G0.dot(J.col(4 + j));
    if (a == 0.0) continue;
    for (int rho = 0; rho < 4; ++rho) {
      double bracket = -0.5 * k * d_hat_g00[rho];
      for (int sg = 0; sg < 4; ++sg) bracket += d0[sg] * d_breve_G0[static_cast<std::size_t>(sg)][rho];
      correction += a * f.breve_G_up(j, rho) * bracket;
    }
  }
  r.general = -k * r.projected + correction;
  const Vec7 grad = s.tau_hat_jacobian(p).transpose() * X + J.transpose() * Vec4(s.tau_hat(p).head<4>());
  r.reeb_derivative = s.gamma_hat(p).dot(grad);
  return r;
}

PhaseFunction phase_function_from_multivector(const SymmetricMultivectorField& K, StructurePtr s) {
  if (K.degree() < 1) throw UnsupportedDegree("phase_function_from_multivector: degree must be at least 1");
  auto eval = [K, s](const PhasePoint& p) { return contract_all(K.components(p.x), s->tau_hat(p).head<4>()); };
  auto grad = [K, s](const PhasePoint& p) -> Vec7 {
    const Vec4 t = s->tau_hat(p).head<4>();
    const MultiIndexArray Kc = K.components(p.x);
    const MultiIndexArray dK = K.dcomponents(p.x);
    const Mat47 Jt = s->tau_hat_jacobian(p);
    const Vec4 tail = contract_tail(Kc, t);
    const double k = K.degree();
    Vec7 g;
    for (int a = 0; a < kPhaseDim; ++a) {
      g[a] = k * tail.dot(Jt.col(a));
      if (a < 4) g[a] += contract_all(derivative_slice(dK, static_cast<std::size_t>(a)), t);
    }
    return g;
  };
  return PhaseFunction(eval, grad);
}

double multivector_phase_value_coordinate(const SymmetricMultivectorField& K, const PhaseStructure& s,
                                          const PhasePoint& p) {
  const PhaseFrame f = s.frame(p);
  const int k = K.degree();
  const double ca = f.c * f.alpha0;
  return std::pow(-ca, k) * contract_all(K.components(p.x), f.breve_G0);
}

GeneralizedVectorField generalized_field_from_multivector(const SymmetricMultivectorField& K, StructurePtr s) {
  const int k = K.degree();
  if (k < 1) throw UnsupportedDegree("generalized_field_from_multivector: degree must be at least 1");
  if (k == 1) return GeneralizedVectorField::from_spacetime(K);
  auto eval = [K, s, k](const PhasePoint& p) -> Vec4 {
    const PhaseFrame f = s->frame(p);
    const Vec4 t = time_form(f).tau_hat;
    const MultiIndexArray Kc = K.components(p.x);
    return k * contract_tail(Kc, t) - (k - 1) * contract_all(Kc, t) * contact_map(f).d_hat;
  };
  auto jac = [K, s, k](const PhasePoint& p) -> Mat47 {
    const PhaseFrame f = s->frame(p);
    const Vec4 t = time_form(f).tau_hat;
    const Vec4 d_hat = contact_map(f).d_hat;
    const MultiIndexArray Kc = K.components(p.x);
    const MultiIndexArray dK = K.dcomponents(p.x);
    const Mat47 Jt = s->tau_hat_jacobian(p);
    const MetricDerivative dg = s->metric().dg(p.x);
    const Vec4 tail = contract_tail(Kc, t);
    const double value = contract_all(Kc, t);
    const double a = f.alpha0;
    const double a3 = a * a * a;
    const double scale = f.scales.hbar0 / (f.scales.m * f.c);  // d_hat = scale alpha0 breve_delta0
    Mat47 J;
    for (int col = 0; col < kPhaseDim; ++col) {
      Vec4 d_tail = (k - 1) * contract_tail_with(Kc, t, Jt.col(col));
      double d_value = k * tail.dot(Jt.col(col));
      Vec4 d_dhat;
      if (col < 4) {
        const MultiIndexArray slice = derivative_slice(dK, static_cast<std::size_t>(col));
        d_tail += contract_tail(slice, t);
        d_value += contract_all(slice, t);
        const double dalpha = 0.5 * a3 * f.breve_delta0.dot(dg[static_cast<std::size_t>(col)] * f.breve_delta0);
        d_dhat = scale * dalpha * f.breve_delta0;
      } else {
        const double dalpha = a3 * f.breve_g0[col - 3];
        d_dhat = scale * dalpha * f.breve_delta0;
        d_dhat[col - 3] += scale * a;
      }
      J.col(col) = k * d_tail - (k - 1) * (d_value * d_hat + value * d_dhat);
    }
    return J;
  };
  return GeneralizedVectorField(eval, jac);
}

HiddenSymmetry hidden_symmetry_from_multivector(const SymmetricMultivectorField& K, StructurePtr s,
                                                std::span<const PhasePoint> check_points) {
  PhaseFunction f = phase_function_from_multivector(K, s);
  HiddenSymmetry h{K.name(),
                   K.degree(),
                   f,
                   hamilton_jacobi_lift(f, s),
                   generalized_field_from_multivector(K, s),
                   std::nullopt,
                   false,
                   std::nullopt};
  if (!check_points.empty()) {
    double worst = 0.0;
    for (const PhasePoint& p : check_points) {
      worst = std::max(worst, killing_residual(K, s->metric(), p.x).max_abs());
    }
    h.killing_residual = worst;
    h.killing = worst < kKillingTolerance;
    if (!h.killing) {
      h.warning = "field '" + K.name() + "' is not Killing (residual " + std::to_string(worst) +
                  "); its phase function is not conserved";
    }
  }
  return h;
}

// ---------------------------------------------------------------------------

Vec7 lie_bracket_phase(const PhaseVectorField& X, const PhaseVectorField& Y, const PhasePoint& p) {
  return Y.jacobian(p) * X(p) - X.jacobian(p) * Y(p);
}

Vec7 lie_derivative_one_form(const PhaseVectorField& X, const OneFormField& beta, const PhasePoint& p,
                             const DiffConfig& cfg) {
  const Vec7 y = p.coords();
  const Vec7 x = X(p);
  Vec7 out = Vec7::Zero();
  for (int a = 0; a < kPhaseDim; ++a) {
    if (x[a] != 0.0) out += x[a] * partial_derivative(beta, y, static_cast<std::size_t>(a), cfg);
  }
  out += X.jacobian(p).transpose() * beta(y);
  return out;
}

Mat7 lie_derivative_two_form(const PhaseVectorField& X, const TwoFormField& beta, const PhasePoint& p,
                             const DiffConfig& cfg) {
  const Vec7 y = p.coords();
  const Vec7 x = X(p);
  Mat7 out = Mat7::Zero();
  for (int a = 0; a < kPhaseDim; ++a) {
    if (x[a] != 0.0) out += x[a] * partial_derivative(beta, y, static_cast<std::size_t>(a), cfg);
  }
  const Mat7 J = X.jacobian(p);  // (a, b) = d_b X^a
  const Mat7 B = beta(y);
  out += J.transpose() * B + B * J;
  return out;
}

SymmetryResiduals symmetry_residuals(const PhaseVectorField& X, const PhaseStructure& s, const PhasePoint& p,
                                     const DiffConfig& cfg) {
  SymmetryResiduals r;
  r.tau = max_abs(lie_derivative_one_form(
      X, [&s](const Vec7& y) { return s.tau_hat(PhasePoint::from_coords(y)); }, p, cfg));
  r.omega = lie_derivative_two_form(X, [&s](const Vec7& y) { return s.Omega(PhasePoint::from_coords(y)); }, p, cfg)
                .cwiseAbs()
                .maxCoeff();
  return r;
}

std::pair<double, double> generator_bracket(const PhaseFunction& f, const PhaseFunction& h, const PhaseFunction& g,
                                            const PhaseFunction& k, const PhaseStructure& s, const PhasePoint& p,
                                            const DiffConfig& cfg) {
  const Mat7 Lambda = s.Lambda(p);
  const Vec7 df = f.gradient(p);
  const Vec7 dg = g.gradient(p);
  const Mat7 d_omega = -exterior_derivative_1form(
      [&s](const Vec7& y) { return s.tau_hat(PhasePoint::from_coords(y)); }, p.coords(), cfg);
  const Vec7 fs = Lambda.transpose() * df;
  const Vec7 gs = Lambda.transpose() * dg;
  const double fg = df.dot(Lambda * dg);
  const double fk = df.dot(Lambda * k.gradient(p));
  const double gh = dg.dot(Lambda * h.gradient(p));
  return {fg, fk - gh - fs.dot(d_omega * gs)};
}

double generator_compatibility_residual(const PhaseFunction& f, const PhaseFunction& h, const PhaseStructure& s,
                                        const PhasePoint& p, const DiffConfig& cfg) {
  const PhaseVectorField reeb([&s](const PhasePoint& q) -> Vec7 { return -s.gamma_hat(q); }, cfg);
  const Vec7 L_E_omega = lie_derivative_one_form(
      reeb, [&s](const Vec7& y) -> Vec7 { return -s.tau_hat(PhasePoint::from_coords(y)); }, p, cfg);
  return reeb(p).dot(h.gradient(p)) + L_E_omega.dot(s.Lambda(p) * f.gradient(p));
}

HomomorphismPointResidual HomomorphismReport::max() const {
  HomomorphismPointResidual m;
  for (const auto& r : points) {
    m.lift_bracket = std::max(m.lift_bracket, r.lift_bracket);
    m.poisson = std::max(m.poisson, r.poisson);
    m.projected_bracket = std::max(m.projected_bracket, r.projected_bracket);
    m.general_bracket = std::max(m.general_bracket, r.general_bracket);
    m.correction = std::max(m.correction, r.correction);
  }
  return m;
}

HomomorphismReport verify_homomorphism(const SymmetricMultivectorField& K, const SymmetricMultivectorField& L,
                                       StructurePtr s, std::span<const PhasePoint> points) {
  const SymmetricMultivectorField KL = schouten_sym_field(K, L);
  const PhaseFunction fK = phase_function_from_multivector(K, s);
  const PhaseFunction fL = phase_function_from_multivector(L, s);
  const PhaseFunction fKL = phase_function_from_multivector(KL, s);
  const PhaseVectorField XK = hamilton_jacobi_lift(fK, s);
  const PhaseVectorField XL = hamilton_jacobi_lift(fL, s);
  const PhaseVectorField XKL = hamilton_jacobi_lift(fKL, s);
  const double k = K.degree();
  const double l = L.degree();

  HomomorphismReport report;
  double wk = 0.0;
  double wl = 0.0;
  for (const PhasePoint& p : points) {
    wk = std::max(wk, killing_residual(K, s->metric(), p.x).max_abs());
    wl = std::max(wl, killing_residual(L, s->metric(), p.x).max_abs());

    const Vec7 bracket = lie_bracket_phase(XK, XL, p);
    const double tkl = fKL(p);
    const double vK = fK(p);
    const double vL = fL(p);
    const double gK = reeb_derivative(fK, *s, p);
    const double gL = reeb_derivative(fL, *s, p);
    const double pb = poisson_bracket(fK, fL, *s, p);
    const double tb = s->tau_hat(p).dot(bracket);

    HomomorphismPointResidual r;
    r.lift_bracket = max_abs(bracket - XKL(p));
    r.poisson = std::abs(pb - tkl);
    r.projected_bracket = std::abs(tb - tkl);
    r.general_bracket = std::abs(pb + k * vK * gL - l * vL * gK - tkl);
    r.correction = std::abs(tb - tkl - (l - 1.0) * vL * gK + (k - 1.0) * vK * gL);
    report.points.push_back(r);
  }
  report.killing_k = wk < kKillingTolerance;
  report.killing_l = wl < kKillingTolerance;
  return report;
}

std::pair<double, double> reeb_killing_identity(const SymmetricMultivectorField& K, StructurePtr s,
                                                const PhasePoint& p) {
  const PhaseFunction f = phase_function_from_multivector(K, s);
  const SymmetricMultivectorField G_hat = unscaled_inverse_metric_field(s->metric(), s->scales());
  const double lhs = reeb_derivative(f, *s, p);
  const double rhs = 0.5 * contract_all(schouten_sym(K, G_hat, p.x), s->tau_hat(p).head<4>());
  return {lhs, rhs};
}

}  // namespace hidsym
