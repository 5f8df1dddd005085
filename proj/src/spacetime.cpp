#include "hidsym/spacetime.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "jet_util.hpp"

namespace hidsym {

void ScaleConstants::validate() const {
  if (!(c0 > 0.0)) throw ParameterError("scales: c0 must be positive");
  if (!(hbar0 > 0.0)) throw ParameterError("scales: hbar0 must be positive");
  if (!(m > 0.0)) throw ParameterError("scales: m must be positive");
  if (!std::isfinite(q)) throw ParameterError("scales: q must be finite");
}

SpacetimeMetric::SpacetimeMetric(std::string name, Params params, MetricFn g, DerivativeFn dg, DomainFn domain)
    : name_(std::move(name)), params_(std::move(params)), g_(std::move(g)), dg_(std::move(dg)),
      domain_(std::move(domain)) {
  if (!g_) throw ParameterError("SpacetimeMetric: missing component evaluator");
  if (!domain_) domain_ = [](const Vec4&) { return true; };
  if (!dg_) mode_ = DerivativeMode::FiniteDifference;
}

double SpacetimeMetric::param(const std::string& key) const {
  auto it = params_.find(key);
  if (it == params_.end()) throw ParameterError("metric " + name_ + ": no parameter '" + key + "'");
  return it->second;
}

void SpacetimeMetric::require_domain(const Vec4& x) const {
  if (!domain_(x)) {
    std::ostringstream os;
    os << "metric " << name_ << ": point (" << x.transpose() << ") outside chart domain";
    throw DomainError(os.str());
  }
}

Mat4 SpacetimeMetric::g(const Vec4& x) const { return g_(x); }

Mat4 SpacetimeMetric::ginv(const Vec4& x) const { return g_(x).inverse(); }

MetricDerivative SpacetimeMetric::dg(const Vec4& x) const {
  if (mode_ == DerivativeMode::Analytic && dg_) return dg_(x);
  return dg_finite_difference(x);
}

MetricDerivative SpacetimeMetric::dg_finite_difference(const Vec4& x) const {
  MetricDerivative d;
  for (int rho = 0; rho < 4; ++rho) {
    d[rho] = partial_derivative([this](const Vec4& y) -> Mat4 { return g_(y); }, x, rho, diff_);
  }
  return d;
}

MetricDerivative SpacetimeMetric::dginv(const Vec4& x) const {
  const Mat4 gi = ginv(x);
  const MetricDerivative d = dg(x);
  MetricDerivative out;
  for (int rho = 0; rho < 4; ++rho) out[rho] = -gi * d[rho] * gi;
  return out;
}

SpacetimeMetric SpacetimeMetric::with_derivative_mode(DerivativeMode mode, DiffConfig cfg) const {
  cfg.validate();
  SpacetimeMetric copy = *this;
  copy.mode_ = (mode == DerivativeMode::Analytic && !dg_) ? DerivativeMode::FiniteDifference : mode;
  copy.diff_ = cfg;
  return copy;
}

namespace {

using std::cos;
using std::sin;

template <class T>
Eigen::Matrix<T, 4, 4> minkowski_cartesian(const Eigen::Matrix<T, 4, 1>&) {
  Eigen::Matrix<T, 4, 4> g = Eigen::Matrix<T, 4, 4>::Zero();
  g(0, 0) = T(-1.0);
  g(1, 1) = g(2, 2) = g(3, 3) = T(1.0);
  return g;
}

// Kerr in Boyer-Lindquist coordinates (t, r, theta, phi). a = 0 gives
// Schwarzschild, M = a = 0 flat space in spherical coordinates.
template <class T>
Eigen::Matrix<T, 4, 4> kerr_bl(const Eigen::Matrix<T, 4, 1>& x, double M, double a) {
  const T r = x[1];
  const T st = sin(x[2]);
  const T ct = cos(x[2]);
  const T sigma = r * r + a * a * ct * ct;
  const T delta = r * r - 2.0 * M * r + a * a;
  Eigen::Matrix<T, 4, 4> g = Eigen::Matrix<T, 4, 4>::Zero();
  g(0, 0) = -(1.0 - 2.0 * M * r / sigma);
  g(0, 3) = g(3, 0) = -2.0 * M * a * r * st * st / sigma;
  g(1, 1) = sigma / delta;
  g(2, 2) = sigma;
  g(3, 3) = (r * r + a * a + 2.0 * M * a * a * r * st * st / sigma) * st * st;
  return g;
}

template <class T>
Eigen::Matrix<T, 4, 4> schwarzschild(const Eigen::Matrix<T, 4, 1>& x, double M) {
  const T r = x[1];
  const T st = sin(x[2]);
  const T f = 1.0 - 2.0 * M / r;
  Eigen::Matrix<T, 4, 4> g = Eigen::Matrix<T, 4, 4>::Zero();
  g(0, 0) = -f;
  g(1, 1) = 1.0 / f;
  g(2, 2) = r * r;
  g(3, 3) = r * r * st * st;
  return g;
}

double get(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void reject_unknown(const std::string& metric, const Params& p, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : p) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParameterError("metric " + metric + ": unknown parameter '" + key + "'");
    if (!std::isfinite(value)) throw ParameterError("metric " + metric + ": parameter '" + key + "' not finite");
  }
}

double checked_margin(const std::string& metric, const Params& p) {
  const double margin = get(p, "margin", 1e-3);
  if (!(margin > 0.0 && margin < 1.0)) throw ParameterError("metric " + metric + ": margin must lie in (0, 1)");
  return margin;
}

bool spherical_domain(const Vec4& x, double r_min, double margin) {
  return x.allFinite() && x[1] > r_min && std::abs(std::sin(x[2])) > margin;
}

}  // namespace

SpacetimeMetric metric_catalog(const std::string& name, const Params& params) {
  if (name == "minkowski") {
    reject_unknown(name, params, {"spherical", "margin"});
    const double margin = checked_margin(name, params);
    const bool spherical = get(params, "spherical", 0.0) != 0.0;
    Params stored{{"spherical", spherical ? 1.0 : 0.0}, {"margin", margin}};
    if (!spherical) {
      return SpacetimeMetric(
          name, stored, [](const Vec4& x) { return minkowski_cartesian(x); },
          [](const Vec4& x) { return detail::jet_matrix_derivative([](const auto& y) { return minkowski_cartesian(y); }, x); },
          [](const Vec4& x) { return x.allFinite(); });
    }
    return SpacetimeMetric(
        name, stored, [](const Vec4& x) { return kerr_bl(x, 0.0, 0.0); },
        [](const Vec4& x) { return detail::jet_matrix_derivative([](const auto& y) { return kerr_bl(y, 0.0, 0.0); }, x); },
        [margin](const Vec4& x) { return spherical_domain(x, margin, margin); });
  }

  if (name == "schwarzschild") {
    reject_unknown(name, params, {"M", "margin"});
    const double M = get(params, "M", 1.0);
    const double margin = checked_margin(name, params);
    if (!(M >= 0.0)) throw ParameterError("schwarzschild: mass M must be non-negative");
    const double r_min = std::max(2.0 * M * (1.0 + margin), margin);
    return SpacetimeMetric(
        name, Params{{"M", M}, {"margin", margin}}, [M](const Vec4& x) { return schwarzschild(x, M); },
        [M](const Vec4& x) { return detail::jet_matrix_derivative([M](const auto& y) { return schwarzschild(y, M); }, x); },
        [r_min, margin](const Vec4& x) { return spherical_domain(x, r_min, margin); });
  }

  if (name == "kerr") {
    reject_unknown(name, params, {"M", "a", "margin"});
    const double M = get(params, "M", 1.0);
    const double a = get(params, "a", 0.6);
    const double margin = checked_margin(name, params);
    if (!(M >= 0.0)) throw ParameterError("kerr: mass M must be non-negative");
    if (std::abs(a) > M) throw ParameterError("kerr: spin |a| must not exceed M (|a| <= M violated)");
    const double r_plus = M + std::sqrt(M * M - a * a);
    const double r_min = std::max(r_plus * (1.0 + margin), margin);
    return SpacetimeMetric(
        name, Params{{"M", M}, {"a", a}, {"margin", margin}}, [M, a](const Vec4& x) { return kerr_bl(x, M, a); },
        [M, a](const Vec4& x) { return detail::jet_matrix_derivative([M, a](const auto& y) { return kerr_bl(y, M, a); }, x); },
        [r_min, margin](const Vec4& x) { return spherical_domain(x, r_min, margin); });
  }

  throw ParameterError("unknown metric '" + name + "' (expected minkowski, schwarzschild or kerr)");
}

std::vector<CatalogEntry> metric_catalog_entries() {
  return {
      {"kerr", "Kerr in Boyer-Lindquist coordinates (t, r, theta, phi); params M, a with |a| <= M"},
      {"minkowski", "flat metric diag(-1,1,1,1); spherical=1 switches to (t, r, theta, phi)"},
      {"schwarzschild", "Schwarzschild coordinates (t, r, theta, phi); param M"},
  };
}

std::array<Mat4, 4> christoffel_symbols(const Mat4& ginv, const MetricDerivative& dg) {
  // Gamma^nu_{lm} = 1/2 g^{nr} (d_l g_{rm} + d_m g_{rl} - d_r g_{lm})
  std::array<Mat4, 4> lowered;  // lowered[r](l, m) = Gamma_{r l m}
  for (int r = 0; r < 4; ++r) {
    for (int l = 0; l < 4; ++l) {
      for (int m = 0; m < 4; ++m) lowered[r](l, m) = 0.5 * (dg[l](r, m) + dg[m](r, l) - dg[r](l, m));
    }
  }
  std::array<Mat4, 4> chr;
  for (int nu = 0; nu < 4; ++nu) {
    chr[nu].setZero();
    for (int r = 0; r < 4; ++r) chr[nu] += ginv(nu, r) * lowered[r];
  }
  return chr;
}

std::array<Mat4, 4> christoffel_symbols(const SpacetimeMetric& metric, const Vec4& x) {
  metric.require_domain(x);
  return christoffel_symbols(metric.ginv(x), metric.dg(x));
}

MultiIndexArray christoffel(const SpacetimeMetric& metric, const Vec4& x) {
  const auto chr = christoffel_symbols(metric, x);
  MultiIndexArray out = MultiIndexArray::uniform(3, 4);
  for (int nu = 0; nu < 4; ++nu) {
    for (int l = 0; l < 4; ++l) {
      for (int m = 0; m < 4; ++m) out(nu, l, m) = chr[nu](l, m);
    }
  }
  return out;
}

double metric_compatibility_residual(const SpacetimeMetric& metric, const Vec4& x) {
  const Mat4 g = metric.g(x);
  const MetricDerivative dg = metric.dg(x);
  const auto chr = christoffel_symbols(metric.ginv(x), dg);
  double worst = 0.0;
  for (int rho = 0; rho < 4; ++rho) {
    for (int l = 0; l < 4; ++l) {
      for (int m = 0; m < 4; ++m) {
        double v = dg[rho](l, m);
        for (int s = 0; s < 4; ++s) v -= chr[s](rho, l) * g(s, m) + chr[s](rho, m) * g(l, s);
        worst = std::max(worst, std::abs(v));
      }
    }
  }
  return worst;
}

RescaledMetrics rescaled_metrics(const SpacetimeMetric& metric, const ScaleConstants& scales, const Vec4& x) {
  scales.validate();
  metric.require_domain(x);
  const Mat4 g = metric.g(x);
  const Mat4 gi = g.inverse();
  const double mch = scales.m * scales.c0 / scales.hbar0;
  return RescaledMetrics{(scales.m / scales.hbar0) * g, (scales.hbar0 / scales.m) * gi, mch * mch * g,
                         gi / (mch * mch)};
}

bool has_lorentzian_signature(const Mat4& g) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(g, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return ev[0] < 0.0 && ev[1] > 0.0 && ev[2] > 0.0 && ev[3] > 0.0;
}

}  // namespace hidsym
