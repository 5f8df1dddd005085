#pragma once

// Lorentzian metrics on a 4D chart: catalog, inverse, derivatives,
// Levi-Civita connection and the rescaled metrics G, G-bar, G-hat.
//
// Chart convention: slot 0 is the time coordinate, slots 1..3 spacelike.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hidsym/diff.hpp"
#include "hidsym/tensor.hpp"
#include "hidsym/types.hpp"

namespace hidsym {

using Params = std::map<std::string, double>;

/// Speed of light, Planck constant, particle mass and charge as plain numbers.
struct ScaleConstants {
  double c0 = 1.0;
  double hbar0 = 1.0;
  double m = 1.0;
  double q = 0.0;

  void validate() const;
};

enum class DerivativeMode { Analytic, FiniteDifference };

class SpacetimeMetric {
 public:
  using MetricFn = std::function<Mat4(const Vec4&)>;
  using DerivativeFn = std::function<MetricDerivative(const Vec4&)>;
  using DomainFn = std::function<bool(const Vec4&)>;

  SpacetimeMetric(std::string name, Params params, MetricFn g, DerivativeFn dg, DomainFn domain);

  const std::string& name() const noexcept { return name_; }
  const Params& params() const noexcept { return params_; }
  double param(const std::string& key) const;

  bool in_domain(const Vec4& x) const { return domain_(x); }
  void require_domain(const Vec4& x) const;

  Mat4 g(const Vec4& x) const;
  Mat4 ginv(const Vec4& x) const;
  /// Dispatches on derivative_mode(); falls back to differences when no
  /// analytic derivative was supplied.
  MetricDerivative dg(const Vec4& x) const;
  MetricDerivative dg_finite_difference(const Vec4& x) const;
  /// partial_rho g^{lm} = -g^{la} partial_rho g_{ab} g^{bm}
  MetricDerivative dginv(const Vec4& x) const;

  bool has_analytic_derivative() const noexcept { return static_cast<bool>(dg_); }
  DerivativeMode derivative_mode() const noexcept { return mode_; }
  const DiffConfig& diff_config() const noexcept { return diff_; }
  SpacetimeMetric with_derivative_mode(DerivativeMode mode, DiffConfig cfg = {}) const;

 private:
  std::string name_;
  Params params_;
  MetricFn g_;
  DerivativeFn dg_;
  DomainFn domain_;
  DerivativeMode mode_ = DerivativeMode::Analytic;
  DiffConfig diff_{1e-4, true, 2};
};

/// minkowski (params: spherical = 0|1), schwarzschild (M), kerr (M, a).
/// All accept `margin` (default 1e-3) controlling the excluded band around
/// horizons and the polar axis.
SpacetimeMetric metric_catalog(const std::string& name, const Params& params = {});

struct CatalogEntry {
  std::string name;
  std::string description;
};
std::vector<CatalogEntry> metric_catalog_entries();

/// Levi-Civita symbols as a (4,4,4) array indexed (nu, lambda, mu) = Gamma^nu_{lambda mu}.
MultiIndexArray christoffel(const SpacetimeMetric& metric, const Vec4& x);

/// Same values as christoffel(), laid out as chr[nu](lambda, mu).
std::array<Mat4, 4> christoffel_symbols(const SpacetimeMetric& metric, const Vec4& x);
std::array<Mat4, 4> christoffel_symbols(const Mat4& ginv, const MetricDerivative& dg);

/// max |nabla_rho g_{lm}| at x.
double metric_compatibility_residual(const SpacetimeMetric& metric, const Vec4& x);

struct RescaledMetrics {
  Mat4 G;          ///< G^0_{lm} = (m / hbar0) g_{lm}
  Mat4 G_inv;      ///< G_0^{lm} = (hbar0 / m) g^{lm}
  Mat4 G_hat;      ///< (m c / hbar)^2 g_{lm}
  Mat4 G_hat_inv;  ///< (hbar / m c)^2 g^{lm}
};

RescaledMetrics rescaled_metrics(const SpacetimeMetric& metric, const ScaleConstants& scales, const Vec4& x);

/// True when g has exactly one negative and three positive eigenvalues.
bool has_lorentzian_signature(const Mat4& g);

}  // namespace hidsym
