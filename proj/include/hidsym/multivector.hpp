#pragma once

// Symmetric and skew multivector fields, their Schouten brackets, the
// polynomial map to functions on T*M, and Killing residuals.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hidsym/diff.hpp"
#include "hidsym/spacetime.hpp"
#include "hidsym/tensor.hpp"
#include "hidsym/types.hpp"

namespace hidsym {

/// Totally symmetric contravariant field K^{l1...lk}(x) on the 4D chart.
class SymmetricMultivectorField {
 public:
  using Eval = std::function<MultiIndexArray(const Vec4&)>;

  /// `dcomponents` returns dims (4, 4, ..., 4) with slot 0 the derivative
  /// index. When omitted, derivatives come from central differences.
  SymmetricMultivectorField(std::string name, int degree, Eval components, Eval dcomponents = {},
                            DiffConfig cfg = {1e-4, true, 2});

  const std::string& name() const noexcept { return name_; }
  int degree() const noexcept { return degree_; }
  bool has_analytic_derivative() const noexcept { return static_cast<bool>(dcomponents_); }

  MultiIndexArray components(const Vec4& x) const;
  MultiIndexArray dcomponents(const Vec4& x) const;
  MultiIndexArray dcomponents_finite_difference(const Vec4& x) const;

  SymmetricMultivectorField renamed(std::string name) const;
  SymmetricMultivectorField scaled(double factor) const;

 private:
  std::string name_;
  int degree_;
  Eval components_;
  Eval dcomponents_;
  DiffConfig diff_;
};

/// Totally antisymmetric contravariant field on an n-dimensional chart.
class SkewMultivectorField {
 public:
  using Point = std::vector<double>;
  using Eval = std::function<MultiIndexArray(const Point&)>;

  SkewMultivectorField(std::size_t dim, int degree, Eval components, DiffConfig cfg = {1e-4, true, 2});

  std::size_t dim() const noexcept { return dim_; }
  int degree() const noexcept { return degree_; }
  MultiIndexArray components(const Point& x) const;
  /// partial_axis of the components at x.
  MultiIndexArray derivative(const Point& x, std::size_t axis) const;

 private:
  std::size_t dim_;
  int degree_;
  Eval components_;
  DiffConfig diff_;
};

/// Symmetric Schouten bracket; degree k + l - 1. Degrees must be >= 1.
MultiIndexArray schouten_sym(const SymmetricMultivectorField& K, const SymmetricMultivectorField& L, const Vec4& x);

/// The bracket as a field (derivatives by central differences).
SymmetricMultivectorField schouten_sym_field(const SymmetricMultivectorField& K, const SymmetricMultivectorField& L);

/// Lie bracket of two degree-1 fields, computed directly.
Vec4 lie_bracket_vector(const SymmetricMultivectorField& X, const SymmetricMultivectorField& Y, const Vec4& x);

/// Schouten-Nijenhuis bracket for degree pairs (1,1), (1,2), (2,1), (2,2).
/// With interior products i_{X^Y} beta = beta(X, Y, ...) it satisfies
/// i_{[P,Q]} b = (-1)^{pq+q} i_P d i_Q b + (-1)^p i_Q d i_P b for closed b and
/// p <= q; (2,1) follows from [P,Q] = -[Q,P].
MultiIndexArray schouten_skew(const SkewMultivectorField& P, const SkewMultivectorField& Q,
                              const SkewMultivectorField::Point& x);

/// Wedge product of totally antisymmetric arrays (tensor components,
/// a ^ b = a (x) b - b (x) a for vectors).
MultiIndexArray wedge(const MultiIndexArray& a, const MultiIndexArray& b);

/// K^{l1..lk}(x) p_{l1} ... p_{lk}
double pi_star(const SymmetricMultivectorField& K, const Vec4& x, const Vec4& p);
double contract_all(const MultiIndexArray& components, const Vec4& covector);

/// Symmetrized nabla^{(l1} K^{l2...l_{k+1})}.
MultiIndexArray killing_residual(const SymmetricMultivectorField& K, const SpacetimeMetric& metric, const Vec4& x);
/// Same quantity through [K, g-bar] / (-2).
MultiIndexArray killing_residual_schouten(const SymmetricMultivectorField& K, const SpacetimeMetric& metric,
                                          const Vec4& x);

/// Contravariant metric g-bar as a degree-2 field.
SymmetricMultivectorField inverse_metric_field(const SpacetimeMetric& metric);
/// Unscaled contravariant metric (hbar / m c)^2 g-bar.
SymmetricMultivectorField unscaled_inverse_metric_field(const SpacetimeMetric& metric, const ScaleConstants& scales);

/// Symmetric product K v L (degree k + l), analytic derivative by the product rule.
SymmetricMultivectorField symmetric_product(const SymmetricMultivectorField& K, const SymmetricMultivectorField& L);
SymmetricMultivectorField linear_combination(const SymmetricMultivectorField& K, double a,
                                             const SymmetricMultivectorField& L, double b);

/// Field with independent components that are random quadratic polynomials
/// in the chart coordinates. Deterministic for a given seed.
SymmetricMultivectorField polynomial_field(int degree, std::uint64_t seed, double coefficient_scale = 0.1);

/// Named Killing fields shipped for each catalog metric:
///   minkowski (cartesian): dt dx dy dz rot_xy rot_yz rot_zx boost_x boost_y boost_z
///   minkowski (spherical): dt dphi
///   schwarzschild: dt dphi rot_x rot_y
///   kerr: dt dphi carter
std::vector<std::string> killing_field_names(const SpacetimeMetric& metric);
std::vector<CatalogEntry> killing_field_entries(const SpacetimeMetric& metric);
/// Resolves catalog names plus the always-available "ginv" (g-bar) and
/// "Ghat" (unscaled contravariant metric), and on (t, r, theta, phi) charts
/// "radial_control" = r^2 d_r (x) d_r, which is not Killing.
SymmetricMultivectorField killing_field(const SpacetimeMetric& metric, const std::string& name,
                                        const ScaleConstants& scales = {});

}  // namespace hidsym
