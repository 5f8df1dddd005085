#pragma once

// Central-difference differentiation with optional Richardson extrapolation.
// Used wherever no analytic derivative is available, and for every exterior
// and Lie derivative on the phase chart.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "hidsym/errors.hpp"
#include "hidsym/tensor.hpp"

namespace hidsym {

struct DiffConfig {
  /// Step relative to the coordinate scale max(1, |x_axis|).
  double step = 1e-5;
  bool richardson = true;
  /// Order of the base stencil: 2 (three-point) or 4 (five-point).
  int order = 2;

  void validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) throw ParameterError("DiffConfig: step must be positive");
    if (order != 2 && order != 4) throw ParameterError("DiffConfig: order must be 2 or 4");
  }
  double step_for(double coordinate) const { return step * std::max(1.0, std::abs(coordinate)); }
};

namespace detail {

inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const MultiIndexArray& a) { return a.all_finite(); }
template <class Derived>
bool finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace detail

/// d f / d x^axis at x. `Point` is any copyable type with operator[]; f may
/// return a double, a MultiIndexArray or a fixed-size Eigen object.
template <class F, class Point>
auto partial_derivative(F&& f, const Point& x, std::size_t axis, const DiffConfig& cfg = {}) {
  using R = std::decay_t<decltype(f(x))>;
  cfg.validate();
  if constexpr (requires { x.size(); }) {
    if (axis >= static_cast<std::size_t>(x.size())) throw IndexError("partial_derivative: axis out of range");
  }
  const double h = cfg.step_for(x[axis]);

  auto sample = [&](double offset) -> R {
    Point y = x;
    y[axis] += offset;
    R value = f(y);
    if (!detail::finite(value)) {
      throw EvaluationDomainError("partial_derivative: non-finite sample along axis " + std::to_string(axis));
    }
    return value;
  };
  auto stencil = [&](double hh) -> R {
    if (cfg.order == 2) {
      R d = (sample(hh) - sample(-hh)) * (1.0 / (2.0 * hh));
      return d;
    }
    R d = (sample(-2.0 * hh) - sample(2.0 * hh) + 8.0 * (sample(hh) - sample(-hh))) * (1.0 / (12.0 * hh));
    return d;
  };

  R coarse = stencil(h);
  if (!cfg.richardson) return coarse;
  R fine = stencil(0.5 * h);
  const double w = std::pow(2.0, cfg.order);
  R extrapolated = (fine * w - coarse) * (1.0 / (w - 1.0));
  return extrapolated;
}

using ScalarField = std::function<double(std::span<const double>)>;

/// Scalar-field convenience overload over a plain coordinate tuple.
inline double partial_derivative(const ScalarField& f, std::span<const double> x, std::size_t axis,
                                 const DiffConfig& cfg = {}) {
  if (axis >= x.size()) throw IndexError("partial_derivative: axis out of range");
  std::vector<double> point(x.begin(), x.end());
  return partial_derivative([&](const std::vector<double>& y) { return f(y); }, point, axis, cfg);
}

inline std::vector<double> gradient(const ScalarField& f, std::span<const double> x, const DiffConfig& cfg = {}) {
  std::vector<double> g(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) g[a] = partial_derivative(f, x, a, cfg);
  return g;
}

}  // namespace hidsym
