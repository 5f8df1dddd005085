#pragma once

// Forward-mode derivatives of closed-form component expressions written as
// templates over the scalar type.

#include <ceres/jet.h>

#include "hidsym/tensor.hpp"
#include "hidsym/types.hpp"

namespace hidsym::detail {

using Jet4 = ceres::Jet<double, 4>;
using JetVec4 = Eigen::Matrix<Jet4, 4, 1>;

inline JetVec4 seed(const Vec4& x) {
  JetVec4 xj;
  for (int i = 0; i < 4; ++i) xj[i] = Jet4(x[i], i);
  return xj;
}

inline double value_of(double v) { return v; }
inline double value_of(const Jet4& v) { return v.a; }

/// Derivative of a 4x4 component expression.
template <class Fn>
MetricDerivative jet_matrix_derivative(Fn&& fn, const Vec4& x) {
  const Eigen::Matrix<Jet4, 4, 4> m = fn(seed(x));
  MetricDerivative d;
  for (int rho = 0; rho < 4; ++rho) {
    for (int l = 0; l < 4; ++l) {
      for (int n = 0; n < 4; ++n) d[rho](l, n) = m(l, n).v[rho];
    }
  }
  return d;
}

}  // namespace hidsym::detail
