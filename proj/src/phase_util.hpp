#pragma once

// Conversions between phase-space Eigen types and MultiIndexArray / std::vector.

#include <vector>

#include "hidsym/phase_space.hpp"
#include "hidsym/tensor.hpp"

namespace hidsym::detail {

inline Mat7 wedge7(const Vec7& a, const Vec7& b) { return a * b.transpose() - b * a.transpose(); }

inline Vec7 basis7(int a) {
  Vec7 e = Vec7::Zero();
  e[a] = 1.0;
  return e;
}

inline PhasePoint point_from(const std::vector<double>& y) {
  Vec7 c;
  for (int a = 0; a < kPhaseDim; ++a) c[a] = y[static_cast<std::size_t>(a)];
  return PhasePoint::from_coords(c);
}

inline std::vector<double> to_vector(const Vec7& y) { return {y.data(), y.data() + kPhaseDim}; }

inline MultiIndexArray vec_array(const Vec7& v) {
  MultiIndexArray out = MultiIndexArray::uniform(1, kPhaseDim);
  for (int a = 0; a < kPhaseDim; ++a) out(a) = v[a];
  return out;
}

inline MultiIndexArray mat_array(const Mat7& m) {
  MultiIndexArray out = MultiIndexArray::uniform(2, kPhaseDim);
  for (int a = 0; a < kPhaseDim; ++a) {
    for (int b = 0; b < kPhaseDim; ++b) out(a, b) = m(a, b);
  }
  return out;
}

}  // namespace hidsym::detail
