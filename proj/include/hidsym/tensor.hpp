#pragma once

// Dense small-tensor storage for the coordinate component arrays used
// throughout the library (metric components, multivector components,
// Schouten brackets). Row-major over slots.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "hidsym/errors.hpp"

namespace hidsym {

class MultiIndexArray {
 public:
  MultiIndexArray() : data_(1, 0.0) {}
  explicit MultiIndexArray(std::vector<std::size_t> dims, double fill = 0.0);

  /// rank slots of equal dimension `dim`.
  static MultiIndexArray uniform(std::size_t rank, std::size_t dim, double fill = 0.0);
  static MultiIndexArray scalar(double value);

  std::size_t rank() const noexcept { return dims_.size(); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double& at(std::span<const std::size_t> idx) { return data_[offset(idx)]; }
  double at(std::span<const std::size_t> idx) const { return data_[offset(idx)]; }

  template <class... I>
  double& operator()(I... idx) {
    const std::size_t ix[] = {static_cast<std::size_t>(idx)...};
    return data_[offset(ix)];
  }
  template <class... I>
  double operator()(I... idx) const {
    const std::size_t ix[] = {static_cast<std::size_t>(idx)...};
    return data_[offset(ix)];
  }
  // rank-0 access
  double value() const { return data_.at(0); }

  /// Decompose a flat index into slot indices.
  std::vector<std::size_t> unflatten(std::size_t flat) const;

  bool uniform_dims() const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  MultiIndexArray& operator+=(const MultiIndexArray& o);
  MultiIndexArray& operator-=(const MultiIndexArray& o);
  MultiIndexArray& operator*=(double s) noexcept;

  friend MultiIndexArray operator+(MultiIndexArray a, const MultiIndexArray& b) { return a += b; }
  friend MultiIndexArray operator-(MultiIndexArray a, const MultiIndexArray& b) { return a -= b; }
  friend MultiIndexArray operator*(MultiIndexArray a, double s) { return a *= s; }
  friend MultiIndexArray operator*(double s, MultiIndexArray a) { return a *= s; }

 private:
  std::size_t offset(std::span<const std::size_t> idx) const;
  void require_same_shape(const MultiIndexArray& o) const;

  std::vector<std::size_t> dims_;
  std::vector<double> data_;
};

/// Average over all permutations of the slots. All slots must share one dimension.
MultiIndexArray symmetrize(const MultiIndexArray& a);

/// Alternating average over all slot permutations.
MultiIndexArray antisymmetrize(const MultiIndexArray& a);

double max_abs_diff(const MultiIndexArray& a, const MultiIndexArray& b);

}  // namespace hidsym
