#include "hidsym/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hidsym {

MultiIndexArray::MultiIndexArray(std::vector<std::size_t> dims, double fill) : dims_(std::move(dims)) {
  std::size_t n = 1;
  for (auto d : dims_) {
    if (d == 0) throw DimensionMismatch("MultiIndexArray: zero-sized slot");
    n *= d;
  }
  data_.assign(n, fill);
}

MultiIndexArray MultiIndexArray::uniform(std::size_t rank, std::size_t dim, double fill) {
  return MultiIndexArray(std::vector<std::size_t>(rank, dim), fill);
}

MultiIndexArray MultiIndexArray::scalar(double value) {
  MultiIndexArray a;
  a.data_[0] = value;
  return a;
}

std::size_t MultiIndexArray::offset(std::span<const std::size_t> idx) const {
  if (idx.size() != dims_.size()) {
    throw IndexError("MultiIndexArray: expected " + std::to_string(dims_.size()) + " indices, got " +
                     std::to_string(idx.size()));
  }
  std::size_t off = 0;
  for (std::size_t s = 0; s < dims_.size(); ++s) {
    if (idx[s] >= dims_[s]) {
      throw IndexError("MultiIndexArray: index " + std::to_string(idx[s]) + " out of range in slot " +
                       std::to_string(s));
    }
    off = off * dims_[s] + idx[s];
  }
  return off;
}

std::vector<std::size_t> MultiIndexArray::unflatten(std::size_t flat) const {
  std::vector<std::size_t> idx(dims_.size());
  for (std::size_t s = dims_.size(); s-- > 0;) {
    idx[s] = flat % dims_[s];
    flat /= dims_[s];
  }
  return idx;
}

bool MultiIndexArray::uniform_dims() const noexcept {
  return std::adjacent_find(dims_.begin(), dims_.end(), std::not_equal_to<>()) == dims_.end();
}

double MultiIndexArray::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool MultiIndexArray::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void MultiIndexArray::require_same_shape(const MultiIndexArray& o) const {
  if (dims_ != o.dims_) throw DimensionMismatch("MultiIndexArray: shape mismatch");
}

MultiIndexArray& MultiIndexArray::operator+=(const MultiIndexArray& o) {
  require_same_shape(o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

MultiIndexArray& MultiIndexArray::operator-=(const MultiIndexArray& o) {
  require_same_shape(o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

MultiIndexArray& MultiIndexArray::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

namespace {

int permutation_sign(const std::vector<std::size_t>& perm) {
  int sign = 1;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

MultiIndexArray permutation_average(const MultiIndexArray& a, bool alternating) {
  if (!a.uniform_dims()) throw DimensionMismatch("symmetrize: slots have different dimensions");
  const std::size_t rank = a.rank();
  if (rank < 2) return a;

  std::vector<std::size_t> perm(rank);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> perms;
  std::vector<int> signs;
  do {
    perms.push_back(perm);
    signs.push_back(alternating ? permutation_sign(perm) : 1);
  } while (std::next_permutation(perm.begin(), perm.end()));

  MultiIndexArray out(a.dims());
  std::vector<std::size_t> permuted(rank);
  const double inv = 1.0 / static_cast<double>(perms.size());
  for (std::size_t flat = 0; flat < a.size(); ++flat) {
    const auto idx = a.unflatten(flat);
    double acc = 0.0;
    for (std::size_t p = 0; p < perms.size(); ++p) {
      for (std::size_t s = 0; s < rank; ++s) permuted[s] = idx[perms[p][s]];
      acc += signs[p] * a.at(permuted);
    }
    out.data()[flat] = acc * inv;
  }
  return out;
}

}  // namespace

MultiIndexArray symmetrize(const MultiIndexArray& a) { return permutation_average(a, false); }

MultiIndexArray antisymmetrize(const MultiIndexArray& a) { return permutation_average(a, true); }

double max_abs_diff(const MultiIndexArray& a, const MultiIndexArray& b) { return (a - b).max_abs(); }

}  // namespace hidsym
