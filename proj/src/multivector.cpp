#include "hidsym/multivector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "jet_util.hpp"

namespace hidsym {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Stack the per-axis derivatives d[rho] into an array with the derivative index in slot 0.
MultiIndexArray stack_derivatives(const std::vector<MultiIndexArray>& d) {
  std::vector<std::size_t> dims{d.size()};
  dims.insert(dims.end(), d.front().dims().begin(), d.front().dims().end());
  MultiIndexArray out(dims);
  const std::size_t block = d.front().size();
  for (std::size_t rho = 0; rho < d.size(); ++rho) {
    std::copy(d[rho].data().begin(), d[rho].data().end(), out.data().begin() + static_cast<std::ptrdiff_t>(rho * block));
  }
  return out;
}

/// Slice slot-0 index rho out of a derivative array.
MultiIndexArray slice(const MultiIndexArray& d, std::size_t rho) {
  std::vector<std::size_t> dims(d.dims().begin() + 1, d.dims().end());
  MultiIndexArray out(dims);
  const std::size_t block = out.size();
  std::copy(d.data().begin() + static_cast<std::ptrdiff_t>(rho * block),
            d.data().begin() + static_cast<std::ptrdiff_t>((rho + 1) * block), out.data().begin());
  return out;
}

template <class T>
using V4 = Eigen::Matrix<T, 4, 1>;

/// Field from a component expression templated over the scalar type;
/// fn(y) returns 4^k values in row-major order.
template <class Fn>
SymmetricMultivectorField jet_field(std::string name, int degree, Fn fn) {
  auto components = [fn, degree](const Vec4& x) {
    const std::vector<double> v = fn(V4<double>(x));
    MultiIndexArray out = MultiIndexArray::uniform(static_cast<std::size_t>(degree), 4);
    std::copy(v.begin(), v.end(), out.data().begin());
    return out;
  };
  auto dcomponents = [fn, degree](const Vec4& x) {
    const std::vector<detail::Jet4> v = fn(detail::seed(x));
    MultiIndexArray out = MultiIndexArray::uniform(static_cast<std::size_t>(degree) + 1, 4);
    const std::size_t block = v.size();
    for (std::size_t rho = 0; rho < 4; ++rho) {
      for (std::size_t i = 0; i < block; ++i) out.data()[rho * block + i] = v[i].v[static_cast<int>(rho)];
    }
    return out;
  };
  return SymmetricMultivectorField(std::move(name), degree, components, dcomponents);
}

/// Vector field from an expression returning V4<T>.
template <class Fn>
SymmetricMultivectorField jet_vector(std::string name, Fn fn) {
  return jet_field(std::move(name), 1, [fn](const auto& y) {
    using T = typename std::decay_t<decltype(y)>::Scalar;
    const V4<T> v = fn(y);
    return std::vector<T>{v[0], v[1], v[2], v[3]};
  });
}

template <class T>
V4<T> unit(int i) {
  V4<T> v = V4<T>::Constant(T(0.0));
  v[i] = T(1.0);
  return v;
}

// Inverse Boyer-Lindquist metric, row-major.
template <class T>
std::vector<T> kerr_inverse(const V4<T>& x, double M, double a) {
  using std::cos;
  using std::sin;
  const T r = x[1];
  const T s = sin(x[2]);
  const T c = cos(x[2]);
  const T sigma = r * r + a * a * c * c;
  const T delta = r * r - 2.0 * M * r + a * a;
  const T rr = r * r + a * a;
  std::vector<T> g(16, T(0.0));
  g[0] = -(rr * rr - a * a * delta * s * s) / (sigma * delta);
  g[3] = g[12] = -2.0 * M * a * r / (sigma * delta);
  g[5] = delta / sigma;
  g[10] = T(1.0) / sigma;
  g[15] = (delta - a * a * s * s) / (sigma * delta * s * s);
  return g;
}

SymmetricMultivectorField carter_field(double M, double a) {
  return jet_field("carter", 2, [M, a](const auto& y) {
    using T = typename std::decay_t<decltype(y)>::Scalar;
    using std::cos;
    using std::sin;
    const T s = sin(y[2]);
    const T c = cos(y[2]);
    std::vector<T> k = kerr_inverse(y, M, a);
    for (auto& e : k) e = -a * a * c * c * e;
    V4<T> w = V4<T>::Constant(T(0.0));
    w[0] = a * s;
    w[3] = T(1.0) / s;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) k[static_cast<std::size_t>(4 * i + j)] += w[i] * w[j];
    }
    k[10] += T(1.0);
    return k;
  });
}

SymmetricMultivectorField radial_control() {
  return jet_field("radial_control", 2, [](const auto& y) {
    using T = typename std::decay_t<decltype(y)>::Scalar;
    std::vector<T> k(16, T(0.0));
    k[5] = y[1] * y[1];
    return k;
  });
}

SymmetricMultivectorField rotation_x() {
  return jet_vector("rot_x", [](const auto& y) {
    using T = typename std::decay_t<decltype(y)>::Scalar;
    using std::cos;
    using std::sin;
    V4<T> v = V4<T>::Constant(T(0.0));
    v[2] = -sin(y[3]);
    v[3] = -cos(y[2]) / sin(y[2]) * cos(y[3]);
    return v;
  });
}

SymmetricMultivectorField rotation_y() {
  return jet_vector("rot_y", [](const auto& y) {
    using T = typename std::decay_t<decltype(y)>::Scalar;
    using std::cos;
    using std::sin;
    V4<T> v = V4<T>::Constant(T(0.0));
    v[2] = cos(y[3]);
    v[3] = -cos(y[2]) / sin(y[2]) * sin(y[3]);
    return v;
  });
}

SymmetricMultivectorField coordinate_field(std::string name, int axis) {
  return jet_vector(std::move(name), [axis](const auto& y) {
    using T = typename std::decay_t<decltype(y)>::Scalar;
    return unit<T>(axis);
  });
}

// a-th coordinate times d_b minus b-th coordinate times d_a (sign = -1), or plus (boosts).
SymmetricMultivectorField linear_field(std::string name, int a, int b, double sign) {
  return jet_vector(std::move(name), [a, b, sign](const auto& y) {
    using T = typename std::decay_t<decltype(y)>::Scalar;
    V4<T> v = V4<T>::Constant(T(0.0));
    v[b] = y[a];
    v[a] = sign * y[b];
    return v;
  });
}

struct KillingSpec {
  std::string name;
  std::string description;
};

bool is_spherical_chart(const SpacetimeMetric& metric) {
  if (metric.name() != "minkowski") return true;
  const auto it = metric.params().find("spherical");
  return it != metric.params().end() && it->second != 0.0;
}

std::vector<KillingSpec> killing_specs(const SpacetimeMetric& metric) {
  if (metric.name() == "minkowski" && !is_spherical_chart(metric)) {
    return {{"boost_x", "x d_t + t d_x"},       {"boost_y", "y d_t + t d_y"},  {"boost_z", "z d_t + t d_z"},
            {"dt", "time translation d_t"},     {"dx", "translation d_x"},     {"dy", "translation d_y"},
            {"dz", "translation d_z"},          {"rot_xy", "x d_y - y d_x"},   {"rot_yz", "y d_z - z d_y"},
            {"rot_zx", "z d_x - x d_z"}};
  }
  if (metric.name() == "kerr") {
    return {{"carter", "Carter Killing 2-tensor (hidden symmetry)"},
            {"dphi", "axial symmetry d_phi"},
            {"dt", "stationarity d_t"}};
  }
  return {{"dphi", "rotation about z, d_phi"},
          {"dt", "time translation d_t"},
          {"rot_x", "rotation about x: -sin(phi) d_theta - cot(theta) cos(phi) d_phi"},
          {"rot_y", "rotation about y: cos(phi) d_theta - cot(theta) sin(phi) d_phi"}};
}

}  // namespace

// ---------------------------------------------------------------------------

SymmetricMultivectorField::SymmetricMultivectorField(std::string name, int degree, Eval components, Eval dcomponents,
                                                     DiffConfig cfg)
    : name_(std::move(name)),
      degree_(degree),
      components_(std::move(components)),
      dcomponents_(std::move(dcomponents)),
      diff_(cfg) {
  if (degree_ < 0) throw UnsupportedDegree("SymmetricMultivectorField: negative degree");
  if (!components_) throw ParameterError("SymmetricMultivectorField: missing component evaluator");
  diff_.validate();
}

MultiIndexArray SymmetricMultivectorField::components(const Vec4& x) const {
  MultiIndexArray c = components_(x);
  if (c.rank() != static_cast<std::size_t>(degree_)) {
    throw DimensionMismatch("SymmetricMultivectorField '" + name_ + "': evaluator rank differs from degree");
  }
  return c;
}

MultiIndexArray SymmetricMultivectorField::dcomponents(const Vec4& x) const {
  if (!dcomponents_) return dcomponents_finite_difference(x);
  MultiIndexArray d = dcomponents_(x);
  if (d.rank() != static_cast<std::size_t>(degree_) + 1) {
    throw DimensionMismatch("SymmetricMultivectorField '" + name_ + "': derivative rank differs from degree + 1");
  }
  return d;
}

MultiIndexArray SymmetricMultivectorField::dcomponents_finite_difference(const Vec4& x) const {
  std::vector<MultiIndexArray> d;
  d.reserve(4);
  for (std::size_t rho = 0; rho < 4; ++rho) d.push_back(partial_derivative(components_, x, rho, diff_));
  return stack_derivatives(d);
}

SymmetricMultivectorField SymmetricMultivectorField::renamed(std::string name) const {
  SymmetricMultivectorField out = *this;
  out.name_ = std::move(name);
  return out;
}

SymmetricMultivectorField SymmetricMultivectorField::scaled(double factor) const {
  Eval c = [f = components_, factor](const Vec4& x) { return f(x) * factor; };
  Eval d;
  if (dcomponents_) d = [f = dcomponents_, factor](const Vec4& x) { return f(x) * factor; };
  return SymmetricMultivectorField(name_, degree_, c, d, diff_);
}

SkewMultivectorField::SkewMultivectorField(std::size_t dim, int degree, Eval components, DiffConfig cfg)
    : dim_(dim), degree_(degree), components_(std::move(components)), diff_(cfg) {
  if (degree_ < 0) throw UnsupportedDegree("SkewMultivectorField: negative degree");
  diff_.validate();
}

MultiIndexArray SkewMultivectorField::components(const Point& x) const {
  if (x.size() != dim_) throw DimensionMismatch("SkewMultivectorField: point dimension mismatch");
  return components_(x);
}

MultiIndexArray SkewMultivectorField::derivative(const Point& x, std::size_t axis) const {
  if (axis >= dim_) throw IndexError("SkewMultivectorField: derivative axis out of range");
  return partial_derivative(components_, x, axis, diff_);
}

// ---------------------------------------------------------------------------

MultiIndexArray schouten_sym(const SymmetricMultivectorField& K, const SymmetricMultivectorField& L, const Vec4& x) {
  const int k = K.degree();
  const int l = L.degree();
  if (k < 1 || l < 1) throw UnsupportedDegree("schouten_sym: degree-0 arguments are not supported");
  const MultiIndexArray Kc = K.components(x);
  const MultiIndexArray Lc = L.components(x);
  const MultiIndexArray dK = K.dcomponents(x);
  const MultiIndexArray dL = L.dcomponents(x);

  const int n = k + l - 1;
  MultiIndexArray raw = MultiIndexArray::uniform(static_cast<std::size_t>(n), 4);
  std::vector<std::size_t> ia(static_cast<std::size_t>(k));
  std::vector<std::size_t> ib(static_cast<std::size_t>(l) + 1);
  std::vector<std::size_t> ic(static_cast<std::size_t>(l));
  std::vector<std::size_t> id(static_cast<std::size_t>(k) + 1);
  for (std::size_t flat = 0; flat < raw.size(); ++flat) {
    const std::vector<std::size_t> idx = raw.unflatten(flat);
    double value = 0.0;
    for (std::size_t rho = 0; rho < 4; ++rho) {
      // k K^{rho idx[0..k-2]} d_rho L^{idx[k-1..]}
      ia[0] = rho;
      std::copy(idx.begin(), idx.begin() + (k - 1), ia.begin() + 1);
      ib[0] = rho;
      std::copy(idx.begin() + (k - 1), idx.end(), ib.begin() + 1);
      value += k * Kc.at(ia) * dL.at(ib);
      // l L^{rho idx[0..l-2]} d_rho K^{idx[l-1..]}
      ic[0] = rho;
      std::copy(idx.begin(), idx.begin() + (l - 1), ic.begin() + 1);
      id[0] = rho;
      std::copy(idx.begin() + (l - 1), idx.end(), id.begin() + 1);
      value -= l * Lc.at(ic) * dK.at(id);
    }
    raw.data()[flat] = value;
  }
  return symmetrize(raw);
}

SymmetricMultivectorField schouten_sym_field(const SymmetricMultivectorField& K, const SymmetricMultivectorField& L) {
  if (K.degree() < 1 || L.degree() < 1) throw UnsupportedDegree("schouten_sym: degree-0 arguments are not supported");
  return SymmetricMultivectorField("[" + K.name() + "," + L.name() + "]", K.degree() + L.degree() - 1,
                                   [K, L](const Vec4& x) { return schouten_sym(K, L, x); });
}

Vec4 lie_bracket_vector(const SymmetricMultivectorField& X, const SymmetricMultivectorField& Y, const Vec4& x) {
  if (X.degree() != 1 || Y.degree() != 1) throw UnsupportedDegree("lie_bracket_vector: degree-1 fields required");
  const MultiIndexArray Xc = X.components(x);
  const MultiIndexArray Yc = Y.components(x);
  const MultiIndexArray dX = X.dcomponents(x);
  const MultiIndexArray dY = Y.dcomponents(x);
  Vec4 out = Vec4::Zero();
  for (int a = 0; a < 4; ++a) {
    for (int d = 0; d < 4; ++d) out[a] += Xc(d) * dY(d, a) - Yc(d) * dX(d, a);
  }
  return out;
}

MultiIndexArray schouten_skew(const SkewMultivectorField& P, const SkewMultivectorField& Q,
                              const SkewMultivectorField::Point& x) {
  const int p = P.degree();
  const int q = Q.degree();
  if (P.dim() != Q.dim()) throw DimensionMismatch("schouten_skew: chart dimensions differ");
  const std::size_t n = P.dim();
  if (p == 2 && q == 1) return schouten_skew(Q, P, x) * -1.0;

  const MultiIndexArray Pc = P.components(x);
  const MultiIndexArray Qc = Q.components(x);
  std::vector<MultiIndexArray> dP;
  std::vector<MultiIndexArray> dQ;
  for (std::size_t d = 0; d < n; ++d) {
    dP.push_back(P.derivative(x, d));
    dQ.push_back(Q.derivative(x, d));
  }

  if (p == 1 && q == 1) {
    MultiIndexArray out = MultiIndexArray::uniform(1, n);
    for (std::size_t a = 0; a < n; ++a) {
      double v = 0.0;
      for (std::size_t d = 0; d < n; ++d) v += Pc(d) * dQ[d](a) - Qc(d) * dP[d](a);
      out(a) = v;
    }
    return out;
  }
  if (p == 1 && q == 2) {
    // Lie derivative of the bivector along the vector field.
    MultiIndexArray out = MultiIndexArray::uniform(2, n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        double v = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
          v += Pc(d) * dQ[d](a, b) - Qc(d, b) * dP[d](a) - Qc(a, d) * dP[d](b);
        }
        out(a, b) = v;
      }
    }
    return out;
  }
  if (p == 2 && q == 2) {
    MultiIndexArray out = MultiIndexArray::uniform(3, n);
    auto term = [&](std::size_t a, std::size_t b, std::size_t c) {
      double v = 0.0;
      for (std::size_t d = 0; d < n; ++d) v += Pc(d, a) * dQ[d](b, c) + Qc(d, a) * dP[d](b, c);
      return v;
    };
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t c = 0; c < n; ++c) out(a, b, c) = term(a, b, c) + term(b, c, a) + term(c, a, b);
      }
    }
    return out;
  }
  throw UnsupportedDegree("schouten_skew: degree pair (" + std::to_string(p) + "," + std::to_string(q) +
                          ") not supported");
}

MultiIndexArray wedge(const MultiIndexArray& a, const MultiIndexArray& b) {
  if (a.rank() == 0) return b * a.value();
  if (b.rank() == 0) return a * b.value();
  if (a.dims().front() != b.dims().front()) throw DimensionMismatch("wedge: slot dimensions differ");
  std::vector<std::size_t> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  MultiIndexArray outer(dims);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) outer.data()[i * b.size() + j] = a.data()[i] * b.data()[j];
  }
  const int p = static_cast<int>(a.rank());
  const int q = static_cast<int>(b.rank());
  return antisymmetrize(outer) * (factorial(p + q) / (factorial(p) * factorial(q)));
}

double contract_all(const MultiIndexArray& components, const Vec4& covector) {
  double total = 0.0;
  for (std::size_t flat = 0; flat < components.size(); ++flat) {
    double term = components.data()[flat];
    if (term == 0.0) continue;
    std::size_t rem = flat;
    for (std::size_t s = components.rank(); s-- > 0;) {
      term *= covector[static_cast<Eigen::Index>(rem % 4)];
      rem /= 4;
    }
    total += term;
  }
  return total;
}

double pi_star(const SymmetricMultivectorField& K, const Vec4& x, const Vec4& p) {
  return contract_all(K.components(x), p);
}

MultiIndexArray killing_residual(const SymmetricMultivectorField& K, const SpacetimeMetric& metric, const Vec4& x) {
  const int k = K.degree();
  if (k < 1) throw UnsupportedDegree("killing_residual: degree must be at least 1");
  metric.require_domain(x);
  const Mat4 ginv = metric.ginv(x);
  const auto chr = christoffel_symbols(ginv, metric.dg(x));
  const MultiIndexArray Kc = K.components(x);
  const MultiIndexArray dK = K.dcomponents(x);

  // nabla_rho K^{l...}, derivative slot first
  MultiIndexArray cov = dK;
  std::vector<std::size_t> src(static_cast<std::size_t>(k));
  for (std::size_t flat = 0; flat < cov.size(); ++flat) {
    const std::vector<std::size_t> idx = cov.unflatten(flat);
    const std::size_t rho = idx[0];
    double v = 0.0;
    for (int s = 0; s < k; ++s) {
      std::copy(idx.begin() + 1, idx.end(), src.begin());
      const std::size_t lam = idx[static_cast<std::size_t>(s) + 1];
      for (std::size_t sigma = 0; sigma < 4; ++sigma) {
        src[static_cast<std::size_t>(s)] = sigma;
        v += chr[lam](rho, sigma) * Kc.at(src);
      }
    }
    cov.data()[flat] += v;
  }
  // raise the derivative index
  MultiIndexArray raised(cov.dims());
  const std::size_t block = Kc.size();
  for (std::size_t mu = 0; mu < 4; ++mu) {
    for (std::size_t rho = 0; rho < 4; ++rho) {
      const double w = ginv(static_cast<Eigen::Index>(mu), static_cast<Eigen::Index>(rho));
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < block; ++i) raised.data()[mu * block + i] += w * cov.data()[rho * block + i];
    }
  }
  return symmetrize(raised);
}

MultiIndexArray killing_residual_schouten(const SymmetricMultivectorField& K, const SpacetimeMetric& metric,
                                          const Vec4& x) {
  return schouten_sym(K, inverse_metric_field(metric), x) * -0.5;
}

// ---------------------------------------------------------------------------

namespace {

MultiIndexArray mat_to_array(const Mat4& m) {
  MultiIndexArray out = MultiIndexArray::uniform(2, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out(i, j) = m(i, j);
  }
  return out;
}

MultiIndexArray derivative_to_array(const MetricDerivative& d) {
  MultiIndexArray out = MultiIndexArray::uniform(3, 4);
  for (int r = 0; r < 4; ++r) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) out(r, i, j) = d[static_cast<std::size_t>(r)](i, j);
    }
  }
  return out;
}

MultiIndexArray outer(const MultiIndexArray& a, const MultiIndexArray& b) {
  std::vector<std::size_t> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  MultiIndexArray out(dims);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out.data()[i * b.size() + j] = a.data()[i] * b.data()[j];
  }
  return out;
}

}  // namespace

SymmetricMultivectorField inverse_metric_field(const SpacetimeMetric& metric) {
  return SymmetricMultivectorField(
      "ginv", 2, [metric](const Vec4& x) { return mat_to_array(metric.ginv(x)); },
      [metric](const Vec4& x) { return derivative_to_array(metric.dginv(x)); });
}

SymmetricMultivectorField unscaled_inverse_metric_field(const SpacetimeMetric& metric, const ScaleConstants& scales) {
  scales.validate();
  const double f = std::pow(scales.hbar0 / (scales.m * scales.c0), 2);
  return inverse_metric_field(metric).scaled(f).renamed("Ghat");
}

SymmetricMultivectorField symmetric_product(const SymmetricMultivectorField& K, const SymmetricMultivectorField& L) {
  const int k = K.degree();
  const int l = L.degree();
  auto components = [K, L](const Vec4& x) {
    MultiIndexArray o = outer(K.components(x), L.components(x));
    return o.rank() > 1 ? symmetrize(o) : o;
  };
  auto dcomponents = [K, L, k, l](const Vec4& x) {
    const MultiIndexArray Kc = K.components(x);
    const MultiIndexArray Lc = L.components(x);
    const MultiIndexArray dK = K.dcomponents(x);
    const MultiIndexArray dL = L.dcomponents(x);
    std::vector<MultiIndexArray> d;
    for (std::size_t rho = 0; rho < 4; ++rho) {
      MultiIndexArray o = outer(slice(dK, rho), Lc) + outer(Kc, slice(dL, rho));
      d.push_back(k + l > 1 ? symmetrize(o) : o);
    }
    return stack_derivatives(d);
  };
  return SymmetricMultivectorField(K.name() + "*" + L.name(), k + l, components, dcomponents);
}

SymmetricMultivectorField linear_combination(const SymmetricMultivectorField& K, double a,
                                             const SymmetricMultivectorField& L, double b) {
  if (K.degree() != L.degree()) throw DimensionMismatch("linear_combination: degrees differ");
  return SymmetricMultivectorField(
      K.name() + "+" + L.name(), K.degree(),
      [K, L, a, b](const Vec4& x) { return K.components(x) * a + L.components(x) * b; },
      [K, L, a, b](const Vec4& x) { return K.dcomponents(x) * a + L.dcomponents(x) * b; });
}

SymmetricMultivectorField polynomial_field(int degree, std::uint64_t seed, double coefficient_scale) {
  if (degree < 0) throw UnsupportedDegree("polynomial_field: negative degree");
  const std::size_t n = ipow(4, degree);
  // One quadratic per component: c0 + c1 . x + x . C2 . x (15 coefficients).
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, coefficient_scale);
  std::vector<std::array<double, 15>> coeffs(n);
  for (auto& c : coeffs) {
    for (double& v : c) v = normal(rng);
  }
  // Components with the same sorted multi-index share a polynomial.
  std::vector<std::size_t> canonical(n);
  MultiIndexArray shape = MultiIndexArray::uniform(static_cast<std::size_t>(degree), 4);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::vector<std::size_t> idx = shape.unflatten(flat);
    std::sort(idx.begin(), idx.end());
    std::size_t key = 0;
    for (std::size_t i : idx) key = key * 4 + i;
    canonical[flat] = key;
  }
  return jet_field("poly" + std::to_string(degree) + "_" + std::to_string(seed), degree,
                   [coeffs, canonical](const auto& y) {
                     using T = typename std::decay_t<decltype(y)>::Scalar;
                     std::vector<T> out(canonical.size());
                     for (std::size_t i = 0; i < canonical.size(); ++i) {
                       const auto& c = coeffs[canonical[i]];
                       T v = T(c[0]);
                       for (int a = 0; a < 4; ++a) v += c[static_cast<std::size_t>(1 + a)] * y[a];
                       std::size_t w = 5;
                       for (int a = 0; a < 4; ++a) {
                         for (int b = a; b < 4; ++b) v += c[w++] * y[a] * y[b];
                       }
                       out[i] = v;
                     }
                     return out;
                   });
}

std::vector<std::string> killing_field_names(const SpacetimeMetric& metric) {
  std::vector<std::string> names;
  for (const auto& s : killing_specs(metric)) names.push_back(s.name);
  return names;
}

std::vector<CatalogEntry> killing_field_entries(const SpacetimeMetric& metric) {
  std::vector<CatalogEntry> out;
  for (const auto& s : killing_specs(metric)) out.push_back({s.name, s.description});
  return out;
}

SymmetricMultivectorField killing_field(const SpacetimeMetric& metric, const std::string& name,
                                        const ScaleConstants& scales) {
  if (name == "ginv") return inverse_metric_field(metric);
  if (name == "Ghat") return unscaled_inverse_metric_field(metric, scales);
  if (name == "radial_control") {
    if (!is_spherical_chart(metric)) throw ParameterError("radial_control needs a (t, r, theta, phi) chart");
    return radial_control();
  }
  const auto names = killing_field_names(metric);
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ParameterError("unknown Killing field '" + name + "' for metric '" + metric.name() + "'");
  }
  if (name == "dt") return coordinate_field("dt", 0);
  if (metric.name() == "minkowski" && !is_spherical_chart(metric)) {
    if (name == "dx") return coordinate_field("dx", 1);
    if (name == "dy") return coordinate_field("dy", 2);
    if (name == "dz") return coordinate_field("dz", 3);
    if (name == "rot_xy") return linear_field("rot_xy", 1, 2, -1.0);
    if (name == "rot_yz") return linear_field("rot_yz", 2, 3, -1.0);
    if (name == "rot_zx") return linear_field("rot_zx", 3, 1, -1.0);
    if (name == "boost_x") return linear_field("boost_x", 1, 0, 1.0);
    if (name == "boost_y") return linear_field("boost_y", 2, 0, 1.0);
    return linear_field("boost_z", 3, 0, 1.0);
  }
  if (name == "dphi") return coordinate_field("dphi", 3);
  if (name == "rot_x") return rotation_x();
  if (name == "rot_y") return rotation_y();
  return carter_field(metric.param("M"), metric.param("a"));
}

}  // namespace hidsym
