#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "test_support.hpp"

using namespace hidsym;

namespace {

// K^{l1..lk} p_{l1}..p_{lk}, contracted slot by slot.
double contract(const MultiIndexArray& K, const Vec4& p) {
  double total = 0.0;
  for (std::size_t flat = 0; flat < K.size(); ++flat) {
    double term = K.data()[flat];
    for (std::size_t i : K.unflatten(flat)) term *= p[static_cast<Eigen::Index>(i)];
    total += term;
  }
  return total;
}

using Eight = Eigen::Matrix<double, 8, 1>;

// Canonical bracket on T*M: {F, G} = dF/dp . dG/dx - dF/dx . dG/dp.
double canonical_bracket(const std::function<double(const Eight&)>& F, const std::function<double(const Eight&)>& G,
                         const Eight& z) {
  double total = 0.0;
  for (std::size_t mu = 0; mu < 4; ++mu) {
    total += partial_derivative(F, z, 4 + mu) * partial_derivative(G, z, mu);
    total -= partial_derivative(F, z, mu) * partial_derivative(G, z, 4 + mu);
  }
  return total;
}

std::function<double(const Eight&)> momentum_function(const SymmetricMultivectorField& K) {
  return [K](const Eight& z) { return contract(K.components(z.head<4>()), z.tail<4>()); };
}

}  // namespace

TEST_CASE("symmetric Schouten realizes the canonical Poisson bracket on T*M") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ux(-3.0, 3.0), up(-1.0, 1.0);
  const std::vector<std::pair<int, int>> degrees{{1, 1}, {1, 2}, {2, 2}};
  for (auto [k, l] : degrees) {
    const auto K = polynomial_field(k, 100 + k);
    const auto L = polynomial_field(l, 200 + l);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      Eight z;
      for (int a = 0; a < 4; ++a) z[a] = ux(rng);
      for (int a = 4; a < 8; ++a) z[a] = up(rng);
      const double oracle = canonical_bracket(momentum_function(K), momentum_function(L), z);
      const double got = pi_star(schouten_sym_field(K, L), z.head<4>(), z.tail<4>());
      worst = std::max(worst, std::abs(got - oracle) / std::max(1.0, std::abs(oracle)));
    }
    INFO("degrees " << k << "," << l);
    CHECK(worst <= 1e-8);
    CHECK(schouten_sym_field(K, L).degree() == k + l - 1);
  }
}

TEST_CASE("symmetric Schouten is antisymmetric and reduces to the Lie bracket") {
  const auto X = polynomial_field(1, 1);
  const auto Y = polynomial_field(1, 2);
  const auto K = polynomial_field(2, 3);
  const Vec4 x(0.5, -1.0, 2.0, 0.3);
  CHECK(max_abs_diff(schouten_sym(K, X, x), schouten_sym(X, K, x) * -1.0) < 1e-12);
  const auto xy = schouten_sym(X, Y, x);
  const Vec4 lie = lie_bracket_vector(X, Y, x);
  for (int a = 0; a < 4; ++a) CHECK(xy(a) == doctest::Approx(lie[a]).epsilon(1e-12));
  CHECK_THROWS_AS(schouten_sym(polynomial_field(0, 1), X, x), UnsupportedDegree);
}

TEST_CASE("catalog Killing fields") {
  struct Expect {
    std::string metric;
    std::size_t count;
  };
  for (const auto& [name, count] : {Expect{"minkowski", 10}, Expect{"schwarzschild", 4}, Expect{"kerr", 3}}) {
    const auto metric = metric_catalog(name);
    const auto s = gravitational_structure(metric);
    const auto names = killing_field_names(metric);
    CHECK(names.size() == count);
    const auto pts = test::points(*s, 10, 17);
    for (const auto& kn : names) {
      const auto K = killing_field(metric, kn);
      double worst = 0.0, worst_schouten = 0.0;
      for (const auto& p : pts) {
        worst = std::max(worst, killing_residual(K, metric, p.x).max_abs());
        worst_schouten = std::max(worst_schouten, killing_residual_schouten(K, metric, p.x).max_abs());
      }
      INFO(name << "/" << kn);
      CHECK(worst <= 1e-8);
      CHECK(worst_schouten <= 1e-8);
    }
  }
}

TEST_CASE("the ten Minkowski fields are linearly independent") {
  const auto metric = metric_catalog("minkowski");
  const auto names = killing_field_names(metric);
  // Three points leave a one-parameter stabilizer, so four are needed.
  const std::vector<Vec4> xs{
      {0.1, 0.7, -0.3, 1.1}, {1.0, -2.0, 0.5, 0.2}, {-0.4, 0.3, 1.7, -1.0}, {0.6, 0.0, -0.9, 0.4}};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(names.size()), 16);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto K = killing_field(metric, names[i]);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const auto c = K.components(xs[j]);
      for (int a = 0; a < 4; ++a) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(4 * j + a)) = c(a);
    }
  }
  CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(m).rank() == 10);
}

TEST_CASE("Killing fields close under the Schouten bracket") {
  for (const auto& name : test::catalog_metrics()) {
    const auto metric = metric_catalog(name);
    const auto s = gravitational_structure(metric);
    const auto names = killing_field_names(metric);
    const auto pts = test::points(*s, 3, 23);
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) {
        const auto B = schouten_sym_field(killing_field(metric, names[i]), killing_field(metric, names[j]));
        double worst = 0.0;
        for (const auto& p : pts) worst = std::max(worst, killing_residual(B, metric, p.x).max_abs());
        INFO(name << " [" << names[i] << "," << names[j] << "]");
        CHECK(worst <= 1e-7);
      }
    }
  }
}

TEST_CASE("Carter tensor reproduces the separated Carter constant") {
  const double M = 1.0, a = 0.6;
  const auto metric = metric_catalog("kerr", {{"M", M}, {"a", a}});
  const auto K = killing_field(metric, "carter");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vec4 x(0.0, 5.0 + 3.0 * (u(rng) + 1.0), 1.2 + 0.5 * u(rng), u(rng));
    const Vec4 p(u(rng), u(rng), u(rng), u(rng));
    const double th = x[2];
    const double E = -p[0], L = p[3];
    const double mu2 = -p.dot(metric.ginv(x) * p);
    const double lhs = a * E * std::sin(th) - L / std::sin(th);
    const double oracle = p[2] * p[2] + lhs * lhs + a * a * std::cos(th) * std::cos(th) * mu2;
    CHECK(pi_star(K, x, p) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("radial control field is not Killing") {
  const auto metric = metric_catalog("schwarzschild");
  const auto K = killing_field(metric, "radial_control");
  CHECK(killing_residual(K, metric, Vec4(0.0, 6.0, 1.0, 0.0)).max_abs() > 1e-3);
  CHECK_THROWS_AS(killing_field(metric_catalog("minkowski"), "radial_control"), ParameterError);
  CHECK_THROWS_AS(killing_field(metric, "boost_x"), ParameterError);
}

TEST_CASE("product, combination and scaling") {
  const auto X = polynomial_field(1, 4);
  const auto Y = polynomial_field(1, 5);
  const Vec4 x(0.2, 0.1, -0.7, 1.3), p(0.3, -0.2, 0.5, 0.9);
  CHECK(pi_star(symmetric_product(X, Y), x, p) == doctest::Approx(pi_star(X, x, p) * pi_star(Y, x, p)));
  CHECK(pi_star(linear_combination(X, 2.0, Y, -3.0), x, p) ==
        doctest::Approx(2.0 * pi_star(X, x, p) - 3.0 * pi_star(Y, x, p)));
  CHECK(pi_star(X.scaled(4.0), x, p) == doctest::Approx(4.0 * pi_star(X, x, p)));
  const auto P = symmetric_product(X, Y);
  CHECK(max_abs_diff(P.dcomponents(x), P.dcomponents_finite_difference(x)) < 1e-9);
  CHECK(polynomial_field(2, 9).components(x).max_abs() == polynomial_field(2, 9).components(x).max_abs());
}

// ---------------------------------------------------------------------------
// Skew brackets, checked through the interior-product characterization with a
// constant (hence closed) form b: i_{[P,Q]} b = (-1)^{pq+q} i_P d i_Q b + (-1)^p i_Q d i_P b.

namespace {

using Point = SkewMultivectorField::Point;

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// (i_P b)_{rest} = (1 / p!) P^{a1..ap} b_{a1..ap rest}
MultiIndexArray interior(const MultiIndexArray& P, const MultiIndexArray& b) {
  const std::size_t p = P.rank(), r = b.rank(), n = b.dims().front();
  MultiIndexArray out = MultiIndexArray::uniform(r - p, n);
  for (std::size_t fo = 0; fo < out.size(); ++fo) {
    const auto rest = out.unflatten(fo);
    double acc = 0.0;
    for (std::size_t fp = 0; fp < P.size(); ++fp) {
      auto idx = P.unflatten(fp);
      idx.insert(idx.end(), rest.begin(), rest.end());
      acc += P.data()[fp] * b.at(idx);
    }
    out.data()[fo] = acc / factorial(static_cast<int>(p));
  }
  return out;
}

// (d beta)_{a0..ar} = sum_i (-1)^i d_{a_i} beta_{a0..^a_i..ar}
MultiIndexArray exterior(const std::function<MultiIndexArray(const Point&)>& beta, const Point& x, std::size_t n) {
  const MultiIndexArray b0 = beta(x);
  const std::size_t r = b0.rank();
  std::vector<MultiIndexArray> db;
  for (std::size_t a = 0; a < n; ++a) db.push_back(partial_derivative(beta, x, a));
  MultiIndexArray out = MultiIndexArray::uniform(r + 1, n);
  for (std::size_t f = 0; f < out.size(); ++f) {
    const auto idx = out.unflatten(f);
    double acc = 0.0;
    for (std::size_t i = 0; i <= r; ++i) {
      std::vector<std::size_t> rest;
      for (std::size_t j = 0; j <= r; ++j)
        if (j != i) rest.push_back(idx[j]);
      acc += (i % 2 == 0 ? 1.0 : -1.0) * (r == 0 ? db[idx[i]].value() : db[idx[i]].at(rest));
    }
    out.data()[f] = acc;
  }
  return out;
}

MultiIndexArray random_skew(std::size_t rank, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MultiIndexArray a = MultiIndexArray::uniform(rank, n);
  for (double& v : a.data()) v = g(rng);
  return antisymmetrize(a);
}

// Skew field whose components are a random constant plus a random linear and
// quadratic dependence on the coordinates.
SkewMultivectorField random_skew_field(int degree, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const MultiIndexArray c0 = random_skew(static_cast<std::size_t>(degree), n, rng);
  std::vector<MultiIndexArray> c1, c2;
  for (std::size_t a = 0; a < n; ++a) {
    c1.push_back(random_skew(static_cast<std::size_t>(degree), n, rng));
    c2.push_back(random_skew(static_cast<std::size_t>(degree), n, rng));
  }
  return SkewMultivectorField(n, degree, [=](const Point& x) {
    MultiIndexArray out = c0;
    for (std::size_t a = 0; a < n; ++a) out += c1[a] * (0.3 * x[a]) + c2[a] * (0.1 * x[a] * x[(a + 1) % n]);
    return out;
  });
}

double characterization_residual(int p, int q, std::uint64_t seed) {
  const std::size_t n = 5;
  const auto P = random_skew_field(p, n, seed);
  const auto Q = random_skew_field(q, n, seed + 1);
  std::mt19937_64 rng(seed + 2);
  const MultiIndexArray b = random_skew(static_cast<std::size_t>(p + q - 1), n, rng);
  const Point x{0.3, -0.5, 0.8, 0.1, -1.2};
  const MultiIndexArray lhs = interior(schouten_skew(P, Q, x), b);
  const auto iQb = [&](const Point& y) { return interior(Q.components(y), b); };
  const auto iPb = [&](const Point& y) { return interior(P.components(y), b); };
  const double s1 = ((p * q + q) % 2 == 0) ? 1.0 : -1.0;
  const double s2 = (p % 2 == 0) ? 1.0 : -1.0;
  const MultiIndexArray rhs = interior(P.components(x), exterior(iQb, x, n)) * s1 +
                              interior(Q.components(x), exterior(iPb, x, n)) * s2;
  return max_abs_diff(lhs, rhs) / std::max(1.0, rhs.max_abs());
}

}  // namespace

TEST_CASE("skew Schouten satisfies the interior-product characterization") {
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 2}}) {
    INFO("degrees " << p << "," << q);
    CHECK(characterization_residual(p, q, 10 * p + q) < 1e-8);
  }
}

TEST_CASE("skew Schouten is graded antisymmetric") {
  const auto V = random_skew_field(1, 4, 1);
  const auto W = random_skew_field(1, 4, 2);
  const auto P = random_skew_field(2, 4, 3);
  const auto Q = random_skew_field(2, 4, 4);
  const Point x{0.2, 0.9, -0.4, 1.5};
  CHECK(max_abs_diff(schouten_skew(P, V, x), schouten_skew(V, P, x) * -1.0) < 1e-12);
  CHECK(max_abs_diff(schouten_skew(V, W, x), schouten_skew(W, V, x) * -1.0) < 1e-12);
  CHECK(max_abs_diff(schouten_skew(P, Q, x), schouten_skew(Q, P, x)) < 1e-12);
}

TEST_CASE("Lie-Poisson bivector on so(3)* has vanishing self-bracket") {
  const SkewMultivectorField Pi(3, 2, [](const Point& x) {
    MultiIndexArray m = MultiIndexArray::uniform(2, 3);
    m(0, 1) = x[2];
    m(1, 0) = -x[2];
    m(1, 2) = x[0];
    m(2, 1) = -x[0];
    m(2, 0) = x[1];
    m(0, 2) = -x[1];
    return m;
  });
  CHECK(schouten_skew(Pi, Pi, {0.4, -1.1, 0.7}).max_abs() < 1e-10);
  // Pi^{ij} = eps^{ijk} w_k is Poisson iff w . curl w = 0; w = (y, 0, 1) gives -1.
  const SkewMultivectorField bad(3, 2, [](const Point& x) {
    MultiIndexArray m = MultiIndexArray::uniform(2, 3);
    m(1, 2) = x[1];
    m(2, 1) = -x[1];
    m(0, 1) = 1.0;
    m(1, 0) = -1.0;
    return m;
  });
  CHECK(schouten_skew(bad, bad, {0.4, -1.1, 0.7}).max_abs() > 1e-2);
}

TEST_CASE("wedge of vectors") {
  MultiIndexArray a = MultiIndexArray::uniform(1, 3), b = MultiIndexArray::uniform(1, 3);
  a(0) = 1.0;
  b(1) = 2.0;
  const auto w = wedge(a, b);
  CHECK(w(0, 1) == doctest::Approx(2.0));
  CHECK(w(1, 0) == doctest::Approx(-2.0));
  CHECK(max_abs_diff(wedge(b, a), w * -1.0) < 1e-15);
  CHECK(wedge(MultiIndexArray::scalar(3.0), a)(0) == doctest::Approx(3.0));
}
