#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "test_support.hpp"

using namespace hidsym;

namespace {

// Coefficient of e^0 ^ ... ^ e^6 in one ^ two^3 with two = (1/2) two_ab e^a ^ e^b,
// summed over all 5040 permutations.
double brute_top_wedge(const Vec7& one, const Mat7& two) {
  std::array<int, 7> s;
  std::iota(s.begin(), s.end(), 0);
  double total = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < 7; ++i)
      for (int j = i + 1; j < 7; ++j) inversions += s[i] > s[j];
    const double sign = inversions % 2 == 0 ? 1.0 : -1.0;
    total += sign * one[s[0]] * two(s[1], s[2]) * two(s[3], s[4]) * two(s[5], s[6]);
  } while (std::next_permutation(s.begin(), s.end()));
  return total / 8.0;
}

Mat7 random_antisymmetric(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat7 m;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) m(i, j) = g(rng);
  return m - m.transpose();
}

}  // namespace

TEST_CASE("normalization of the contact map, time form and unscaled time form") {
  const ScaleConstants sc = test::odd_scales();
  for (const auto& name : test::catalog_metrics()) {
    const auto metric = metric_catalog(name);
    const auto s = gravitational_structure(metric, sc);
    double worst = 0.0;
    for (const auto& p : test::points(*s, 200, 1)) {
      // Independent construction from the metric alone.
      const Mat4 g = metric.g(p.x);
      Vec4 delta0;
      delta0 << 1.0, p.v;
      const double alpha = 1.0 / std::sqrt(-delta0.dot(g * delta0));
      const Vec4 d_oracle = sc.c0 * alpha * delta0;

      const PhaseFrame f = s->frame(p);
      const ContactMap cm = contact_map(f);
      const TimeForm tf = time_form(f);
      const Mat4 G_hat_inv = rescaled_metrics(metric, sc, p.x).G_hat_inv;
      worst = std::max({worst, (cm.d - d_oracle).cwiseAbs().maxCoeff() / sc.c0,
                        std::abs(cm.d.dot(g * cm.d) + sc.c0 * sc.c0) / (sc.c0 * sc.c0), std::abs(tf.tau.dot(cm.d) - 1.0),
                        std::abs(-tf.tau_hat.dot(G_hat_inv * tf.tau_hat) - 1.0),
                        std::abs(tf.tau_hat.dot(cm.d_hat) - 1.0)});
    }
    INFO(name);
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("fibre maps and the complementary contact map") {
  const auto metric = metric_catalog("kerr");
  const auto s = gravitational_structure(metric, test::odd_scales());
  for (const auto& p : test::points(*s, 20, 2)) {
    const PhaseFrame f = s->frame(p);
    const NuTau nu = nu_tau(f);
    const Mat4 theta = complementary_contact_map(f);
    const ContactMap cm = contact_map(f);
    const TimeForm tf = time_form(f);
    CHECK(test::max_abs(nu.forward * nu.inverse - Mat3::Identity()) < 1e-12);
    CHECK((theta * cm.d).norm() < 1e-12);
    CHECK((tf.tau.transpose() * theta).norm() < 1e-12);
    CHECK(test::max_abs(theta * theta - theta) < 1e-12);
    CHECK((nu.inverse.transpose() * tf.tau).norm() < 1e-12);
  }
}

TEST_CASE("the dynamical connection is the geodesic spray in coordinate time") {
  for (const auto& name : test::catalog_metrics()) {
    const auto metric = metric_catalog(name);
    const auto s = gravitational_structure(metric);
    for (const auto& p : test::points(*s, 20, 3)) {
      const auto chr = christoffel_symbols(metric, p.x);
      Vec4 u;
      u << 1.0, p.v;
      Vec4 a;
      for (int nu = 0; nu < 4; ++nu) a[nu] = -u.dot(chr[nu] * u);
      const Vec3 oracle = a.tail<3>() - p.v * a[0];
      const PhaseFrame f = s->frame(p);
      const DynamicalConnection dc = dynamical_connection(f, s->connection(p, f));
      INFO(name);
      CHECK((dc.gamma - oracle).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(s->tau_hat(p).dot(dc.gamma_hat) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("contact pair: exact Omega, volume form and duality") {
  for (const auto& name : test::catalog_metrics()) {
    const auto s = gravitational_structure(metric_catalog(name), test::odd_scales());
    double omega_exact = 0.0, duality = 0.0, volume = 1e300;
    for (const auto& p : test::points(*s, 50, 4)) {
      const ContactPairReport r = verify_contact_pair(*s, p);
      omega_exact = std::max(omega_exact, r.omega_exact);
      duality = std::max(duality, r.duality.max());
      volume = std::min(volume, std::abs(r.volume_form));
      // Lambda inverts Omega on ker tau_hat as a matrix, so each 2x2 block flips sign.
      CHECK(r.volume_form * r.volume_bivector == doctest::Approx(-36.0).epsilon(1e-9));
    }
    INFO(name);
    CHECK(omega_exact <= 1e-6);
    CHECK(duality <= 1e-9);
    CHECK(volume > 1e-8);
  }
}

TEST_CASE("Jacobi pair brackets vanish") {
  for (const auto& name : test::catalog_metrics()) {
    const auto s = gravitational_structure(metric_catalog(name));
    for (const auto& p : test::points(*s, 5, 5)) {
      const JacobiPairReport r = verify_jacobi_pair(*s, p);
      INFO(name);
      CHECK(r.reeb_bracket <= 1e-6);
      CHECK(r.lambda_bracket <= 1e-6);
    }
  }
}

TEST_CASE("top wedge coefficient matches the permutation sum") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int i = 0; i < 5; ++i) {
    Vec7 one;
    for (int a = 0; a < 7; ++a) one[a] = g(rng);
    const Mat7 two = random_antisymmetric(rng);
    CHECK(top_wedge_coefficient(one, two) == doctest::Approx(brute_top_wedge(one, two)).epsilon(1e-10));
  }
}

TEST_CASE("pfaffian squares to the determinant") {
  std::mt19937_64 rng(10);
  for (int n : {2, 4, 6}) {
    const Mat7 big = random_antisymmetric(rng);
    const Eigen::MatrixXd a = big.topLeftCorner(n, n);
    const double pf = pfaffian(a);
    CHECK(pf * pf == doctest::Approx(a.determinant()).epsilon(1e-10));
  }
  Eigen::MatrixXd a(4, 4);
  a << 0, 1, 2, 3, -1, 0, 4, 5, -2, -4, 0, 6, -3, -5, -6, 0;
  CHECK(pfaffian(a) == doctest::Approx(1.0 * 6 - 2.0 * 5 + 3.0 * 4));
}

TEST_CASE("exterior derivatives of exact forms vanish") {
  const OneFormField beta = [](const Vec7& y) {
    Vec7 b;
    for (int a = 0; a < 7; ++a) b[a] = std::sin(y[a]) * y[(a + 1) % 7];
    return b;
  };
  Vec7 y;
  y << 0.1, 0.2, -0.3, 0.4, 0.5, -0.6, 0.7;
  const TwoFormField dbeta = [&beta](const Vec7& z) { return exterior_derivative_1form(beta, z); };
  CHECK(exterior_derivative_2form(dbeta, y).max_abs() < 1e-7);
  const Mat7 d = exterior_derivative_1form(beta, y);
  // d(sin(y0) y1 dy0) has the (1, 0) component sin(y0).
  CHECK(d(1, 0) - d(0, 1) == doctest::Approx(2.0 * std::sin(0.1) - 2.0 * (std::sin(0.2) * 0.0)).epsilon(1e-8));
}

TEST_CASE("inadmissible points are rejected") {
  const auto s = gravitational_structure(metric_catalog("minkowski"));
  PhasePoint p;
  p.v << 0.9, 0.9, 0.0;
  CHECK_FALSE(s->admissible(p));
  CHECK_THROWS_AS(s->frame(p), TimelikeViolation);
  const auto sch = gravitational_structure(metric_catalog("schwarzschild"));
  PhasePoint q;
  q.x << 0.0, 1.5, 1.0, 0.0;
  CHECK_FALSE(sch->admissible(q));
}

TEST_CASE("phase point coordinate roundtrip") {
  PhasePoint p;
  p.x << 1, 2, 3, 4;
  p.v << 5, 6, 7;
  const PhasePoint q = PhasePoint::from_coords(p.coords());
  CHECK(q.x == p.x);
  CHECK(q.v == p.v);
}
