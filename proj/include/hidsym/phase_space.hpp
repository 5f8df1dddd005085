#pragma once

// Phase space J1E of a test particle: 7 coordinates (x^0..x^3, x^1_0..x^3_0).
// Every 7-index array uses that basis order.

#include <memory>
#include <optional>

#include "hidsym/diff.hpp"
#include "hidsym/spacetime.hpp"
#include "hidsym/types.hpp"

namespace hidsym {

struct PhasePoint {
  Vec4 x = Vec4::Zero();
  Vec3 v = Vec3::Zero();

  Vec7 coords() const;
  static PhasePoint from_coords(const Vec7& y);
};

/// Frame contractions at one phase point; hat_g00 < 0 on admissible points.
struct PhaseFrame {
  double c = 1.0;
  double alpha0 = 1.0;     ///< 1 / sqrt(-hat_g00)
  double hat_g00 = -1.0;   ///< g(breve_delta0, breve_delta0) < 0
  double hat_G00 = -1.0;   ///< (m / hbar0) hat_g00
  Vec4 breve_delta0;       ///< (1, x^1_0, x^2_0, x^3_0)
  Mat34 breve_delta;       ///< delta^i_lambda - x^i_0 delta^0_lambda
  Vec4 breve_g0;           ///< g_{mu lambda} breve_delta0^mu
  Vec4 breve_G0;           ///< (m / hbar0) breve_g0
  Mat34 breve_G_up;        ///< breve_delta^i_rho G^{rho lambda}
  Mat34 breve_G_dn;        ///< G_{i mu} + alpha0^2 breve_g0_i breve_G0_mu
  Mat4 g;
  Mat4 ginv;
  ScaleConstants scales;
};

/// Throws TimelikeViolation when the lifted direction is not timelike.
PhaseFrame phase_frame(const SpacetimeMetric& metric, const ScaleConstants& scales, const PhasePoint& p);

struct ContactMap {
  Vec4 d;      ///< c alpha0 breve_delta0, g(d, d) = -c^2
  Vec4 d_hat;  ///< (hbar / m c^2) d
};
ContactMap contact_map(const PhaseFrame& f);

struct TimeForm {
  Vec4 tau;      ///< -(alpha0 / c) breve_g0
  Vec4 tau_hat;  ///< (m c^2 / hbar) tau
};
TimeForm time_form(const PhaseFrame& f);

struct NuTau {
  Mat34 forward;  ///< (1 / c alpha0) breve_delta^i_lambda
  Mat43 inverse;  ///< c alpha0 (delta^lambda_i - c alpha0 tau_i breve_delta0^lambda)
};
NuTau nu_tau(const PhaseFrame& f);

/// theta = id - d (x) tau, as a matrix acting on spacetime vectors.
Mat4 complementary_contact_map(const PhaseFrame& f);

/// Gamma^i_lambda = breve_delta^i_rho K_lambda^rho_sigma breve_delta0^sigma with K the
/// Levi-Civita spacetime connection (K = -Christoffel).
Mat34 phase_connection(const SpacetimeMetric& metric, const PhaseFrame& f, const Vec4& x);
Mat34 phase_connection(const std::array<Mat4, 4>& chr, const PhaseFrame& f);

struct DynamicalConnection {
  Vec3 gamma;      ///< gamma^i = Gamma^i_rho breve_delta0^rho
  Vec7 full;       ///< c alpha0 (breve_delta0, gamma)
  Vec7 gamma_hat;  ///< (hbar / m c^2) full, tau_hat(gamma_hat) = 1
};
DynamicalConnection dynamical_connection(const PhaseFrame& f, const Mat34& Gamma);

Mat7 phase_two_form(const PhaseFrame& f, const Mat34& Gamma);
Mat7 phase_two_vector(const PhaseFrame& f, const Mat34& Gamma);

/// Stored as tau_hat, Omega, gamma_hat, Lambda with tau_hat(gamma_hat) = 1.
/// The contact form is -tau_hat and the Reeb field is -gamma_hat.
struct StructureEvaluation {
  Vec7 tau_hat = Vec7::Zero();
  Mat7 Omega = Mat7::Zero();
  Vec7 gamma_hat = Vec7::Zero();
  Mat7 Lambda = Mat7::Zero();
};

/// Metric, scales and the phase connection evaluated on demand. The base
/// class uses the Levi-Civita connection; the joined electromagnetic
/// structure overrides connection().
class PhaseStructure {
 public:
  PhaseStructure(SpacetimeMetric metric, ScaleConstants scales);
  virtual ~PhaseStructure() = default;

  const SpacetimeMetric& metric() const noexcept { return metric_; }
  const ScaleConstants& scales() const noexcept { return scales_; }
  virtual std::string description() const;

  /// Inside the chart domain and timelike.
  bool admissible(const PhasePoint& p) const;
  PhaseFrame frame(const PhasePoint& p) const;
  virtual Mat34 connection(const PhasePoint& p, const PhaseFrame& f) const;

  StructureEvaluation evaluate(const PhasePoint& p) const;
  Vec7 tau_hat(const PhasePoint& p) const;
  Vec7 gamma_hat(const PhasePoint& p) const;
  Mat7 Omega(const PhasePoint& p) const;
  Mat7 Lambda(const PhasePoint& p) const;
  /// d tau_hat_lambda / d y^a (rows lambda, columns the 7 phase coordinates).
  Mat47 tau_hat_jacobian(const PhasePoint& p) const;

 protected:
  SpacetimeMetric metric_;
  ScaleConstants scales_;
};

using GravitationalStructure = PhaseStructure;
using StructurePtr = std::shared_ptr<const PhaseStructure>;

StructurePtr gravitational_structure(const SpacetimeMetric& metric, const ScaleConstants& scales = {});

// ---------------------------------------------------------------------------
// Exterior calculus on the phase chart (central differences).

using OneFormField = std::function<Vec7(const Vec7&)>;
using TwoFormField = std::function<Mat7(const Vec7&)>;

/// (d beta)_{ab} = d_a beta_b - d_b beta_a
Mat7 exterior_derivative_1form(const OneFormField& beta, const Vec7& y, const DiffConfig& cfg = {});
/// (d beta)_{abc} = d_a beta_{bc} + d_b beta_{ca} + d_c beta_{ab}
MultiIndexArray exterior_derivative_2form(const TwoFormField& beta, const Vec7& y, const DiffConfig& cfg = {});

/// Pfaffian of an even-dimensional antisymmetric matrix.
double pfaffian(const Eigen::MatrixXd& a);

/// Coefficient of a (x) b^3 on the ordered 7-basis, for a 1-form/2-form or
/// vector/bivector pair.
double top_wedge_coefficient(const Vec7& one, const Mat7& two);

struct DualityResiduals {
  double reeb_normalization = 0.0;  ///< |tau_hat(gamma_hat) - 1|
  double reeb_kernel = 0.0;         ///< max |gamma_hat^a Omega_ab|
  double lambda_kernel = 0.0;       ///< max |tau_hat_a Lambda^ab|
  double lambda_inverse = 0.0;      ///< max |Lambda Omega Lambda - Lambda|
  double omega_inverse = 0.0;       ///< max |Omega Lambda Omega - Omega|
  double max() const;
};
DualityResiduals duality_residuals(const StructureEvaluation& s);

struct ContactPairReport {
  double omega_exact = 0.0;     ///< max |Omega + d tau_hat|
  double volume_form = 0.0;     ///< coefficient of tau_hat ^ Omega^3
  double volume_bivector = 0.0; ///< coefficient of gamma_hat ^ Lambda^3
  DualityResiduals duality;
};
ContactPairReport verify_contact_pair(const PhaseStructure& s, const PhasePoint& p, const DiffConfig& cfg = {});

struct JacobiPairReport {
  double reeb_bracket = 0.0;    ///< max |[gamma_hat, Lambda]|
  double lambda_bracket = 0.0;  ///< max |[Lambda, Lambda] - 2 gamma_hat ^ Lambda|
};
JacobiPairReport verify_jacobi_pair(const PhaseStructure& s, const PhasePoint& p, const DiffConfig& cfg = {});
JacobiPairReport verify_jacobi_pair(const SpacetimeMetric& metric, const ScaleConstants& scales, const PhasePoint& p,
                                    const DiffConfig& cfg = {});

}  // namespace hidsym
