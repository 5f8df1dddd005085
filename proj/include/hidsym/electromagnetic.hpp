#pragma once

// Joined gravitational + electromagnetic phase structure. The field enters
// through F_hat = (q / 2 hbar0) F; the joined 2-form is Omega[g] + F_hat pulled
// back to the phase space.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "hidsym/phase_space.hpp"

namespace hidsym {

class EMField {
 public:
  using Eval = std::function<Mat4(const Vec4&)>;
  /// [rho] -> d_rho F
  using DerivativeEval = std::function<std::array<Mat4, 4>(const Vec4&)>;

  EMField(std::string name, Params params, Eval F, DerivativeEval dF = {}, double closedness_margin = 1e-8,
          DiffConfig cfg = {1e-4, true, 2});

  const std::string& name() const noexcept { return name_; }
  const Params& params() const noexcept { return params_; }
  double closedness_margin() const noexcept { return margin_; }

  Mat4 F(const Vec4& x) const;
  std::array<Mat4, 4> dF(const Vec4& x) const;
  bool has_analytic_derivative() const noexcept { return static_cast<bool>(dF_); }

  /// max |F + F^T|
  double antisymmetry_residual(const Vec4& x) const;
  /// max |d_l F_mn + d_m F_nl + d_n F_lm|
  double closedness_residual(const Vec4& x) const;
  /// Throws ClosednessError if any point exceeds the margin.
  void require_closed(std::span<const Vec4> points) const;

 private:
  std::string name_;
  Params params_;
  Eval F_;
  DerivativeEval dF_;
  double margin_;
  DiffConfig diff_;
};

/// F_{lm} with the six independent components F01 F02 F03 F12 F13 F23.
EMField constant_em_field(const Params& components);
/// Radial electric field F_{tr} = -Q / r^2 on a chart (t, r, theta, phi).
EMField coulomb_em_field(double charge);
/// F(x) = C + sum_n x^n D[n]. Rejected with ClosednessError unless dF = 0.
EMField linear_em_field(const Mat4& C, const std::array<Mat4, 4>& D, double closedness_margin = 1e-8);

/// "constant" or "coulomb"; the metric is used to validate chart compatibility.
EMField em_field_catalog(const std::string& name, const Params& params, const SpacetimeMetric& metric);
std::vector<CatalogEntry> em_field_entries();

/// Gamma^e_{i lambda} = -(1 / 2 c alpha0) breve_G^{i mu} (F_hat_{lambda mu} - alpha0^2 breve_g0_lambda F_hat_{rho mu} breve_delta0^rho)
Mat34 em_connection(const PhaseFrame& f, const Mat4& F_hat);
/// gamma^e = Gamma^e breve_delta0, the fibre acceleration per unit x^0.
Vec3 lorentz_force(const PhaseFrame& f, const Mat4& F_hat);
/// Fibre-fibre block (nu_tau o G#) (x) (nu_tau o G#) applied to F_hat, as a 7x7 bivector.
Mat7 em_two_vector(const PhaseFrame& f, const Mat4& F_hat);

class JoinedStructure : public PhaseStructure {
 public:
  JoinedStructure(SpacetimeMetric metric, ScaleConstants scales, EMField em);

  std::string description() const override;
  /// Gamma[g] + Gamma^e; exactly Gamma[g] when q = 0.
  Mat34 connection(const PhasePoint& p, const PhaseFrame& f) const override;

  const EMField& em() const noexcept { return em_; }
  /// (q / 2 hbar0) F(x)
  Mat4 F_hat(const Vec4& x) const;

 private:
  EMField em_;
};

StructurePtr joined_structure(const SpacetimeMetric& metric, const ScaleConstants& scales, const EMField& em);

/// Joined tau_hat, Omega, gamma_hat, Lambda at p; throws ClosednessError if F is not closed at p.x.
StructureEvaluation joined_structures(const SpacetimeMetric& metric, const ScaleConstants& scales, const EMField& em,
                                      const PhasePoint& p);

struct AcpjReport {
  double omega_closed = 0.0;     ///< max |d Omega|
  double volume_form = 0.0;      ///< coefficient of tau_hat ^ Omega^3
  double omega_linearity = 0.0;  ///< max |Omega - Omega[g] - F_hat|
  double lambda_split = 0.0;     ///< max |Lambda - Lambda[g] - em_two_vector|
  DualityResiduals duality;
  /// Bracket identities with the signs implied by the general definitions:
  /// [gamma_hat, Lambda] = -gamma_hat ^ Lambda#(L_gamma_hat tau_hat),
  /// [Lambda, Lambda] = 2 gamma_hat ^ (Lambda# (x) Lambda#)(d tau_hat).
  double reeb_bracket = 0.0;
  double lambda_bracket = 0.0;
  /// Same identities with the opposite overall signs, reported for comparison.
  double reeb_bracket_flipped = 0.0;
  double lambda_bracket_flipped = 0.0;
  double max() const;
};

AcpjReport verify_acpj_pair(const JoinedStructure& s, const PhasePoint& p, const DiffConfig& cfg = {});

}  // namespace hidsym
