#pragma once

// Hamilton-Jacobi lifts, projectability and conservation conditions, hidden
// symmetries generated by symmetric multivector fields, and the bracket
// identities relating them.
//
// Sign ledger: contact form omega = -tau_hat, Reeb field E = -gamma_hat.
// Musical maps act on the first slot: Lambda#(b)^c = b_a Lambda^{ac},
// Omega_flat(X)_c = X^a Omega_{ac}; {f, g} = d_a f Lambda^{ab} d_b g.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hidsym/multivector.hpp"
#include "hidsym/phase_space.hpp"

namespace hidsym {

class PhaseFunction {
 public:
  using Eval = std::function<double(const PhasePoint&)>;
  using Grad = std::function<Vec7(const PhasePoint&)>;

  PhaseFunction(Eval eval, Grad grad = {}, DiffConfig cfg = {});
  static PhaseFunction constant(double value);

  double operator()(const PhasePoint& p) const { return eval_(p); }
  /// Analytic when supplied, central differences otherwise.
  Vec7 gradient(const PhasePoint& p) const;
  Vec7 gradient_finite_difference(const PhasePoint& p) const;
  bool has_analytic_gradient() const noexcept { return static_cast<bool>(grad_); }

 private:
  Eval eval_;
  Grad grad_;
  DiffConfig diff_;
};

/// Fibred morphism J1E -> TE, X^lambda(x, x_0).
class GeneralizedVectorField {
 public:
  using Eval = std::function<Vec4(const PhasePoint&)>;
  /// (lambda, a) = d X^lambda / d y^a over the 7 phase coordinates.
  using Jacobian = std::function<Mat47(const PhasePoint&)>;

  GeneralizedVectorField(Eval eval, Jacobian jac = {}, DiffConfig cfg = {});
  /// Pullback of a spacetime vector field (degree-1 multivector).
  static GeneralizedVectorField from_spacetime(const SymmetricMultivectorField& K);

  Vec4 operator()(const PhasePoint& p) const { return eval_(p); }
  Mat47 jacobian(const PhasePoint& p) const;
  Mat47 jacobian_finite_difference(const PhasePoint& p) const;

 private:
  Eval eval_;
  Jacobian jac_;
  DiffConfig diff_;
};

class PhaseVectorField {
 public:
  using Eval = std::function<Vec7(const PhasePoint&)>;

  explicit PhaseVectorField(Eval eval, DiffConfig cfg = {});

  Vec7 operator()(const PhasePoint& p) const { return eval_(p); }
  /// T pi^1_0: the spacetime part.
  Vec4 projection(const PhasePoint& p) const { return eval_(p).head<4>(); }
  /// (a, b) = d X^a / d y^b
  Mat7 jacobian(const PhasePoint& p) const;
  const DiffConfig& diff_config() const noexcept { return diff_; }

 private:
  Eval eval_;
  DiffConfig diff_;
};

// ---------------------------------------------------------------------------

double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const PhaseStructure& s, const PhasePoint& p);
/// gamma_hat . f
double reeb_derivative(const PhaseFunction& f, const PhaseStructure& s, const PhasePoint& p);

/// X = Lambda#(df) + f gamma_hat
PhaseVectorField hamilton_jacobi_lift(const PhaseFunction& f, StructurePtr s);
/// X = Lambda#(df) - h E with E = -gamma_hat (general generator (f, h)).
PhaseVectorField generator_lift(const PhaseFunction& f, const PhaseFunction& h, StructurePtr s);

/// f = tau_hat(X) = -c alpha0 breve_G0_rho X^rho, gradient from the analytic tau_hat jacobian.
PhaseFunction tau_of(const GeneralizedVectorField& Xbar, StructurePtr s);

/// breve_G0_rho d^0_j X^rho, j = 1..3.
Vec3 projectability_residual(const GeneralizedVectorField& Xbar, const PhaseStructure& s, const PhasePoint& p);

struct ConservationResidual {
  double projected = 0.0;        ///< breve_g0_s breve_delta0^r d_r X^s + X^s d_s hat_g00 / 2
  double general = 0.0;          ///< full expression valid without projectability
  double reeb_derivative = 0.0;  ///< gamma_hat . tau_hat(X) differentiated directly
  double max() const;
};
ConservationResidual conservation_residual(const GeneralizedVectorField& Xbar, const PhaseStructure& s,
                                           const PhasePoint& p);

/// K(tau_hat, ..., tau_hat) with analytic gradient.
PhaseFunction phase_function_from_multivector(const SymmetricMultivectorField& K, StructurePtr s);
/// Coordinate form (-1)^k (c alpha0)^k breve_G0_{rho1}...breve_G0_{rhok} K^{rho1...rhok}.
double multivector_phase_value_coordinate(const SymmetricMultivectorField& K, const PhaseStructure& s,
                                          const PhasePoint& p);

/// k tau_hat _| ... _| K - (k - 1) K(tau_hat) d_hat
GeneralizedVectorField generalized_field_from_multivector(const SymmetricMultivectorField& K, StructurePtr s);

struct HiddenSymmetry {
  std::string name;
  int degree = 0;
  PhaseFunction generator;
  PhaseVectorField lift;
  GeneralizedVectorField projection;
  /// max killing_residual over the check points; empty when none were given.
  std::optional<double> killing_residual;
  bool killing = false;
  std::optional<std::string> warning;
};

inline constexpr double kKillingTolerance = 1e-7;

/// Killing status is computed over `check_points` with kKillingTolerance; a
/// non-Killing K is still lifted and carries a warning.
HiddenSymmetry hidden_symmetry_from_multivector(const SymmetricMultivectorField& K, StructurePtr s,
                                                std::span<const PhasePoint> check_points = {});

// ---------------------------------------------------------------------------

Vec7 lie_bracket_phase(const PhaseVectorField& X, const PhaseVectorField& Y, const PhasePoint& p);
/// (L_X b)_c = X^a d_a b_c + b_a d_c X^a
Vec7 lie_derivative_one_form(const PhaseVectorField& X, const OneFormField& beta, const PhasePoint& p,
                             const DiffConfig& cfg = {});
/// (L_X B)_bc = X^a d_a B_bc + B_ac d_b X^a + B_ba d_c X^a
Mat7 lie_derivative_two_form(const PhaseVectorField& X, const TwoFormField& beta, const PhasePoint& p,
                             const DiffConfig& cfg = {});

struct SymmetryResiduals {
  double tau = 0.0;    ///< max |L_X tau_hat|
  double omega = 0.0;  ///< max |L_X Omega|
};
SymmetryResiduals symmetry_residuals(const PhaseVectorField& X, const PhaseStructure& s, const PhasePoint& p,
                                     const DiffConfig& cfg = {});

/// [[(f,h);(g,k)]] = ({f,g}, {f,k} - {g,h} - d omega(df#, dg#)) with omega = -tau_hat.
std::pair<double, double> generator_bracket(const PhaseFunction& f, const PhaseFunction& h, const PhaseFunction& g,
                                            const PhaseFunction& k, const PhaseStructure& s, const PhasePoint& p,
                                            const DiffConfig& cfg = {});

/// E.h + Lambda(L_E omega, df) with E = -gamma_hat, omega = -tau_hat.
double generator_compatibility_residual(const PhaseFunction& f, const PhaseFunction& h, const PhaseStructure& s,
                                        const PhasePoint& p, const DiffConfig& cfg = {});

struct HomomorphismPointResidual {
  double lift_bracket = 0.0;       ///< max |[X[K], X[L]] - X[[K, L]]|
  double poisson = 0.0;            ///< |{K(t), L(t)} - [K, L](t)|
  double projected_bracket = 0.0;  ///< |tau_hat([X[K], X[L]]) - [K, L](t)|
  double general_bracket = 0.0;    ///< |bracket_{k,l} - [K, L](t)|, valid for any symmetric K, L
  double correction = 0.0;         ///< |tau_hat([X[K], X[L]]) - [K,L](t) - (l-1) L(t) g.K(t) + (k-1) K(t) g.L(t)|
};

struct HomomorphismReport {
  bool killing_k = false;
  bool killing_l = false;
  std::vector<HomomorphismPointResidual> points;
  HomomorphismPointResidual max() const;
};

HomomorphismReport verify_homomorphism(const SymmetricMultivectorField& K, const SymmetricMultivectorField& L,
                                       StructurePtr s, std::span<const PhasePoint> points);

/// gamma_hat . K(tau_hat) and (1/2) [K, G_hat](tau_hat) at p.
std::pair<double, double> reeb_killing_identity(const SymmetricMultivectorField& K, StructurePtr s,
                                                const PhasePoint& p);

}  // namespace hidsym
