#pragma once

// Integration of the flow of gamma_hat on the phase space. The parameter s is
// normalized by tau_hat(gamma_hat) = 1; for the gravitational structure it is
// proper time times hbar0 / (m c0^2).

#include <iosfwd>
#include <string>
#include <vector>

#include "hidsym/symmetry.hpp"

namespace hidsym {

enum class Integrator { Dopri5, Rk4 };

struct StepControl {
  Integrator method = Integrator::Dopri5;
  double tolerance = 1e-10;    ///< absolute and relative, adaptive method only
  double initial_step = 1e-2;  ///< first trial step (adaptive) or the fixed step (rk4)
  double min_step = 1e-12;     ///< adaptive: below this the trajectory is truncated
  /// > 0: record samples on this parameter grid; 0: record every accepted step.
  double sample_interval = 0.0;
  std::size_t max_steps = 10'000'000;

  void validate() const;
};

std::string to_string(Integrator m);
Integrator integrator_from_string(const std::string& name);

struct Monitor {
  std::string name;
  PhaseFunction f;
};

/// Monitors built from multivectors via K(tau_hat, ..., tau_hat).
std::vector<Monitor> multivector_monitors(const std::vector<SymmetricMultivectorField>& fields, StructurePtr s);

struct TrajectorySample {
  double s = 0.0;
  PhasePoint p;
  std::vector<double> monitors;
};

struct Trajectory {
  std::vector<std::string> monitor_names;
  std::vector<TrajectorySample> samples;
  Integrator method = Integrator::Dopri5;
  double step = 0.0;
  double tolerance = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  /// Set when the flow left the chart domain or stopped being timelike before s_end.
  bool exited = false;
  std::string exit_reason;
};

/// Throws TimelikeViolation / DomainError if p0 is not admissible.
Trajectory integrate(StructurePtr s, const PhasePoint& p0, double s_end, const StepControl& control,
                     const std::vector<Monitor>& monitors = {});

struct DriftEntry {
  std::string name;
  double initial = 0.0;
  double max_abs_drift = 0.0;
  /// max |f(s) - f(0)| / max(1, |f(0)|)
  double relative_drift = 0.0;
};

std::vector<DriftEntry> monitor(const Trajectory& trajectory);
/// Evaluates extra monitors on the stored samples.
std::vector<DriftEntry> monitor(const Trajectory& trajectory, const std::vector<Monitor>& monitors);

/// Max deviation of the spacetime track from an independent integration of
/// the second-order geodesic equation x'' + Chr(x', x') = 0 started from the
/// first sample with x' = gamma_hat, relative to max(1, |x|). Meaningful for
/// the gravitational structure only.
double geodesic_residual(const Trajectory& trajectory, const PhaseStructure& s, double tolerance = 1e-12);

struct ConvergenceStudy {
  std::vector<double> steps;         ///< h, h/2, h/4
  std::vector<double> differences;   ///< |y_h - y_{h/2}|, |y_{h/2} - y_{h/4}| at s_end
  double ratio = 0.0;                ///< differences[0] / differences[1], about 16 for RK4
};

/// Fixed-step RK4 at h, h/2 and h/4.
ConvergenceStudy convergence_study(StructurePtr s, const PhasePoint& p0, double s_end, double h);

/// Header: s,x0,x1,x2,x3,v1,v2,v3,<monitor names>
void write_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace hidsym
