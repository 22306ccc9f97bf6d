#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "noct/dynamics.hpp"
#include "noct/problem.hpp"
#include "noct/symmetry.hpp"

namespace noct {

/// The four printed forms of the constant of motion.
///   OptimalControl : C = H·τ − p·ξ + f − Λ
///   Conservative   : C = H·τ − p·ξ − Λ            (forces absent, no f term)
///   FirstOrderCV   : C = τ(L − q̇·∂L/∂q̇) + ∂L/∂q̇·ξ − f + Λ
///   SecondOrderCV  : C = Lτ + (∂L/∂q̇ − d/dt ∂L/∂q̈)(ξ₀ − q̇τ)
///                        + ∂L/∂q̈(ξ₁ − q̈τ) − f + Λ
/// The CV forms are the pointwise negatives of the OptimalControl form on
/// lifted trajectories; both are kept verbatim and the relation is exposed
/// through equivalence_check.
enum class ConstantForm { OptimalControl, Conservative, FirstOrderCV, SecondOrderCV };

const char* to_string(ConstantForm form);

struct MotionConstant {
  ConstantForm form = ConstantForm::OptimalControl;
  Generators generators;
  Expr symbolic;      // everything except the f term
  int f_index = -1;   // column of Trajectory::f consumed; -1 when absent
  double f_sign = 0;  // +1 (OptimalControl), -1 (CV forms), 0 (Conservative)
  bool verified = true;  // false only when the symmetry check was overridden
};

class NotASymmetryError : public Error {
 public:
  NotASymmetryError(std::string message, InvarianceVerdict verdict)
      : Error(std::move(message)), verdict_(std::move(verdict)) {}
  const InvarianceVerdict& verdict() const { return verdict_; }

 private:
  InvarianceVerdict verdict_;
};

class MissingDerivativeCacheError : public Error {
 public:
  using Error::Error;
};

struct BuildOptions {
  bool enforce_symmetry = true;  // override reported through MotionConstant::verified
  double tol = 1e-9;
  std::uint64_t seed = kDefaultSeed;
};

/// OptimalControl / Conservative forms on a plain optimal-control problem.
MotionConstant build_constant(const OCProblem& prob, const Generators& gen, ConstantForm form,
                              int f_index, const BuildOptions& options = {});

/// Any form on a lifted problem (the CV forms need the origin Lagrangian).
MotionConstant build_constant(const LiftedProblem& lifted, const Generators& gen,
                              ConstantForm form, int f_index, const BuildOptions& options = {});

/// Drift statistics of one constant along one trajectory.
struct ConservationReport {
  std::vector<double> series;
  double reference = 0.0;       // C at the first node
  double max_abs_drift = 0.0;   // max |C(t_k) − reference|
  double rel_drift = 0.0;       // max_abs_drift / (1 + |reference|)
  std::optional<double> order;  // filled when a second step size was run
};

ConservationReport evaluate_constant(const MotionConstant& constant, const Trajectory& traj);

/// Richardson order estimate between drifts measured at two step sizes with
/// coarse/fine ratio `step_ratio` (2 for a halving study). Returns nothing
/// when both drifts sit at the round-off floor (no measurable signal).
std::optional<double> drift_order(double coarse_rel_drift, double fine_rel_drift,
                                  double step_ratio = 2.0, double floor = 1e-12);

/// Max over nodes of |C_cv + C_oc| for the CV form matching the lifted order;
/// the two forms are algebraic negatives along lifted trajectories.
double equivalence_check(const LiftedProblem& lifted, const Generators& gen, int f_index,
                         const Trajectory& traj);

}  // namespace noct
