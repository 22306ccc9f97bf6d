#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "noct/errors.hpp"
#include "noct/problem.hpp"

namespace noct {

struct IntegratorConfig {
  double step = 1e-3;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  /// Explicit feedback u = law(t, q, p); bypasses the Newton solve.
  std::optional<std::vector<Expr>> control_law;
  double blowup_limit = 1e12;
};

struct NewtonStats {
  long solves = 0;
  long total_iterations = 0;
  int max_iterations = 0;
};

/// Nodes of one integrated extremal. Per node: state, control (satisfying the
/// stationary condition to newton_tol), costate, accumulated path corrections
/// f (one column per registered symmetry, f(a) = 0), and the q̇ cache. Second
/// order trajectories also cache q̈ and q⃛.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> controls;
  std::vector<std::vector<double>> costates;
  std::vector<std::vector<double>> f;
  std::vector<std::vector<double>> state_dots;
  std::vector<double> qddot;   // second-order problems only
  std::vector<double> qdddot;  // second-order problems only
  NewtonStats newton;

  std::size_t size() const { return times.size(); }
  std::size_t f_columns() const { return f.empty() ? 0 : f.front().size(); }
  bool has_second_order_cache() const { return !qdddot.empty(); }
  /// Environment for evaluating expressions at node k (with derivative caches).
  Env env_at(std::size_t k) const;
};

class NewtonDivergedError : public Error {
 public:
  NewtonDivergedError(std::string message, std::vector<double> last_iterate,
                      double residual_norm)
      : Error(std::move(message)),
        last_iterate_(std::move(last_iterate)),
        residual_norm_(residual_norm) {}
  const std::vector<double>& last_iterate() const { return last_iterate_; }
  double residual_norm() const { return residual_norm_; }

 private:
  std::vector<double> last_iterate_;
  double residual_norm_;
};

class NonFiniteStateError : public Error {
 public:
  NonFiniteStateError(std::string message, double last_good_time,
                      std::shared_ptr<Trajectory> partial)
      : Error(std::move(message)), last_good_time_(last_good_time), partial_(std::move(partial)) {}
  double last_good_time() const { return last_good_time_; }
  /// Nodes integrated before the blow-up (never null).
  const Trajectory& partial() const { return *partial_; }
  std::shared_ptr<Trajectory> partial_ptr() const { return partial_; }

 private:
  double last_good_time_;
  std::shared_ptr<Trajectory> partial_;
};

class SingularLagrangianError : public Error {
 public:
  using Error::Error;
};

/// Solves the stationary condition ∂H/∂u = 0 for the control by damped Newton
/// iteration from `guess` (step halved whenever the residual grows), or by
/// evaluating the configured control law.
std::vector<double> solve_control(const OCProblem& prob, double t, const std::vector<double>& q,
                                  const std::vector<double>& p, const std::vector<double>& guess,
                                  const IntegratorConfig& config, NewtonStats* stats = nullptr);

/// Classic fixed-step RK4 on the augmented state (q, p, f_1..f_K):
///   q̇ = ∂H/∂p,  ṗ = −∂H/∂q + Q,  ḟ_j = Q·(ξ_j − τ_j·q̇),
/// with the control re-solved at every stage (warm-started). The final step
/// is shortened when the step does not divide the interval exactly.
Trajectory integrate_extremal(const OCProblem& prob, const std::vector<double>& q0,
                              const std::vector<double>& p0,
                              const std::vector<Generators>& symmetries,
                              const IntegratorConfig& config);

struct SecondOrderInitial {
  double q = 0.0;
  double qdot = 0.0;
  double qddot = 0.0;
  double qdddot = 0.0;
};

/// Direct route for second-order problems: assembles the fourth-order scalar
/// ODE from the lifted Hamiltonian system (q⁗ solved from the affine
/// Euler-Lagrange residual at every stage), integrates its first-order form
/// with RK4, accumulates f, and reconstructs the costates
/// p2 = ∂L/∂q̈, p1 = ∂L/∂q̇ − d/dt ∂L/∂q̈.
Trajectory integrate_el2(const LiftedProblem& lifted, const SecondOrderInitial& initial,
                         const std::vector<Generators>& symmetries,
                         const IntegratorConfig& config);

}  // namespace noct
