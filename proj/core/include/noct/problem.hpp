#pragma once

#include <string>
#include <vector>

#include "noct/expr.hpp"

namespace noct {

/// Optimal-control problem data: running cost L(t,q,u), dynamics
/// q̇ = phi(t,q,u), and a generalized force Q attached slot-by-slot to the
/// costate equations. All expressions are over (t, q, u); costates and
/// derivative slots are not admitted, except that second-order lifted
/// problems may carry the reserved q⃛ slot in force[0].
struct OCProblem {
  int n = 0;  // state dimension
  int m = 0;  // control dimension
  Expr lagrangian;
  std::vector<Expr> dynamics;  // n entries
  std::vector<Expr> force;     // n entries
  double t_initial = 0.0;
  double t_final = 1.0;
  std::vector<std::string> labels;       // optional coordinate names
  bool second_order_force = false;       // set by lift_cv2

  void validate() const;
  /// True when every force component is the literal zero.
  bool conservative() const;
};

/// Pontryagin function H = -L + p·phi over (t, q, u, p).
Expr hamiltonian(const OCProblem& prob);

/// H together with the partial derivatives the rest of the library needs.
struct HamiltonianParts {
  Expr H;
  Expr dt;
  std::vector<Expr> dq;
  std::vector<Expr> du;
  std::vector<Expr> dp;
  std::vector<std::vector<Expr>> duu;  // m x m
};

HamiltonianParts hamiltonian_parts(const OCProblem& prob);

/// One symmetry candidate: infinitesimal generators of the transformation of
/// time, state, control and costate, plus the gauge term. tau, xi and gauge
/// depend on (t, q) only; sigma and alpha may also use (u, p).
struct Generators {
  Expr tau;
  std::vector<Expr> xi;     // n
  std::vector<Expr> sigma;  // m
  std::vector<Expr> alpha;  // n
  Expr gauge;

  static Generators zero(int n, int m);
  void validate(int n, int m) const;
};

enum class CvOrder { First, Second };

/// A calculus-of-variations problem rewritten in optimal-control form.
struct LiftedProblem {
  CvOrder order = CvOrder::First;
  Expr origin_lagrangian;          // in lifted coordinates (u slots for the top derivative)
  std::vector<Expr> origin_force;
  OCProblem problem;
  std::string coordinate_map;
};

/// First-order problems: L(t,q,q̇) with u_i standing for q̇_i; dynamics become
/// phi_i = u_i, the force passes through unchanged.
LiftedProblem lift_cv1(const Expr& lagrangian, std::vector<Expr> force, double t_initial,
                       double t_final, int dof);

/// Second-order single-dof problems: states (q, q̇) as (q1, q2), control u1 for
/// q̈. The force may reference the reserved q⃛ slot (`qdddot`), resolved only
/// along integrated trajectories; it enters the first costate equation only.
LiftedProblem lift_cv2(const Expr& lagrangian, const Expr& force, double t_initial,
                       double t_final, int dof = 1);

/// Structure shared by the fourth-order integrator and the second-order
/// constant of motion: stationary costate p2 = ∂L/∂u, its total derivative
/// along the lifted dynamics (which introduces the q⃛ slot), the reconstructed
/// first costate, the control Hessian and the q⁗-free part of the
/// Euler-Lagrange residual.
struct SecondOrderParts {
  Expr L_u;      // ∂L/∂u1 (equals p2 along extremals)
  Expr dLu_dt;   // d/dt ∂L/∂u1, contains the q⃛ slot
  Expr p1;       // ∂L/∂q2 - d/dt ∂L/∂u1
  Expr L_uu;     // ∂²L/∂u1²
  Expr el_free;  // Euler-Lagrange residual with the q⁗ term removed
};

SecondOrderParts second_order_parts(const LiftedProblem& lifted);

}  // namespace noct
