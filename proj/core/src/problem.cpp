#include "noct/problem.hpp"

#include <cmath>

#include "noct/errors.hpp"

namespace noct {

namespace {

void check_var_set(const Expr& e, int n, int m, bool allow_control, bool allow_costate,
                   bool allow_qdddot, const std::string& what) {
  for (const VarId& v : e.vars()) {
    switch (v.kind) {
      case VarKind::Time: break;
      case VarKind::State:
        if (v.index >= n) throw ValidationError(what + " references state beyond dimension");
        break;
      case VarKind::Control:
        if (!allow_control) throw ValidationError(what + " must not reference controls");
        if (v.index >= m) throw ValidationError(what + " references control beyond dimension");
        break;
      case VarKind::Costate:
        if (!allow_costate) throw ValidationError(what + " must not reference costates");
        if (v.index >= n) throw ValidationError(what + " references costate beyond dimension");
        break;
      case VarKind::StateDot:
        throw ValidationError(what + " must not reference state derivative slots");
      case VarKind::ControlDot:
        if (!allow_qdddot)
          throw ValidationError(what + " must not reference the q-triple-dot slot");
        if (v.index >= m) throw ValidationError(what + " derivative slot beyond dimension");
        break;
    }
  }
}

}  // namespace

void OCProblem::validate() const {
  if (n < 1) throw ValidationError("state dimension must be at least 1");
  if (m < 1) throw ValidationError("control dimension must be at least 1");
  if (!(t_initial < t_final)) throw ValidationError("interval must satisfy a < b");
  if (static_cast<int>(dynamics.size()) != n)
    throw ValidationError("dynamics must have exactly n components");
  if (static_cast<int>(force.size()) != n)
    throw ValidationError("force must have exactly n components");
  check_var_set(lagrangian, n, m, true, false, false, "lagrangian");
  for (const Expr& e : dynamics) check_var_set(e, n, m, true, false, false, "dynamics");
  for (std::size_t i = 0; i < force.size(); ++i) {
    const bool allow_slot = second_order_force && i == 0;
    check_var_set(force[i], n, m, true, false, allow_slot, "force");
  }
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw ValidationError("labels must be empty or have n entries");
}

bool OCProblem::conservative() const {
  for (const Expr& e : force)
    if (!e.simplified().is_constant(0.0)) return false;
  return true;
}

Expr hamiltonian(const OCProblem& prob) {
  std::vector<Expr> terms;
  terms.push_back(-prob.lagrangian);
  for (int i = 0; i < prob.n; ++i) terms.push_back(Expr::costate(i) * prob.dynamics[i]);
  return make_sum(std::move(terms)).simplified();
}

HamiltonianParts hamiltonian_parts(const OCProblem& prob) {
  HamiltonianParts parts;
  parts.H = hamiltonian(prob);
  parts.dt = parts.H.diff(VarId::time()).simplified();
  for (int i = 0; i < prob.n; ++i) {
    parts.dq.push_back(parts.H.diff(VarId::state(i)).simplified());
    parts.dp.push_back(parts.H.diff(VarId::costate(i)).simplified());
  }
  for (int j = 0; j < prob.m; ++j)
    parts.du.push_back(parts.H.diff(VarId::control(j)).simplified());
  parts.duu.resize(static_cast<std::size_t>(prob.m));
  for (int j = 0; j < prob.m; ++j)
    for (int k = 0; k < prob.m; ++k)
      parts.duu[static_cast<std::size_t>(j)].push_back(
          parts.du[static_cast<std::size_t>(j)].diff(VarId::control(k)).simplified());
  return parts;
}

Generators Generators::zero(int n, int m) {
  Generators g;
  g.xi.assign(static_cast<std::size_t>(n), Expr::constant(0.0));
  g.sigma.assign(static_cast<std::size_t>(m), Expr::constant(0.0));
  g.alpha.assign(static_cast<std::size_t>(n), Expr::constant(0.0));
  return g;
}

void Generators::validate(int n, int m) const {
  if (static_cast<int>(xi.size()) != n) throw ValidationError("xi must have n components");
  if (static_cast<int>(sigma.size()) != m) throw ValidationError("sigma must have m components");
  if (static_cast<int>(alpha.size()) != n) throw ValidationError("alpha must have n components");
  check_var_set(tau, n, m, false, false, false, "tau");
  check_var_set(gauge, n, m, false, false, false, "gauge");
  for (const Expr& e : xi) check_var_set(e, n, m, false, false, false, "xi");
  for (const Expr& e : sigma) check_var_set(e, n, m, true, true, false, "sigma");
  for (const Expr& e : alpha) check_var_set(e, n, m, true, true, false, "alpha");
}

LiftedProblem lift_cv1(const Expr& lagrangian, std::vector<Expr> force, double t_initial,
                       double t_final, int dof) {
  if (dof < 1) throw ValidationError("first-order lifting needs at least one degree of freedom");
  if (static_cast<int>(force.size()) != dof)
    throw ValidationError("force must have one component per degree of freedom");
  LiftedProblem lifted;
  lifted.order = CvOrder::First;
  lifted.origin_lagrangian = lagrangian;
  lifted.origin_force = force;
  OCProblem& prob = lifted.problem;
  prob.n = dof;
  prob.m = dof;
  prob.lagrangian = lagrangian;
  for (int i = 0; i < dof; ++i) prob.dynamics.push_back(Expr::control(i));
  prob.force = std::move(force);
  prob.t_initial = t_initial;
  prob.t_final = t_final;
  prob.validate();
  lifted.coordinate_map = "q_i = q_i, qdot_i = u_i";
  return lifted;
}

LiftedProblem lift_cv2(const Expr& lagrangian, const Expr& force, double t_initial,
                       double t_final, int dof) {
  if (dof != 1)
    throw ValidationError("second-order lifting supports a single degree of freedom");
  LiftedProblem lifted;
  lifted.order = CvOrder::Second;
  lifted.origin_lagrangian = lagrangian;
  lifted.origin_force = {force};
  OCProblem& prob = lifted.problem;
  prob.n = 2;
  prob.m = 1;
  prob.lagrangian = lagrangian;
  prob.dynamics = {Expr::state(1), Expr::control(0)};
  prob.force = {force, Expr::constant(0.0)};
  prob.t_initial = t_initial;
  prob.t_final = t_final;
  prob.second_order_force = true;
  prob.validate();
  lifted.coordinate_map = "q1 = q, q2 = qdot, u1 = qddot, qdddot slot resolved on trajectories";
  return lifted;
}

SecondOrderParts second_order_parts(const LiftedProblem& lifted) {
  if (lifted.order != CvOrder::Second)
    throw ValidationError("second-order structure requested for a non-second-order problem");
  const Expr& L = lifted.problem.lagrangian;

  // Total derivative along q̇1 = q2, q̇2 = u1, u̇1 = q⃛ (the reserved slot).
  auto lifted_total_derivative = [](const Expr& g) {
    return (g.diff(VarId::time()) + g.diff(VarId::state(0)) * Expr::state(1) +
            g.diff(VarId::state(1)) * Expr::control(0) +
            g.diff(VarId::control(0)) * Expr::control_dot(0))
        .simplified();
  };

  SecondOrderParts parts;
  parts.L_u = L.diff(VarId::control(0)).simplified();
  parts.L_uu = parts.L_u.diff(VarId::control(0)).simplified();
  parts.dLu_dt = lifted_total_derivative(parts.L_u);
  parts.p1 = (L.diff(VarId::state(1)) - parts.dLu_dt).simplified();
  // d²/dt²(L_u) = D(dLu_dt) + L_uu·q⁗ ; keep the q⁗-free part here.
  const Expr d2Lu_free = lifted_total_derivative(parts.dLu_dt);
  const Expr dLq2_dt = lifted_total_derivative(L.diff(VarId::state(1)).simplified());
  parts.el_free =
      (d2Lu_free - dLq2_dt + L.diff(VarId::state(0)) + lifted.problem.force[0]).simplified();
  return parts;
}

}  // namespace noct
