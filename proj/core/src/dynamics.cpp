#include "noct/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace noct {

Env Trajectory::env_at(std::size_t k) const {
  Env env;
  env.t = times.at(k);
  env.q = states.at(k);
  env.u = controls.at(k);
  env.p = costates.at(k);
  env.qdot = state_dots.at(k);
  if (has_second_order_cache()) env.udot = std::vector<double>{qdddot.at(k)};
  return env;
}

namespace {

double inf_norm(const std::vector<double>& v) {
  double n = 0.0;
  for (double x : v) n = std::max(n, std::abs(x));
  return n;
}

bool all_finite_within(const std::vector<double>& v, double limit) {
  for (double x : v)
    if (!std::isfinite(x) || std::abs(x) > limit) return false;
  return true;
}

// Caches the derivative expressions of one problem and solves ∂H/∂u = 0.
class ControlSolver {
 public:
  ControlSolver(const OCProblem& prob, const HamiltonianParts& parts,
                const IntegratorConfig& config)
      : m_(prob.m), parts_(parts), config_(config) {
    if (config.control_law) {
      if (static_cast<int>(config.control_law->size()) != prob.m)
        throw ValidationError("control law must have m components");
      for (const Expr& e : *config.control_law)
        for (const VarId& v : e.vars())
          if (v.kind == VarKind::Control || v.kind == VarKind::StateDot ||
              v.kind == VarKind::ControlDot)
            throw ValidationError("control law must be a function of (t, q, p)");
    }
  }

  std::vector<double> solve(double t, const std::vector<double>& q, const std::vector<double>& p,
                            const std::vector<double>& guess, NewtonStats* stats) const {
    Env env;
    env.t = t;
    env.q = q;
    env.p = p;
    if (config_.control_law) {
      env.u.assign(static_cast<std::size_t>(m_), 0.0);
      std::vector<double> u(static_cast<std::size_t>(m_));
      for (int j = 0; j < m_; ++j) u[static_cast<std::size_t>(j)] =
          (*config_.control_law)[static_cast<std::size_t>(j)].eval(env);
      return u;
    }

    std::vector<double> u = guess;
    env.u = u;
    auto residual = [&](const std::vector<double>& candidate, std::vector<double>& g) {
      env.u = candidate;
      for (int j = 0; j < m_; ++j)
        g[static_cast<std::size_t>(j)] = parts_.du[static_cast<std::size_t>(j)].eval(env);
    };

    std::vector<double> g(static_cast<std::size_t>(m_));
    residual(u, g);
    double gnorm = inf_norm(g);
    int iterations = 0;
    while (gnorm > config_.newton_tol) {
      if (iterations >= config_.newton_max_iter)
        throw NewtonDivergedError("stationary-condition Newton hit the iteration cap", u, gnorm);
      env.u = u;
      Eigen::MatrixXd jac(m_, m_);
      for (int j = 0; j < m_; ++j)
        for (int k = 0; k < m_; ++k)
          jac(j, k) = parts_.duu[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].eval(env);
      Eigen::VectorXd rhs(m_);
      for (int j = 0; j < m_; ++j) rhs(j) = -g[static_cast<std::size_t>(j)];
      Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
      if (!lu.isInvertible())
        throw NewtonDivergedError("stationary-condition Jacobian is singular", u, gnorm);
      const Eigen::VectorXd delta = lu.solve(rhs);

      double scale = 1.0;
      std::vector<double> candidate(static_cast<std::size_t>(m_));
      std::vector<double> gc(static_cast<std::size_t>(m_));
      while (true) {
        for (int j = 0; j < m_; ++j)
          candidate[static_cast<std::size_t>(j)] = u[static_cast<std::size_t>(j)] + scale * delta(j);
        double cnorm;
        try {
          residual(candidate, gc);
          cnorm = inf_norm(gc);
        } catch (const DomainError&) {
          cnorm = std::numeric_limits<double>::infinity();
        }
        if (cnorm < gnorm) {
          u = candidate;
          g = gc;
          gnorm = cnorm;
          break;
        }
        scale *= 0.5;
        if (scale < 1e-12)
          throw NewtonDivergedError("stationary-condition Newton stalled", u, gnorm);
      }
      ++iterations;
    }
    if (stats) {
      ++stats->solves;
      stats->total_iterations += iterations;
      stats->max_iterations = std::max(stats->max_iterations, iterations);
    }
    return u;
  }

 private:
  int m_;
  const HamiltonianParts& parts_;
  const IntegratorConfig& config_;
};

struct StepPlan {
  long full_steps = 0;
  double last_step = 0.0;  // 0 when the step divides the interval
};

StepPlan plan_steps(double t_initial, double t_final, double h) {
  if (!(h > 0.0)) throw ValidationError("step size must be positive");
  const double span = t_final - t_initial;
  const double ratio = span / h;
  const double rounded = std::round(ratio);
  StepPlan plan;
  if (rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-9 * std::abs(ratio)) {
    plan.full_steps = static_cast<long>(rounded);
    return plan;
  }
  plan.full_steps = static_cast<long>(std::floor(ratio));
  plan.last_step = span - static_cast<double>(plan.full_steps) * h;
  if (plan.last_step <= 1e-12 * span) plan.last_step = 0.0;
  return plan;
}

// Generic fixed-step RK4 with a per-node callback. The derivative callback
// receives (t, y, dy, first_stage); nodes are reported before each step and
// once more at t_final.
template <typename Rhs, typename NodeFn>
void rk4_drive(double t0, double t1, double h, std::vector<double>& y, Rhs&& rhs,
               NodeFn&& on_node, double blowup_limit) {
  const StepPlan plan = plan_steps(t0, t1, h);
  const std::size_t dim = y.size();
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), scratch(dim);

  double t = t0;
  auto do_step = [&](double dt, double t_next) {
    rhs(t, y, k1, true);
    on_node(t, y, k1);
    for (std::size_t i = 0; i < dim; ++i) scratch[i] = y[i] + 0.5 * dt * k1[i];
    rhs(t + 0.5 * dt, scratch, k2, false);
    for (std::size_t i = 0; i < dim; ++i) scratch[i] = y[i] + 0.5 * dt * k2[i];
    rhs(t + 0.5 * dt, scratch, k3, false);
    for (std::size_t i = 0; i < dim; ++i) scratch[i] = y[i] + dt * k3[i];
    rhs(t + dt, scratch, k4, false);
    for (std::size_t i = 0; i < dim; ++i)
      y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!all_finite_within(y, blowup_limit))
      throw DomainError("state blew up");  // rewrapped by the caller with context
    t = t_next;
  };

  for (long s = 0; s < plan.full_steps; ++s) {
    const bool last = s + 1 == plan.full_steps && plan.last_step == 0.0;
    do_step(h, last ? t1 : t0 + static_cast<double>(s + 1) * h);
  }
  if (plan.last_step > 0.0) do_step(plan.last_step, t1);
  rhs(t, y, k1, true);
  on_node(t, y, k1);
}

void validate_symmetries(const OCProblem& prob, const std::vector<Generators>& symmetries) {
  for (const Generators& gen : symmetries) gen.validate(prob.n, prob.m);
}

}  // namespace

std::vector<double> solve_control(const OCProblem& prob, double t, const std::vector<double>& q,
                                  const std::vector<double>& p, const std::vector<double>& guess,
                                  const IntegratorConfig& config, NewtonStats* stats) {
  prob.validate();
  if (static_cast<int>(q.size()) != prob.n || static_cast<int>(p.size()) != prob.n ||
      static_cast<int>(guess.size()) != prob.m)
    throw ValidationError("state/costate/guess dimensions do not match the problem");
  const HamiltonianParts parts = hamiltonian_parts(prob);
  return ControlSolver(prob, parts, config).solve(t, q, p, guess, stats);
}

Trajectory integrate_extremal(const OCProblem& prob, const std::vector<double>& q0,
                              const std::vector<double>& p0,
                              const std::vector<Generators>& symmetries,
                              const IntegratorConfig& config) {
  prob.validate();
  validate_symmetries(prob, symmetries);
  if (prob.second_order_force)
    throw ValidationError(
        "force with a q-triple-dot slot needs the fourth-order integrator (integrate_el2)");
  if (static_cast<int>(q0.size()) != prob.n || static_cast<int>(p0.size()) != prob.n)
    throw ValidationError("initial state/costate dimensions do not match the problem");
  for (double x : q0)
    if (!std::isfinite(x)) throw ValidationError("initial state must be finite");
  for (double x : p0)
    if (!std::isfinite(x)) throw ValidationError("initial costate must be finite");

  const HamiltonianParts parts = hamiltonian_parts(prob);
  const ControlSolver solver(prob, parts, config);
  const std::size_t n = static_cast<std::size_t>(prob.n);
  const std::size_t m = static_cast<std::size_t>(prob.m);
  const std::size_t K = symmetries.size();

  auto traj = std::make_shared<Trajectory>();
  std::vector<double> warm(m, 0.0);
  std::vector<double> node_u;
  std::vector<double> y(2 * n + K, 0.0);
  std::copy(q0.begin(), q0.end(), y.begin());
  std::copy(p0.begin(), p0.end(), y.begin() + static_cast<std::ptrdiff_t>(n));

  auto rhs = [&](double t, const std::vector<double>& state, std::vector<double>& dy,
                 bool first_stage) {
    std::vector<double> q(state.begin(), state.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<double> p(state.begin() + static_cast<std::ptrdiff_t>(n),
                          state.begin() + static_cast<std::ptrdiff_t>(2 * n));
    std::vector<double> u = solver.solve(t, q, p, warm, &traj->newton);
    warm = u;
    if (first_stage) node_u = u;
    Env env;
    env.t = t;
    env.q = std::move(q);
    env.u = std::move(u);
    env.p = std::move(p);
    std::vector<double> qv(n), force_v(n);
    for (std::size_t i = 0; i < n; ++i) {
      qv[i] = parts.dp[i].eval(env);
      force_v[i] = prob.force[i].eval(env);
      dy[i] = qv[i];
      dy[n + i] = -parts.dq[i].eval(env) + force_v[i];
    }
    for (std::size_t j = 0; j < K; ++j) {
      const Generators& gen = symmetries[j];
      double fdot = 0.0;
      const double tau_v = gen.tau.eval(env);
      for (std::size_t i = 0; i < n; ++i)
        fdot += force_v[i] * (gen.xi[i].eval(env) - tau_v * qv[i]);
      dy[2 * n + j] = fdot;
    }
  };

  auto on_node = [&](double t, const std::vector<double>& state, const std::vector<double>& dy) {
    traj->times.push_back(t);
    traj->states.emplace_back(state.begin(), state.begin() + static_cast<std::ptrdiff_t>(n));
    traj->costates.emplace_back(state.begin() + static_cast<std::ptrdiff_t>(n),
                                state.begin() + static_cast<std::ptrdiff_t>(2 * n));
    traj->controls.push_back(node_u);
    traj->state_dots.emplace_back(dy.begin(), dy.begin() + static_cast<std::ptrdiff_t>(n));
    traj->f.emplace_back(state.begin() + static_cast<std::ptrdiff_t>(2 * n), state.end());
  };

  try {
    rk4_drive(prob.t_initial, prob.t_final, config.step, y, rhs, on_node, config.blowup_limit);
  } catch (const DomainError& err) {
    const double last_good = traj->times.empty() ? prob.t_initial : traj->times.back();
    throw NonFiniteStateError(
        std::string("integration aborted after t = ") + std::to_string(last_good) + ": " +
            err.what(),
        last_good, traj);
  }
  return std::move(*traj);
}

Trajectory integrate_el2(const LiftedProblem& lifted, const SecondOrderInitial& initial,
                         const std::vector<Generators>& symmetries,
                         const IntegratorConfig& config) {
  if (lifted.order != CvOrder::Second)
    throw ValidationError("integrate_el2 needs a second-order lifted problem");
  const OCProblem& prob = lifted.problem;
  prob.validate();
  validate_symmetries(prob, symmetries);
  const SecondOrderParts parts = second_order_parts(lifted);
  const std::size_t K = symmetries.size();

  auto traj = std::make_shared<Trajectory>();
  std::vector<double> y{initial.q, initial.qdot, initial.qddot, initial.qdddot};
  y.resize(4 + K, 0.0);

  auto make_env = [](double t, const std::vector<double>& state) {
    Env env;
    env.t = t;
    env.q = {state[0], state[1]};
    env.u = {state[2]};
    env.udot = std::vector<double>{state[3]};
    return env;
  };

  auto rhs = [&](double t, const std::vector<double>& state, std::vector<double>& dy, bool) {
    const Env env = make_env(t, state);
    const double hessian = parts.L_uu.eval(env);
    if (std::abs(hessian) < 1e-12)
      throw SingularLagrangianError("second-order Lagrangian is singular (∂²L/∂q̈² ≈ 0)");
    const double q4 = -parts.el_free.eval(env) / hessian;
    dy[0] = state[1];
    dy[1] = state[2];
    dy[2] = state[3];
    dy[3] = q4;
    const double qdot[2] = {state[1], state[2]};
    std::vector<double> force_v(2);
    force_v[0] = prob.force[0].eval(env);
    force_v[1] = prob.force[1].eval(env);
    for (std::size_t j = 0; j < K; ++j) {
      const Generators& gen = symmetries[j];
      const double tau_v = gen.tau.eval(env);
      double fdot = 0.0;
      for (int i = 0; i < 2; ++i)
        fdot += force_v[static_cast<std::size_t>(i)] *
                (gen.xi[static_cast<std::size_t>(i)].eval(env) - tau_v * qdot[i]);
      dy[4 + j] = fdot;
    }
  };

  auto on_node = [&](double t, const std::vector<double>& state, const std::vector<double>&) {
    const Env env = make_env(t, state);
    traj->times.push_back(t);
    traj->states.push_back({state[0], state[1]});
    traj->controls.push_back({state[2]});
    traj->costates.push_back({parts.p1.eval(env), parts.L_u.eval(env)});
    traj->state_dots.push_back({state[1], state[2]});
    traj->qddot.push_back(state[2]);
    traj->qdddot.push_back(state[3]);
    traj->f.emplace_back(state.begin() + 4, state.end());
  };

  try {
    rk4_drive(prob.t_initial, prob.t_final, config.step, y, rhs, on_node, config.blowup_limit);
  } catch (const DomainError& err) {
    const double last_good = traj->times.empty() ? prob.t_initial : traj->times.back();
    throw NonFiniteStateError(
        std::string("integration aborted after t = ") + std::to_string(last_good) + ": " +
            err.what(),
        last_good, traj);
  }
  return std::move(*traj);
}

}  // namespace noct
