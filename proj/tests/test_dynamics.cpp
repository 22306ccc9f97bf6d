#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "noct/dynamics.hpp"
#include "noct/errors.hpp"
#include "noct/parse.hpp"
#include "noct/problem.hpp"

using namespace noct;

namespace {

LiftedProblem oscillator(const std::string& force, double t_final = 10.0) {
  return lift_cv1(parse("(1/2)*(u1^2 - q1^2)", 1, 1), {parse(force, 1, 1)}, 0.0, t_final, 1);
}

LiftedProblem drag(double t_final = 1.0) {
  return lift_cv1(parse("(1/2)*u1^2", 1, 1), {parse("u1^2", 1, 1)}, 0.0, t_final, 1);
}

// L = (qddot^2 + a*qdot^2 + b*q^2)/2 with force mu*qdot + (mu/a)^2*qddot - 2(mu/a)*qdddot.
LiftedProblem higher_order(double a, double b, double mu, double t_final) {
  ParseOptions slot;
  slot.allow_qdddot = true;
  char L[128], Q[160];
  std::snprintf(L, sizeof L, "(1/2)*(u1^2 + %.17g*q2^2 + %.17g*q1^2)", a, b);
  std::snprintf(Q, sizeof Q, "%.17g*q2 + %.17g*u1 - %.17g*qdddot", mu, (mu / a) * (mu / a),
                2.0 * mu / a);
  return lift_cv2(parse(L, 2, 1), parse(Q, 2, 1, slot), 0.0, t_final);
}

Generators time_shift(int n, int m) {
  Generators gen = Generators::zero(n, m);
  gen.tau = Expr::constant(1.0);
  return gen;
}

double hamiltonian_at(const Expr& H, const Trajectory& traj, std::size_t k) {
  return H.eval(traj.env_at(k));
}

}  // namespace

TEST_CASE("solve_control finds the stationary control") {
  IntegratorConfig config;
  const OCProblem osc = oscillator("cos(2*t)").problem;
  const auto u1 = solve_control(osc, 0.0, {0.5}, {0.3}, {0.0}, config);
  CHECK(u1[0] == doctest::Approx(0.3).epsilon(1e-12));

  const OCProblem dr = drag().problem;
  const auto u2 = solve_control(dr, 0.0, {0.0}, {-1.0}, {0.0}, config);
  CHECK(u2[0] == doctest::Approx(-1.0).epsilon(1e-12));

  // An explicit control law short-circuits the Newton solve with the same result.
  IntegratorConfig law = config;
  law.control_law = std::vector<Expr>{parse("p1", 1, 1)};
  const auto u3 = solve_control(dr, 0.0, {0.0}, {-1.0}, {17.0}, law);
  CHECK(u3[0] == -1.0);
}

TEST_CASE("solve_control reports a singular stationary condition") {
  // L linear in u: dH/du has no u dependence, the Newton matrix is singular.
  const LiftedProblem bad = lift_cv1(parse("u1", 1, 1), {Expr::constant(0.0)}, 0.0, 1.0, 1);
  IntegratorConfig config;
  try {
    solve_control(bad.problem, 0.0, {0.0}, {0.0}, {0.0}, config);
    FAIL("expected NewtonDivergedError");
  } catch (const NewtonDivergedError& err) {
    CHECK(err.residual_norm() > 0.0);
    CHECK(err.last_iterate().size() == 1);
  }
}

TEST_CASE("drag extremal matches its logarithmic closed form") {
  const LiftedProblem lifted = drag();
  IntegratorConfig config;
  config.step = 1e-3;
  const Trajectory traj =
      integrate_extremal(lifted.problem, {0.0}, {-1.0}, {time_shift(1, 1)}, config);
  REQUIRE(traj.size() == 1001);
  CHECK(traj.times.back() == 1.0);

  double worst_q = 0.0, worst_p = 0.0, worst_u = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    worst_q = std::max(worst_q, std::abs(traj.states[k][0] + std::log(t + 1.0)));
    worst_p = std::max(worst_p, std::abs(traj.costates[k][0] + 1.0 / (t + 1.0)));
    worst_u = std::max(worst_u, std::abs(traj.controls[k][0] + 1.0 / (t + 1.0)));
  }
  CHECK(worst_q <= 1e-6);
  CHECK(worst_p <= 1e-6);
  CHECK(worst_u <= 1e-6);
  CHECK(traj.states.back()[0] == doctest::Approx(-0.6931472).epsilon(1e-6));

  // stationary condition holds at every node
  for (std::size_t k = 0; k < traj.size(); k += 100)
    CHECK(std::abs(traj.costates[k][0] - traj.controls[k][0]) <= config.newton_tol);

  // warm-started Newton stays cheap
  CHECK(traj.newton.max_iterations <= 5);
}

TEST_CASE("free oscillator conserves the Hamiltonian at fourth order") {
  const LiftedProblem lifted = oscillator("0");
  const Expr H = hamiltonian(lifted.problem);
  auto drift_at = [&](double h) {
    IntegratorConfig config;
    config.step = h;
    const Trajectory traj = integrate_extremal(lifted.problem, {1.0}, {0.0}, {}, config);
    const double h0 = hamiltonian_at(H, traj, 0);
    double drift = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k)
      drift = std::max(drift, std::abs(hamiltonian_at(H, traj, k) - h0));
    return drift;
  };
  const double coarse = drift_at(0.1);
  const double fine = drift_at(0.05);
  CHECK(coarse <= 1e-4);
  CHECK(coarse / fine >= 11.0);  // fourth-order signal

  // and at the production step the drift is at round-off scale
  CHECK(drift_at(1e-3) <= 1e-10);
}

TEST_CASE("zero problem yields a constant trajectory") {
  OCProblem prob;
  prob.n = 1;
  prob.m = 1;
  prob.lagrangian = Expr::constant(0.0);
  prob.dynamics = {Expr::constant(0.0)};
  prob.force = {Expr::constant(0.0)};
  prob.t_final = 1.0;
  IntegratorConfig config;
  config.step = 0.01;
  config.control_law = std::vector<Expr>{Expr::constant(0.0)};  // H is u-independent
  const Trajectory traj = integrate_extremal(prob, {0.4}, {-0.7}, {time_shift(1, 1)}, config);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CHECK(traj.states[k][0] == 0.4);
    CHECK(traj.costates[k][0] == -0.7);
    CHECK(traj.f[k][0] == 0.0);
  }
}

TEST_CASE("the time grid honors partial final steps") {
  const LiftedProblem lifted = drag();
  IntegratorConfig config;
  config.step = 0.3;
  const Trajectory traj =
      integrate_extremal(lifted.problem, {0.0}, {-1.0}, {}, config);
  REQUIRE(traj.size() == 5);
  CHECK(traj.times[3] == doctest::Approx(0.9));
  CHECK(traj.times.back() == 1.0);
}

TEST_CASE("dH/dt equals dH/dt + Q.dH/dp along nonconservative extremals") {
  const LiftedProblem lifted = drag();
  const HamiltonianParts parts = hamiltonian_parts(lifted.problem);
  auto worst_residual = [&](double h) {
    IntegratorConfig config;
    config.step = h;
    const Trajectory traj =
        integrate_extremal(lifted.problem, {0.0}, {-1.0}, {}, config);
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
      const double dHdt_num = (hamiltonian_at(parts.H, traj, k + 1) -
                               hamiltonian_at(parts.H, traj, k - 1)) /
                              (traj.times[k + 1] - traj.times[k - 1]);
      const Env env = traj.env_at(k);
      double rhs = parts.dt.eval(env);
      for (int i = 0; i < lifted.problem.n; ++i)
        rhs += lifted.problem.force[static_cast<std::size_t>(i)].eval(env) *
               parts.dp[static_cast<std::size_t>(i)].eval(env);
      worst = std::max(worst, std::abs(dHdt_num - rhs));
    }
    return worst;
  };
  const double coarse = worst_residual(1e-2);
  const double fine = worst_residual(5e-3);
  CHECK(coarse <= 1e-3);
  CHECK(coarse / fine >= 3.5);  // second-order central differences
}

TEST_CASE("first-order extremals satisfy the forced Euler-Lagrange equation") {
  const LiftedProblem lifted = drag();
  const Expr dLdu = lifted.problem.lagrangian.diff(VarId::control(0)).simplified();
  const Expr dLdq = lifted.problem.lagrangian.diff(VarId::state(0)).simplified();
  auto worst_residual = [&](double h) {
    IntegratorConfig config;
    config.step = h;
    const Trajectory traj =
        integrate_extremal(lifted.problem, {0.0}, {-1.0}, {}, config);
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
      const double ddt = (dLdu.eval(traj.env_at(k + 1)) - dLdu.eval(traj.env_at(k - 1))) /
                         (traj.times[k + 1] - traj.times[k - 1]);
      const Env env = traj.env_at(k);
      const double rhs = dLdq.eval(env) + lifted.problem.force[0].eval(env);
      worst = std::max(worst, std::abs(ddt - rhs));
    }
    return worst;
  };
  const double coarse = worst_residual(1e-2);
  const double fine = worst_residual(5e-3);
  CHECK(coarse <= 1e-3);
  CHECK(coarse / fine >= 3.0);
}

TEST_CASE("blow-up is detected and reported with the last good time") {
  // p' = p^2 with p(0)=1 has a pole at t=1.
  const LiftedProblem lifted = drag(2.0);
  IntegratorConfig config;
  config.step = 1e-3;
  try {
    integrate_extremal(lifted.problem, {0.0}, {1.0}, {}, config);
    FAIL("expected NonFiniteStateError");
  } catch (const NonFiniteStateError& err) {
    CHECK(err.last_good_time() > 0.9);
    CHECK(err.last_good_time() < 1.05);
    CHECK(err.partial().size() > 900);
    for (double x : err.partial().states.back()) CHECK(std::isfinite(x));
  }
}

TEST_CASE("fourth-order route matches the cosh/sinh closed form") {
  // a=1, b=0, mu=0: q'''' = qddot.
  const LiftedProblem lifted = higher_order(1.0, 0.0, 0.0, 2.0);
  IntegratorConfig config;
  config.step = 1e-3;
  const SecondOrderInitial init{0.3, -0.2, 0.5, 0.1};
  const Trajectory traj = integrate_el2(lifted, init, {time_shift(2, 1)}, config);
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    const double qdd = init.qddot * std::cosh(t) + init.qdddot * std::sinh(t);
    const double q = init.q + init.qdot * t + init.qddot * (std::cosh(t) - 1.0) +
                     init.qdddot * (std::sinh(t) - t);
    worst = std::max(worst, std::abs(traj.states[k][0] - q));
    worst = std::max(worst, std::abs(traj.controls[k][0] - qdd));
  }
  CHECK(worst <= 1e-6);
  CHECK(traj.has_second_order_cache());
  // force off: the path correction stays identically zero
  for (std::size_t k = 0; k < traj.size(); ++k) CHECK(traj.f[k][0] == 0.0);
}

TEST_CASE("fourth-order route reconstructs costates and accumulates f") {
  const double a = 1.0, b = 1.0, mu = 0.1;
  const LiftedProblem lifted = higher_order(a, b, mu, 4.0);
  IntegratorConfig config;
  config.step = 1e-3;
  const SecondOrderInitial init{1.0, 0.0, 0.5, 0.0};
  const Trajectory traj = integrate_el2(lifted, init, {time_shift(2, 1)}, config);

  // p2 = dL/dqddot = qddot, p1 = a*qdot - qdddot; stationary condition exact.
  for (std::size_t k = 0; k < traj.size(); k += 250) {
    CHECK(traj.costates[k][1] == doctest::Approx(traj.controls[k][0]).epsilon(1e-12));
    CHECK(traj.costates[k][0] ==
          doctest::Approx(a * traj.states[k][1] - traj.qdddot[k]).epsilon(1e-9));
  }

  // df/dt = -qdot*Q at interior nodes (tau=1, xi=0), second-order accurate.
  ParseOptions slot;
  slot.allow_qdddot = true;
  char Qtext[160];
  std::snprintf(Qtext, sizeof Qtext, "%.17g*q2 + %.17g*u1 - %.17g*qdddot", mu,
                (mu / a) * (mu / a), 2.0 * mu / a);
  const Expr Q = parse(Qtext, 2, 1, slot);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); k += 7) {
    const double dfdt =
        (traj.f[k + 1][0] - traj.f[k - 1][0]) / (traj.times[k + 1] - traj.times[k - 1]);
    const Env env = traj.env_at(k);
    const double expected = -traj.states[k][1] * Q.eval(env);
    worst = std::max(worst, std::abs(dfdt - expected));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("zero initial data keeps the homogeneous fourth-order system at rest") {
  const LiftedProblem lifted = higher_order(1.0, 1.0, 0.1, 2.0);
  IntegratorConfig config;
  config.step = 1e-2;
  const Trajectory traj = integrate_el2(lifted, SecondOrderInitial{}, {}, config);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CHECK(traj.states[k][0] == 0.0);
    CHECK(traj.states[k][1] == 0.0);
    CHECK(traj.controls[k][0] == 0.0);
  }
}

TEST_CASE("a singular second-order Lagrangian is rejected") {
  const LiftedProblem bad = lift_cv2(parse("u1*q2", 2, 1), Expr::constant(0.0), 0.0, 1.0);
  IntegratorConfig config;
  config.step = 0.1;
  CHECK_THROWS_AS(integrate_el2(bad, SecondOrderInitial{1, 0, 0, 0}, {}, config),
                  SingularLagrangianError);
}

TEST_CASE("first-order integrator refuses the qdddot slot") {
  const LiftedProblem lifted = higher_order(1.0, 1.0, 0.1, 2.0);
  IntegratorConfig config;
  CHECK_THROWS_AS(
      integrate_extremal(lifted.problem, {1.0, 0.0}, {0.0, 0.0}, {}, config),
      ValidationError);
}
