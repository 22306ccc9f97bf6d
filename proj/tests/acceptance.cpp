// Acceptance suite: one line per criterion, hard failure on any miss.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "commands.hpp"
#include "noct/conservation.hpp"
#include "noct/parse.hpp"
#include "noct/symmetry.hpp"
#include "problem_file.hpp"

using namespace noct;
using namespace noct::cli;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void note(const std::string& text) { g_notes.push_back(text); }

void criterion(int number, const std::string& label, const std::function<bool()>& body) {
  bool ok = false;
  std::string error;
  g_notes.clear();
  try {
    ok = body();
  } catch (const std::exception& err) {
    error = err.what();
  }
  if (ok) {
    std::printf("[PASS] criterion %d: %s\n", number, label.c_str());
  } else {
    ++g_failures;
    std::printf("[FAIL] criterion %d: %s%s%s\n", number, label.c_str(),
                error.empty() ? "" : " — ", error.c_str());
  }
  for (const std::string& extra : g_notes) std::printf("       %s\n", extra.c_str());
}

std::string fixture(const std::string& name) {
  return std::string(NOCT_PROBLEM_DIR) + "/" + name;
}

char fmt_buf[128];
const char* fmt(double v) {
  std::snprintf(fmt_buf, sizeof fmt_buf, "%.3e", v);
  return fmt_buf;
}

Trajectory integrate_fixture(const LoadedProblem& loaded, double h) {
  IntegratorConfig config = loaded.config;
  config.step = h;
  if (loaded.second_order())
    return integrate_el2(*loaded.lifted, *loaded.file.initial_second_order, loaded.symmetries,
                         config);
  return integrate_extremal(loaded.problem, *loaded.file.initial_q, *loaded.file.initial_p,
                            loaded.symmetries, config);
}

ConstantForm fixture_form(const LoadedProblem& loaded) {
  return loaded.second_order() ? ConstantForm::SecondOrderCV : ConstantForm::OptimalControl;
}

// ---------------------------------------------------------------------------

bool criterion1_drag_oracle() {
  const LoadedProblem loaded = load_problem(fixture("quadratic_drag.json"));
  const auto start = std::chrono::steady_clock::now();
  const Trajectory traj = integrate_fixture(loaded, 1e-3);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  double worst_q = 0.0, worst_p = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    worst_q = std::max(worst_q, std::abs(traj.states[k][0] + std::log(t + 1.0)));
    worst_p = std::max(worst_p, std::abs(traj.costates[k][0] + 1.0 / (t + 1.0)));
  }
  note("max |q - (-ln(t+1))| = " + std::string(fmt(worst_q)) +
       ", max |p - (-1/(t+1))| = " + std::string(fmt(worst_p)) +
       ", runtime = " + std::string(fmt(seconds)) + " s");
  return worst_q <= 1e-6 && worst_p <= 1e-6 && seconds < 1.0;
}

bool criterion2_symmetry_recovery() {
  const LoadedProblem loaded = load_problem(fixture("quadratic_drag.json"));
  const SymmetryBasis basis =
      find_symmetries(loaded.problem, AnsatzSpec::uniform(1), 1e-9);
  note("nullspace dimension = " + std::to_string(basis.dimension()));
  if (basis.dimension() != 3) return false;

  const auto t1 = std::vector<std::pair<VarId, int>>{{VarId::time(), 1}};
  const auto q1 = std::vector<std::pair<VarId, int>>{{VarId::state(0), 1}};
  const auto u1 = std::vector<std::pair<VarId, int>>{{VarId::control(0), 1}};
  const auto p1 = std::vector<std::pair<VarId, int>>{{VarId::costate(0), 1}};
  const auto unit = std::vector<std::pair<VarId, int>>{};

  struct Target {
    const char* label;
    std::vector<std::tuple<std::string, int, std::vector<std::pair<VarId, int>>, double>>
        coefficients;
    const char* tau;
    const char* xi;
    const char* sigma;
    const char* alpha;
  };
  const std::vector<Target> targets{
      {"(2t, q, -u, -p)",
       {{"tau", 0, t1, 2.0}, {"xi", 0, q1, 1.0}, {"sigma", 0, u1, -1.0}, {"alpha", 0, p1, -1.0}},
       "2*t", "q1", "-u1", "-p1"},
      {"(1, 0, 0, 0)", {{"tau", 0, unit, 1.0}}, "1", "0", "0", "0"},
      {"(0, 1, 0, 0)", {{"xi", 0, unit, 1.0}}, "0", "1", "0", "0"},
  };

  for (const Target& target : targets) {
    std::vector<double> v(static_cast<std::size_t>(basis.layout.size), 0.0);
    for (const auto& [component, index, powers, value] : target.coefficients) {
      const int at = basis.layout.index_of(component, index, powers);
      if (at < 0) return false;
      v[static_cast<std::size_t>(at)] = value;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    const double distance = basis.projection_distance(v);

    Generators gen = Generators::zero(1, 1);
    gen.tau = parse(target.tau, 1, 1);
    gen.xi = {parse(target.xi, 1, 1)};
    gen.sigma = {parse(target.sigma, 1, 1)};
    gen.alpha = {parse(target.alpha, 1, 1)};
    const InvarianceVerdict verdict = check_invariance(loaded.problem, gen, 1e-9);
    note(std::string(target.label) + ": projection distance " + fmt(distance) +
         (verdict.invariant ? ", residual PASS" : ", residual FAIL"));
    if (distance > 1e-6 || !verdict.invariant) return false;
  }
  return true;
}

bool criterion3_conservation_drift() {
  bool ok = true;
  for (const char* name :
       {"forced_oscillation.json", "quadratic_drag.json", "higher_order_damped.json"}) {
    const LoadedProblem loaded = load_problem(fixture(name));
    BuildOptions options;  // enforce: every fixture symmetry must verify
    for (std::size_t j = 0; j < loaded.symmetries.size(); ++j) {
      MotionConstant mc;
      if (loaded.lifted)
        mc = build_constant(*loaded.lifted, loaded.symmetries[j], fixture_form(loaded),
                            static_cast<int>(j), options);
      else
        mc = build_constant(loaded.problem, loaded.symmetries[j], fixture_form(loaded),
                            static_cast<int>(j), options);

      auto drift_at = [&](double h) {
        return evaluate_constant(mc, integrate_fixture(loaded, h)).rel_drift;
      };
      const double pinned = drift_at(1e-3);
      bool this_ok = pinned <= 1e-6;

      // Order gate: measure the halving ratio at the coarsest step whose
      // drift rises above the round-off floor; drifts pinned at round-off
      // for every step carry no measurable order and pass by convergence.
      double h = 1e-3;
      double coarse = pinned;
      while (coarse <= 1e-10 && h < 0.05) {
        h *= 2.0;
        coarse = drift_at(h);
      }
      std::string order_text = "order unmeasurable (round-off at all steps)";
      if (coarse > 1e-10) {
        const double fine = drift_at(h / 2.0);
        const double ratio = coarse / std::max(fine, 1e-300);
        order_text = "halving at h=" + std::string(fmt(h)) + " reduces drift by " +
                     std::string(fmt(ratio)) + "x";
        this_ok = this_ok && ratio >= 11.0;
      }
      note(std::string(name) + " symmetry " + std::to_string(j + 1) + ": rel drift " +
           fmt(pinned) + " at h=1e-3; " + order_text);
      ok = ok && this_ok;
    }
  }
  return ok;
}

bool criterion4_conservative_reduction() {
  const LoadedProblem loaded = load_problem(fixture("harmonic_oscillator.json"));
  if (!loaded.problem.conservative()) return false;
  const Trajectory traj = integrate_fixture(loaded, 1e-3);

  bool f_zero = true;
  for (std::size_t k = 0; k < traj.size(); ++k) f_zero = f_zero && traj.f[k][0] == 0.0;
  note(std::string("f column identically zero: ") + (f_zero ? "yes" : "no"));

  const MotionConstant oc = build_constant(*loaded.lifted, loaded.symmetries[0],
                                           ConstantForm::OptimalControl, 0);
  const MotionConstant cons = build_constant(*loaded.lifted, loaded.symmetries[0],
                                             ConstantForm::Conservative, -1);
  const ConservationReport r_oc = evaluate_constant(oc, traj);
  const ConservationReport r_cons = evaluate_constant(cons, traj);
  bool coincide = true;
  for (std::size_t k = 0; k < traj.size(); ++k)
    coincide = coincide && r_oc.series[k] == r_cons.series[k];
  note(std::string("force-aware and conservative forms coincide: ") +
       (coincide ? "yes" : "no"));

  const Expr H = hamiltonian(loaded.problem);
  double h_drift = 0.0;
  const double h0 = H.eval(traj.env_at(0));
  for (std::size_t k = 0; k < traj.size(); ++k)
    h_drift = std::max(h_drift, std::abs(H.eval(traj.env_at(k)) - h0));
  note("max |H(t_k) - H(t_0)| = " + std::string(fmt(h_drift)));

  return f_zero && coincide && h_drift <= 1e-10;
}

bool criterion5_sign_identities() {
  bool ok = true;
  for (const char* name :
       {"forced_oscillation.json", "quadratic_drag.json", "higher_order_damped.json"}) {
    const LoadedProblem loaded = load_problem(fixture(name));
    const Trajectory traj = integrate_fixture(loaded, 1e-3);
    BuildOptions lax;
    lax.enforce_symmetry = false;
    for (std::size_t j = 0; j < loaded.symmetries.size(); ++j) {
      const double mismatch =
          equivalence_check(*loaded.lifted, loaded.symmetries[j], static_cast<int>(j), traj);
      const MotionConstant oc = build_constant(*loaded.lifted, loaded.symmetries[j],
                                               ConstantForm::OptimalControl,
                                               static_cast<int>(j), lax);
      const ConservationReport r = evaluate_constant(oc, traj);
      double scale = 0.0;
      for (double c : r.series) scale = std::max(scale, std::abs(c));
      const double bound = 1e-10 * (1.0 + scale);
      note(std::string(name) + " symmetry " + std::to_string(j + 1) + ": max |C_cv + C_oc| = " +
           fmt(mismatch) + " (bound " + std::string(fmt(bound)) + ")");
      ok = ok && mismatch <= bound;
    }
  }
  return ok;
}

bool criterion6_power_balance() {
  bool ok = true;
  for (const char* name : {"quadratic_drag.json", "forced_oscillation.json"}) {
    const LoadedProblem loaded = load_problem(fixture(name));
    const HamiltonianParts parts = hamiltonian_parts(loaded.problem);
    auto worst_residual = [&](double h) {
      const Trajectory traj = integrate_fixture(loaded, h);
      double worst = 0.0;
      for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
        const double dH = (parts.H.eval(traj.env_at(k + 1)) -
                           parts.H.eval(traj.env_at(k - 1))) /
                          (traj.times[k + 1] - traj.times[k - 1]);
        const Env env = traj.env_at(k);
        double rhs = parts.dt.eval(env);
        for (int i = 0; i < loaded.problem.n; ++i)
          rhs += loaded.problem.force[static_cast<std::size_t>(i)].eval(env) *
                 parts.dp[static_cast<std::size_t>(i)].eval(env);
        worst = std::max(worst, std::abs(dH - rhs));
      }
      return worst;
    };
    const double coarse = worst_residual(1e-2);
    const double fine = worst_residual(5e-3);
    const double ratio = coarse / std::max(fine, 1e-300);
    note(std::string(name) + ": residual " + fmt(coarse) + " at h=1e-2, ratio " +
         std::string(fmt(ratio)) + " against h=5e-3");
    ok = ok && ratio >= 3.5;
  }
  return ok;
}

bool criterion7_decision_soundness() {
  struct Mutation {
    const char* fixture_name;
    int symmetry;    // declared symmetry to mutate (0-based)
    const char* component;
    const char* value;
  };
  // three documented mutations per fixture
  const std::vector<Mutation> mutations{
      {"forced_oscillation.json", 0, "xi", "q1"},
      {"forced_oscillation.json", 0, "tau", "t"},
      {"forced_oscillation.json", 0, "sigma", "u1"},
      {"quadratic_drag.json", 0, "tau", "2*t + t^2"},
      {"quadratic_drag.json", 0, "alpha", "0"},
      {"quadratic_drag.json", 0, "gauge", "q1"},
      {"higher_order_damped.json", 0, "xi", "q1"},
      {"higher_order_damped.json", 0, "tau", "t"},
      {"higher_order_damped.json", 0, "sigma", "u1"},
  };

  bool ok = true;
  for (const char* name :
       {"forced_oscillation.json", "quadratic_drag.json", "higher_order_damped.json"}) {
    const LoadedProblem loaded = load_problem(fixture(name));
    for (std::size_t j = 0; j < loaded.symmetries.size(); ++j) {
      const InvarianceVerdict verdict =
          check_invariance(loaded.problem, loaded.symmetries[j], 1e-9);
      if (!verdict.invariant) {
        note(std::string(name) + " declared symmetry " + std::to_string(j + 1) +
             " unexpectedly fails");
        ok = false;
      }
    }
  }

  int rejected = 0;
  for (const Mutation& mutation : mutations) {
    const LoadedProblem loaded = load_problem(fixture(mutation.fixture_name));
    Generators gen = loaded.symmetries[static_cast<std::size_t>(mutation.symmetry)];
    const Expr value = parse(mutation.value, loaded.problem.n, loaded.problem.m);
    if (std::string(mutation.component) == "tau")
      gen.tau = value;
    else if (std::string(mutation.component) == "xi")
      gen.xi[0] = value;
    else if (std::string(mutation.component) == "sigma")
      gen.sigma[0] = value;
    else if (std::string(mutation.component) == "alpha")
      gen.alpha[0] = value;
    else
      gen.gauge = value;
    const InvarianceVerdict verdict = check_invariance(loaded.problem, gen, 1e-9);
    const bool caught = !verdict.invariant && verdict.witness.has_value() &&
                        std::isfinite(verdict.witness->value);
    if (caught) ++rejected;
    if (!caught) {
      note(std::string(mutation.fixture_name) + " mutation " + mutation.component + " = " +
           mutation.value + " was NOT rejected");
      ok = false;
    }
  }
  note(std::to_string(rejected) + "/" + std::to_string(mutations.size()) +
       " mutations rejected with finite witnesses");
  return ok;
}

bool criterion8_determinism() {
  bool ok = true;
  for (const char* name : {"quadratic_drag.json", "higher_order_damped.json"}) {
    const CommandOutcome a = cmd_verify(fixture(name), {});
    const CommandOutcome b = cmd_verify(fixture(name), {});
    const bool same_report = a.report.dump(2) == b.report.dump(2);
    const CommandOutcome c1 = cmd_integrate(fixture(name), {});
    const CommandOutcome c2 = cmd_integrate(fixture(name), {});
    const bool same_csv = c1.csv == c2.csv;
    note(std::string(name) + ": reports byte-identical: " + (same_report ? "yes" : "no") +
         ", CSV byte-identical: " + (same_csv ? "yes" : "no"));
    ok = ok && same_report && same_csv && a.exit_code == 0;
  }
  return ok;
}

}  // namespace

int main() {
  criterion(1, "logarithmic extremal matches the closed form within 1e-6 in under 1 s",
            criterion1_drag_oracle);
  criterion(2, "degree-1 ansatz recovers the exact three-dimensional symmetry space",
            criterion2_symmetry_recovery);
  criterion(3, "constants of motion drift below 1e-6 at h=1e-3 with fourth-order decay",
            criterion3_conservation_drift);
  criterion(4, "with forces off: f vanishes, both forms coincide, H is conserved to 1e-10",
            criterion4_conservative_reduction);
  criterion(5, "variational and optimal-control constants are pointwise negatives",
            criterion5_sign_identities);
  criterion(6, "dH/dt balances dH/dt + Q.dH/dp at second order in the grid",
            criterion6_power_balance);
  criterion(7, "declared symmetries pass; every documented mutation fails with a witness",
            criterion7_decision_soundness);
  criterion(8, "verify and integrate runs are byte-identical under a fixed seed",
            criterion8_determinism);

  if (g_failures > 0) {
    std::printf("ACCEPTANCE: %d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("ACCEPTANCE: all 8 criteria passed\n");
  return 0;
}
