#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "noct/conservation.hpp"
#include "noct/symmetry.hpp"
#include "problem_file.hpp"
#include "trajectory_csv.hpp"

namespace noct::cli {

using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kOrderFloor = 1e-12;       // rel drift below this has no order signal
constexpr double kEquivalenceTol = 1e-10;   // scale-relative bound on C_cv + C_oc

ordered_json report_header(const std::string& command, const LoadedProblem& loaded,
                           std::uint64_t seed) {
  ordered_json j;
  j["tool"] = "noct";
  j["version"] = kVersion;
  j["command"] = command;
  j["problem"] = loaded.file.name;
  j["seed"] = seed;
  return j;
}

ordered_json witness_json(const ZeroWitness& witness, int component) {
  ordered_json j;
  j["component"] = component < 0 ? std::string("free_part")
                                 : "qdot_coeff_" + std::to_string(component + 1);
  j["t"] = witness.env.t;
  j["q"] = witness.env.q;
  j["u"] = witness.env.u;
  j["p"] = witness.env.p;
  j["residual"] = witness.value;
  j["scale"] = witness.scale;
  return j;
}

ordered_json generators_json(const Generators& gen) {
  const ProblemFile::SymmetryDecl decl = to_decl(gen);
  ordered_json j;
  j["tau"] = decl.tau;
  j["xi"] = decl.xi;
  j["sigma"] = decl.sigma;
  j["alpha"] = decl.alpha;
  j["gauge"] = decl.gauge;
  return j;
}

ordered_json newton_json(const NewtonStats& stats) {
  ordered_json j;
  j["solves"] = stats.solves;
  j["max_iterations"] = stats.max_iterations;
  j["total_iterations"] = stats.total_iterations;
  return j;
}

std::string format_residual(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", value);
  return buf;
}

// Per-symmetry invariance section shared by check and verify.
ordered_json run_checks(const LoadedProblem& loaded, double tol, std::uint64_t seed,
                        bool& all_pass, std::string& human) {
  ordered_json checks = ordered_json::array();
  for (std::size_t i = 0; i < loaded.symmetries.size(); ++i) {
    const InvarianceVerdict verdict =
        check_invariance(loaded.problem, loaded.symmetries[i], tol, seed);
    ordered_json entry;
    entry["symmetry"] = i + 1;
    entry["invariant"] = verdict.invariant;
    entry["residual_max"] = verdict.residual_max;
    if (!verdict.invariant && verdict.witness)
      entry["witness"] = witness_json(*verdict.witness, verdict.failed_component);
    checks.push_back(std::move(entry));
    if (verdict.invariant) {
      human += "symmetry " + std::to_string(i + 1) + ": PASS (max residual " +
               format_residual(verdict.residual_max) + ")\n";
    } else {
      all_pass = false;
      human += "symmetry " + std::to_string(i + 1) + ": FAIL (residual " +
               format_residual(verdict.residual_max) + ")\n";
      if (verdict.witness) {
        const Env& env = verdict.witness->env;
        std::string where = "t=" + std::to_string(env.t);
        for (std::size_t v = 0; v < env.q.size(); ++v)
          where += " q" + std::to_string(v + 1) + "=" + std::to_string(env.q[v]);
        for (std::size_t v = 0; v < env.u.size(); ++v)
          where += " u" + std::to_string(v + 1) + "=" + std::to_string(env.u[v]);
        for (std::size_t v = 0; v < env.p.size(); ++v)
          where += " p" + std::to_string(v + 1) + "=" + std::to_string(env.p[v]);
        human += "  witness: " + where + ", residual " +
                 format_residual(verdict.witness->value) + " in " +
                 (verdict.failed_component < 0
                      ? std::string("the qdot-free part")
                      : "the qdot coefficient " +
                            std::to_string(verdict.failed_component + 1)) +
                 "\n";
      }
    }
  }
  return checks;
}

ConstantForm default_form(const LoadedProblem& loaded) {
  return loaded.second_order() ? ConstantForm::SecondOrderCV : ConstantForm::OptimalControl;
}

Trajectory run_trajectory(const LoadedProblem& loaded, double h) {
  IntegratorConfig config = loaded.config;
  config.step = h;
  if (loaded.second_order()) {
    if (!loaded.file.initial_second_order)
      throw ValidationError("problem file has no initial data (q, qdot, qddot, qdddot)");
    return integrate_el2(*loaded.lifted, *loaded.file.initial_second_order, loaded.symmetries,
                         config);
  }
  if (!loaded.file.initial_q || !loaded.file.initial_p)
    throw ValidationError("problem file has no initial data (q, p)");
  return integrate_extremal(loaded.problem, *loaded.file.initial_q, *loaded.file.initial_p,
                            loaded.symmetries, config);
}

std::vector<MotionConstant> build_constants(const LoadedProblem& loaded, double tol,
                                            std::uint64_t seed, bool enforce) {
  BuildOptions options;
  options.enforce_symmetry = enforce;
  options.tol = tol;
  options.seed = seed;
  const ConstantForm form = default_form(loaded);
  std::vector<MotionConstant> constants;
  for (std::size_t i = 0; i < loaded.symmetries.size(); ++i) {
    if (loaded.lifted)
      constants.push_back(build_constant(*loaded.lifted, loaded.symmetries[i], form,
                                         static_cast<int>(i), options));
    else
      constants.push_back(build_constant(loaded.problem, loaded.symmetries[i], form,
                                         static_cast<int>(i), options));
  }
  return constants;
}

ordered_json trajectory_json(const Trajectory& traj, double h) {
  ordered_json j;
  j["h"] = h;
  j["nodes"] = traj.size();
  j["t_final"] = traj.times.empty() ? 0.0 : traj.times.back();
  j["newton"] = newton_json(traj.newton);
  return j;
}

}  // namespace

CommandOutcome cmd_check(const std::string& path, const CheckOptions& options) {
  const LoadedProblem loaded = load_problem(path);
  CommandOutcome outcome;
  outcome.report = report_header("check", loaded, options.seed);
  outcome.report["tolerance"] = options.tol;
  bool all_pass = true;
  outcome.report["checks"] = run_checks(loaded, options.tol, options.seed, all_pass,
                                        outcome.human);
  outcome.report["pass"] = all_pass;
  outcome.exit_code = all_pass ? 0 : 1;
  return outcome;
}

CommandOutcome cmd_find(const std::string& path, const FindOptions& options) {
  const LoadedProblem loaded = load_problem(path);
  const AnsatzSpec spec = AnsatzSpec::uniform(options.degree, options.gauge);
  const SymmetryBasis basis =
      find_symmetries(loaded.problem, spec, options.tol, options.seed);

  CommandOutcome outcome;
  outcome.report = report_header("find", loaded, options.seed);
  outcome.report["degree"] = options.degree;
  outcome.report["gauge"] = options.gauge;
  outcome.report["tolerance"] = options.tol;
  outcome.report["unknowns"] = basis.layout.size;
  outcome.report["dimension"] = basis.dimension();
  outcome.report["singular_values"] = basis.singular_values;
  ordered_json members = ordered_json::array();
  for (const Generators& gen : basis.members) members.push_back(generators_json(gen));
  outcome.report["basis"] = members;
  outcome.report["pass"] = true;

  outcome.human += "symmetry space dimension: " + std::to_string(basis.dimension()) + "\n";
  for (int k = 0; k < basis.dimension(); ++k) {
    const Generators& gen = basis.members[static_cast<std::size_t>(k)];
    const ProblemFile::SymmetryDecl decl = to_decl(gen);
    outcome.human += "  [" + std::to_string(k + 1) + "] tau = " + decl.tau + "\n";
    for (std::size_t i = 0; i < decl.xi.size(); ++i)
      outcome.human += "      xi" + std::to_string(i + 1) + " = " + decl.xi[i] + "\n";
    for (std::size_t j = 0; j < decl.sigma.size(); ++j)
      outcome.human += "      sigma" + std::to_string(j + 1) + " = " + decl.sigma[j] + "\n";
    for (std::size_t i = 0; i < decl.alpha.size(); ++i)
      outcome.human += "      alpha" + std::to_string(i + 1) + " = " + decl.alpha[i] + "\n";
    if (options.gauge) outcome.human += "      gauge = " + decl.gauge + "\n";
  }

  if (!options.emit_path.empty()) {
    ordered_json doc = loaded.file.raw;
    if (!doc.contains("symmetries")) doc["symmetries"] = ordered_json::array();
    for (const Generators& gen : basis.members) doc["symmetries"].push_back(generators_json(gen));
    std::ofstream out(options.emit_path);
    if (!out) throw ValidationError("cannot write " + options.emit_path);
    out << doc.dump(2) << "\n";
    outcome.human += "wrote " + options.emit_path + "\n";
  }
  return outcome;
}

CommandOutcome cmd_integrate(const std::string& path, const IntegrateOptions& options) {
  const LoadedProblem loaded = load_problem(path);
  double h = options.h.value_or(loaded.file.h);
  if (options.steps) {
    if (*options.steps < 1) throw ValidationError("steps must be positive");
    h = (loaded.problem.t_final - loaded.problem.t_initial) /
        static_cast<double>(*options.steps);
  }

  CommandOutcome outcome;
  outcome.report = report_header("integrate", loaded, options.seed);
  const std::vector<MotionConstant> constants =
      build_constants(loaded, 1e-9, options.seed, /*enforce=*/false);

  try {
    const Trajectory traj = run_trajectory(loaded, h);
    std::vector<ConservationReport> reports;
    ordered_json table = ordered_json::array();
    for (std::size_t i = 0; i < constants.size(); ++i) {
      reports.push_back(evaluate_constant(constants[i], traj));
      ordered_json entry;
      entry["symmetry"] = i + 1;
      entry["form"] = to_string(constants[i].form);
      entry["verified_symmetry"] = constants[i].verified;
      entry["reference"] = reports.back().reference;
      entry["max_abs_drift"] = reports.back().max_abs_drift;
      entry["rel_drift"] = reports.back().rel_drift;
      table.push_back(std::move(entry));
    }
    outcome.report["trajectory"] = trajectory_json(traj, h);
    outcome.report["conservation"] = table;
    outcome.report["pass"] = true;
    outcome.csv = trajectory_csv(traj, reports);
    outcome.human += "integrated " + std::to_string(traj.size()) + " nodes, final t = " +
                     std::to_string(traj.times.back()) + "\n";
  } catch (const NonFiniteStateError& err) {
    outcome.exit_code = 1;
    outcome.report["error"] = err.what();
    outcome.report["last_good_time"] = err.last_good_time();
    outcome.report["pass"] = false;
    // flush what was integrated before the blow-up
    std::vector<ConservationReport> partial_reports;
    for (const MotionConstant& mc : constants) {
      try {
        partial_reports.push_back(evaluate_constant(mc, err.partial()));
      } catch (const Error&) {
        ConservationReport placeholder;
        placeholder.series.assign(err.partial().size(), 0.0);
        partial_reports.push_back(std::move(placeholder));
      }
    }
    outcome.csv = trajectory_csv(err.partial(), partial_reports);
    outcome.human += std::string("integration failed: ") + err.what() + "\n";
  } catch (const NewtonDivergedError& err) {
    outcome.exit_code = 1;
    outcome.report["error"] = err.what();
    outcome.report["residual_norm"] = err.residual_norm();
    outcome.report["pass"] = false;
    outcome.human += std::string("integration failed: ") + err.what() + "\n";
  }
  return outcome;
}

CommandOutcome cmd_verify(const std::string& path, const VerifyOptions& options) {
  const LoadedProblem loaded = load_problem(path);
  if (loaded.symmetries.empty())
    throw ValidationError("verify needs at least one declared symmetry");
  const double h = options.h.value_or(loaded.file.h);
  if (options.h2 && !(*options.h2 < h))
    throw ValidationError("--h2 must be smaller than the primary step for the order study");

  CommandOutcome outcome;
  outcome.report = report_header("verify", loaded, options.seed);
  outcome.report["h"] = h;
  if (options.h2) outcome.report["h2"] = *options.h2;
  outcome.report["drift_tolerance"] = options.drift_tol;

  bool pass = true;
  outcome.report["checks"] = run_checks(loaded, options.tol, options.seed, pass, outcome.human);
  if (!pass) {
    outcome.report["pass"] = false;
    outcome.exit_code = 1;
    outcome.human += "verdict: FAIL (invariance)\n";
    return outcome;
  }

  const std::vector<MotionConstant> constants =
      build_constants(loaded, options.tol, options.seed, /*enforce=*/true);
  const Trajectory traj = run_trajectory(loaded, h);
  std::optional<Trajectory> traj2;
  if (options.h2) traj2 = run_trajectory(loaded, *options.h2);
  outcome.report["trajectory"] = trajectory_json(traj, h);

  ordered_json table = ordered_json::array();
  for (std::size_t i = 0; i < constants.size(); ++i) {
    ConservationReport report = evaluate_constant(constants[i], traj);
    ordered_json entry;
    entry["symmetry"] = i + 1;
    entry["form"] = to_string(constants[i].form);
    entry["reference"] = report.reference;
    entry["max_abs_drift"] = report.max_abs_drift;
    entry["rel_drift"] = report.rel_drift;
    bool ok = report.rel_drift <= options.drift_tol;
    if (traj2) {
      const ConservationReport fine = evaluate_constant(constants[i], *traj2);
      entry["rel_drift_h2"] = fine.rel_drift;
      report.order =
          drift_order(report.rel_drift, fine.rel_drift, h / *options.h2, kOrderFloor);
      if (report.order) {
        entry["order"] = *report.order;
        ok = ok && *report.order >= options.order_min;
      } else {
        entry["order"] = "round-off";
      }
    }
    entry["pass"] = ok;
    pass = pass && ok;
    outcome.human += "constant " + std::to_string(i + 1) + " (" +
                     to_string(constants[i].form) + "): rel drift " +
                     format_residual(report.rel_drift) + (ok ? " PASS" : " FAIL") + "\n";
    table.push_back(std::move(entry));
  }
  outcome.report["conservation"] = table;

  if (loaded.lifted) {
    ordered_json equivalence = ordered_json::array();
    for (std::size_t i = 0; i < loaded.symmetries.size(); ++i) {
      const double mismatch =
          equivalence_check(*loaded.lifted, loaded.symmetries[i], static_cast<int>(i), traj);
      // scale by the largest |C| of the optimal-control form
      BuildOptions lax;
      lax.enforce_symmetry = false;
      const MotionConstant oc = build_constant(*loaded.lifted, loaded.symmetries[i],
                                               ConstantForm::OptimalControl,
                                               static_cast<int>(i), lax);
      const ConservationReport r = evaluate_constant(oc, traj);
      double scale = 0.0;
      for (double c : r.series) scale = std::max(scale, std::abs(c));
      const double bound = kEquivalenceTol * (1.0 + scale);
      const bool ok = mismatch <= bound;
      ordered_json entry;
      entry["symmetry"] = i + 1;
      entry["max_mismatch"] = mismatch;
      entry["bound"] = bound;
      entry["pass"] = ok;
      equivalence.push_back(std::move(entry));
      pass = pass && ok;
      outcome.human += "equivalence " + std::to_string(i + 1) + ": " +
                       format_residual(mismatch) + (ok ? " PASS" : " FAIL") + "\n";
    }
    outcome.report["equivalence"] = equivalence;
  }

  outcome.report["pass"] = pass;
  outcome.exit_code = pass ? 0 : 1;
  outcome.human += std::string("verdict: ") + (pass ? "PASS" : "FAIL") + "\n";
  return outcome;
}

}  // namespace noct::cli
