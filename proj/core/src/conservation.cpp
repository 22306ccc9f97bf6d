#include "noct/conservation.hpp"

#include <algorithm>
#include <cmath>

namespace noct {

const char* to_string(ConstantForm form) {
  switch (form) {
    case ConstantForm::OptimalControl: return "optimal_control";
    case ConstantForm::Conservative: return "conservative";
    case ConstantForm::FirstOrderCV: return "first_order_cv";
    case ConstantForm::SecondOrderCV: return "second_order_cv";
  }
  return "?";
}

namespace {

Expr oc_symbolic(const OCProblem& prob, const Generators& gen) {
  std::vector<Expr> terms;
  terms.push_back(hamiltonian(prob) * gen.tau);
  for (int i = 0; i < prob.n; ++i)
    terms.push_back(-(Expr::costate(i) * gen.xi[static_cast<std::size_t>(i)]));
  terms.push_back(-gen.gauge);
  return make_sum(std::move(terms)).simplified();
}

Expr cv1_symbolic(const LiftedProblem& lifted, const Generators& gen) {
  const OCProblem& prob = lifted.problem;
  const Expr& L = prob.lagrangian;
  std::vector<Expr> inner{L};
  for (int i = 0; i < prob.n; ++i)
    inner.push_back(-(Expr::control(i) * L.diff(VarId::control(i))));
  std::vector<Expr> terms;
  terms.push_back(gen.tau * make_sum(std::move(inner)));
  for (int i = 0; i < prob.n; ++i)
    terms.push_back(L.diff(VarId::control(i)) * gen.xi[static_cast<std::size_t>(i)]);
  terms.push_back(gen.gauge);
  return make_sum(std::move(terms)).simplified();
}

Expr cv2_symbolic(const LiftedProblem& lifted, const Generators& gen) {
  const SecondOrderParts parts = second_order_parts(lifted);
  const Expr& L = lifted.problem.lagrangian;
  // q̇ and q̈ read as the lifted coordinates q2 and u1.
  const Expr qdot = Expr::state(1);
  const Expr qddot = Expr::control(0);
  std::vector<Expr> terms;
  terms.push_back(L * gen.tau);
  terms.push_back(parts.p1 * (gen.xi[0] - qdot * gen.tau));
  terms.push_back(parts.L_u * (gen.xi[1] - qddot * gen.tau));
  terms.push_back(gen.gauge);
  return make_sum(std::move(terms)).simplified();
}

MotionConstant assemble(const OCProblem& prob, const LiftedProblem* lifted,
                        const Generators& gen, ConstantForm form, int f_index,
                        const BuildOptions& options) {
  prob.validate();
  gen.validate(prob.n, prob.m);
  MotionConstant constant;
  constant.form = form;
  constant.generators = gen;

  const InvarianceVerdict verdict =
      check_invariance(prob, gen, options.tol, options.seed);
  if (!verdict.invariant) {
    if (options.enforce_symmetry)
      throw NotASymmetryError("generators fail the invariance condition (residual " +
                                  std::to_string(verdict.residual_max) + ")",
                              verdict);
    constant.verified = false;
  }

  switch (form) {
    case ConstantForm::OptimalControl:
      constant.symbolic = oc_symbolic(prob, gen);
      constant.f_index = f_index;
      constant.f_sign = 1.0;
      break;
    case ConstantForm::Conservative:
      constant.symbolic = oc_symbolic(prob, gen);
      constant.f_index = -1;
      constant.f_sign = 0.0;
      break;
    case ConstantForm::FirstOrderCV:
      if (!lifted || lifted->order != CvOrder::First)
        throw ValidationError("the first-order CV form needs a first-order lifted problem");
      constant.symbolic = cv1_symbolic(*lifted, gen);
      constant.f_index = f_index;
      constant.f_sign = -1.0;
      break;
    case ConstantForm::SecondOrderCV:
      if (!lifted || lifted->order != CvOrder::Second)
        throw ValidationError("the second-order CV form needs a second-order lifted problem");
      constant.symbolic = cv2_symbolic(*lifted, gen);
      constant.f_index = f_index;
      constant.f_sign = -1.0;
      break;
  }
  if (constant.f_sign != 0.0 && f_index < 0)
    throw ValidationError("this form consumes an f column; provide its index");
  return constant;
}

}  // namespace

MotionConstant build_constant(const OCProblem& prob, const Generators& gen, ConstantForm form,
                              int f_index, const BuildOptions& options) {
  if (form == ConstantForm::FirstOrderCV || form == ConstantForm::SecondOrderCV)
    throw ValidationError("CV forms need the lifted problem overload");
  return assemble(prob, nullptr, gen, form, f_index, options);
}

MotionConstant build_constant(const LiftedProblem& lifted, const Generators& gen,
                              ConstantForm form, int f_index, const BuildOptions& options) {
  return assemble(lifted.problem, &lifted, gen, form, f_index, options);
}

ConservationReport evaluate_constant(const MotionConstant& constant, const Trajectory& traj) {
  if (traj.size() == 0) throw ValidationError("trajectory is empty");
  if (constant.form == ConstantForm::SecondOrderCV && !traj.has_second_order_cache())
    throw MissingDerivativeCacheError(
        "the second-order form needs the q̈/q⃛ cache of a fourth-order trajectory");
  if (constant.f_sign != 0.0 &&
      (constant.f_index < 0 || static_cast<std::size_t>(constant.f_index) >= traj.f_columns()))
    throw ValidationError("trajectory does not carry the f column bound by this constant");

  ConservationReport report;
  report.series.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Env env = traj.env_at(k);
    double c = constant.symbolic.eval(env);
    if (constant.f_sign != 0.0)
      c += constant.f_sign * traj.f[k][static_cast<std::size_t>(constant.f_index)];
    report.series.push_back(c);
  }
  report.reference = report.series.front();
  for (double c : report.series)
    report.max_abs_drift = std::max(report.max_abs_drift, std::abs(c - report.reference));
  report.rel_drift = report.max_abs_drift / (1.0 + std::abs(report.reference));
  return report;
}

std::optional<double> drift_order(double coarse_rel_drift, double fine_rel_drift,
                                  double step_ratio, double floor) {
  if (!(step_ratio > 1.0)) throw ValidationError("step ratio must exceed 1");
  if (coarse_rel_drift <= floor && fine_rel_drift <= floor) return std::nullopt;
  const double fine = std::max(fine_rel_drift, 1e-300);
  return std::log(coarse_rel_drift / fine) / std::log(step_ratio);
}

double equivalence_check(const LiftedProblem& lifted, const Generators& gen, int f_index,
                         const Trajectory& traj) {
  BuildOptions options;
  options.enforce_symmetry = false;
  const ConstantForm cv_form =
      lifted.order == CvOrder::First ? ConstantForm::FirstOrderCV : ConstantForm::SecondOrderCV;
  const MotionConstant cv = build_constant(lifted, gen, cv_form, f_index, options);
  const MotionConstant oc =
      build_constant(lifted, gen, ConstantForm::OptimalControl, f_index, options);
  const ConservationReport cv_report = evaluate_constant(cv, traj);
  const ConservationReport oc_report = evaluate_constant(oc, traj);
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k)
    worst = std::max(worst, std::abs(cv_report.series[k] + oc_report.series[k]));
  return worst;
}

}  // namespace noct
