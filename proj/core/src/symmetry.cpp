#include "noct/symmetry.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

#include "noct/errors.hpp"

namespace noct {

Expr Residual::raw() const {
  std::vector<Expr> terms;
  terms.push_back(free_part);
  for (std::size_t i = 0; i < qdot_coeff.size(); ++i)
    terms.push_back(qdot_coeff[i] * Expr::state_dot(static_cast<int>(i)));
  return make_sum(std::move(terms));
}

Residual build_residual(const OCProblem& prob, const Generators& gen) {
  prob.validate();
  gen.validate(prob.n, prob.m);
  const HamiltonianParts parts = hamiltonian_parts(prob);

  std::vector<Expr> free_terms;
  free_terms.push_back(gen.tau * parts.dt);
  for (int i = 0; i < prob.n; ++i)
    free_terms.push_back(gen.xi[static_cast<std::size_t>(i)] * parts.dq[static_cast<std::size_t>(i)]);
  for (int j = 0; j < prob.m; ++j)
    free_terms.push_back(gen.sigma[static_cast<std::size_t>(j)] *
                         parts.du[static_cast<std::size_t>(j)]);
  for (int i = 0; i < prob.n; ++i)
    free_terms.push_back(gen.alpha[static_cast<std::size_t>(i)] *
                         parts.dp[static_cast<std::size_t>(i)]);
  for (int i = 0; i < prob.n; ++i)
    free_terms.push_back(-(Expr::costate(i) * gen.xi[static_cast<std::size_t>(i)].diff(VarId::time())));
  free_terms.push_back(gen.tau.diff(VarId::time()) * parts.H);
  free_terms.push_back(-gen.gauge.diff(VarId::time()));

  Residual res;
  res.free_part = make_sum(std::move(free_terms)).simplified();
  for (int k = 0; k < prob.n; ++k) {
    std::vector<Expr> coeff_terms;
    coeff_terms.push_back(-gen.alpha[static_cast<std::size_t>(k)]);
    for (int i = 0; i < prob.n; ++i)
      coeff_terms.push_back(
          -(Expr::costate(i) * gen.xi[static_cast<std::size_t>(i)].diff(VarId::state(k))));
    coeff_terms.push_back(gen.tau.diff(VarId::state(k)) * parts.H);
    coeff_terms.push_back(-gen.gauge.diff(VarId::state(k)));
    res.qdot_coeff.push_back(make_sum(std::move(coeff_terms)).simplified());
  }
  return res;
}

InvarianceVerdict check_invariance(const OCProblem& prob, const Generators& gen, double tol,
                                   std::uint64_t seed, const SampleBox& box) {
  const Residual res = build_residual(prob, gen);
  ZeroTestOptions opts;
  opts.seed = seed;
  opts.state_dim = prob.n;
  opts.control_dim = prob.m;

  InvarianceVerdict verdict;
  ZeroCheck check = is_zero(res.free_part, box, tol, opts);
  verdict.residual_max = check.max_rel;
  if (!check.zero) {
    verdict.failed_component = -1;
    verdict.witness = std::move(check.witness);
    return verdict;
  }
  for (std::size_t i = 0; i < res.qdot_coeff.size(); ++i) {
    check = is_zero(res.qdot_coeff[i], box, tol, opts);
    verdict.residual_max = std::max(verdict.residual_max, check.max_rel);
    if (!check.zero) {
      verdict.failed_component = static_cast<int>(i);
      verdict.witness = std::move(check.witness);
      return verdict;
    }
  }
  verdict.invariant = true;
  return verdict;
}

// ---------------------------------------------------------------------------
// Polynomial ansatz

AnsatzSpec AnsatzSpec::uniform(int degree, bool with_gauge) {
  AnsatzSpec spec;
  spec.tau_degree = spec.xi_degree = spec.sigma_degree = spec.alpha_degree = degree;
  spec.gauge_degree = degree;
  spec.gauge = with_gauge;
  return spec;
}

namespace {

// All exponent vectors with total degree <= degree, graded lexicographic:
// lower total degree first, then lexicographically larger exponent vector
// first (variable precedence = position in `vars`).
std::vector<std::vector<int>> monomials_up_to(int nvars, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(static_cast<std::size_t>(nvars), 0);
  auto emit = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == nvars) {
      if (remaining == 0) out.push_back(current);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[static_cast<std::size_t>(pos)] = e;
      self(self, pos + 1, remaining - e);
    }
    current[static_cast<std::size_t>(pos)] = 0;
  };
  for (int total = 0; total <= degree; ++total) emit(emit, 0, total);
  return out;
}

Expr monomial_expr(const std::vector<VarId>& vars, const std::vector<int>& exponents) {
  std::vector<Expr> factors;
  factors.push_back(Expr::constant(1.0));
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (exponents[i] == 0) continue;
    factors.push_back(pow(Expr::variable(vars[i]), static_cast<double>(exponents[i])));
  }
  return make_product(std::move(factors));
}

std::vector<VarId> tq_vars(int n) {
  std::vector<VarId> vars{VarId::time()};
  for (int i = 0; i < n; ++i) vars.push_back(VarId::state(i));
  return vars;
}

std::vector<VarId> tqup_vars(int n, int m) {
  std::vector<VarId> vars = tq_vars(n);
  for (int j = 0; j < m; ++j) vars.push_back(VarId::control(j));
  for (int i = 0; i < n; ++i) vars.push_back(VarId::costate(i));
  return vars;
}

}  // namespace

AnsatzLayout ansatz_layout(const OCProblem& prob, const AnsatzSpec& spec) {
  if (spec.tau_degree < 0 || spec.xi_degree < 0 || spec.sigma_degree < 0 ||
      spec.alpha_degree < 0 || spec.gauge_degree < 0)
    throw ValidationError("ansatz degrees must be non-negative");
  AnsatzLayout layout;
  layout.state_dim = prob.n;
  layout.control_dim = prob.m;
  auto add_block = [&](std::string component, int index, std::vector<VarId> vars, int degree) {
    AnsatzLayout::Block block;
    block.component = std::move(component);
    block.component_index = index;
    block.variables = std::move(vars);
    block.monomials = monomials_up_to(static_cast<int>(block.variables.size()), degree);
    block.offset = layout.size;
    layout.size += static_cast<int>(block.monomials.size());
    layout.blocks.push_back(std::move(block));
  };
  add_block("tau", 0, tq_vars(prob.n), spec.tau_degree);
  for (int i = 0; i < prob.n; ++i) add_block("xi", i, tq_vars(prob.n), spec.xi_degree);
  for (int j = 0; j < prob.m; ++j)
    add_block("sigma", j, tqup_vars(prob.n, prob.m), spec.sigma_degree);
  for (int i = 0; i < prob.n; ++i)
    add_block("alpha", i, tqup_vars(prob.n, prob.m), spec.alpha_degree);
  if (spec.gauge) add_block("gauge", 0, tq_vars(prob.n), spec.gauge_degree);
  return layout;
}

int AnsatzLayout::index_of(std::string_view component, int component_index,
                           const std::vector<std::pair<VarId, int>>& powers) const {
  for (const Block& block : blocks) {
    if (block.component != component || block.component_index != component_index) continue;
    std::vector<int> target(block.variables.size(), 0);
    for (const auto& [var, exponent] : powers) {
      auto it = std::find(block.variables.begin(), block.variables.end(), var);
      if (it == block.variables.end()) return -1;
      target[static_cast<std::size_t>(it - block.variables.begin())] = exponent;
    }
    for (std::size_t k = 0; k < block.monomials.size(); ++k)
      if (block.monomials[k] == target) return block.offset + static_cast<int>(k);
    return -1;
  }
  return -1;
}

Generators AnsatzLayout::materialize(const std::vector<double>& coefficients,
                                     double clean_tol) const {
  if (static_cast<int>(coefficients.size()) != size)
    throw ValidationError("coefficient vector does not match the ansatz layout");
  double max_abs = 0.0;
  for (double c : coefficients) max_abs = std::max(max_abs, std::abs(c));
  const double cutoff = clean_tol * max_abs;

  Generators gen = Generators::zero(state_dim, control_dim);
  for (const Block& block : blocks) {
    std::vector<Expr> terms;
    for (std::size_t k = 0; k < block.monomials.size(); ++k) {
      const double c = coefficients[static_cast<std::size_t>(block.offset) + k];
      if (std::abs(c) <= cutoff) continue;
      terms.push_back(Expr::constant(c) * monomial_expr(block.variables, block.monomials[k]));
    }
    Expr value = make_sum(std::move(terms)).simplified();
    if (block.component == "tau")
      gen.tau = value;
    else if (block.component == "xi")
      gen.xi[static_cast<std::size_t>(block.component_index)] = value;
    else if (block.component == "sigma")
      gen.sigma[static_cast<std::size_t>(block.component_index)] = value;
    else if (block.component == "alpha")
      gen.alpha[static_cast<std::size_t>(block.component_index)] = value;
    else
      gen.gauge = value;
  }
  return gen;
}

double SymmetryBasis::projection_distance(const std::vector<double>& coefficients) const {
  if (static_cast<int>(coefficients.size()) != layout.size)
    throw ValidationError("coefficient vector does not match the ansatz layout");
  std::vector<double> rest = coefficients;
  for (const std::vector<double>& b : vectors) {
    double dot = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) dot += b[i] * coefficients[i];
    for (std::size_t i = 0; i < b.size(); ++i) rest[i] -= dot * b[i];
  }
  double norm2 = 0.0;
  for (double r : rest) norm2 += r * r;
  return std::sqrt(norm2);
}

SymmetryBasis find_symmetries(const OCProblem& prob, const AnsatzSpec& spec, double tol,
                              std::uint64_t seed) {
  prob.validate();
  constexpr int kMaxUnknowns = 512;
  AnsatzLayout layout = ansatz_layout(prob, spec);
  if (layout.size > kMaxUnknowns)
    throw AnsatzTooLargeError("ansatz has " + std::to_string(layout.size) +
                              " unknowns (limit " + std::to_string(kMaxUnknowns) + ")");
  if (layout.size == 0) throw ValidationError("ansatz has no unknowns");

  // Residual of each unit generator; the residual is linear in the ansatz
  // coefficients, so these span everything we need to sample.
  std::vector<Residual> unit_residuals;
  unit_residuals.reserve(static_cast<std::size_t>(layout.size));
  for (const AnsatzLayout::Block& block : layout.blocks) {
    for (const auto& exponents : block.monomials) {
      Generators unit = Generators::zero(prob.n, prob.m);
      Expr mono = monomial_expr(block.variables, exponents);
      if (block.component == "tau")
        unit.tau = mono;
      else if (block.component == "xi")
        unit.xi[static_cast<std::size_t>(block.component_index)] = mono;
      else if (block.component == "sigma")
        unit.sigma[static_cast<std::size_t>(block.component_index)] = mono;
      else if (block.component == "alpha")
        unit.alpha[static_cast<std::size_t>(block.component_index)] = mono;
      else
        unit.gauge = mono;
      unit_residuals.push_back(build_residual(prob, unit));
    }
  }

  const int equations_per_sample = prob.n + 1;
  const int samples = std::max(2 * layout.size, 128);
  const SampleBox box;
  std::mt19937_64 rng(seed);

  Eigen::MatrixXd system(static_cast<Eigen::Index>(samples) * equations_per_sample,
                         layout.size);
  for (int s = 0; s < samples; ++s) {
    Env env;
    env.q.resize(static_cast<std::size_t>(prob.n));
    env.u.resize(static_cast<std::size_t>(prob.m));
    env.p.resize(static_cast<std::size_t>(prob.n));
    auto draw = [&]() { return box.lo + uniform_unit(rng()) * (box.hi - box.lo); };
    env.t = draw();
    for (double& x : env.q) x = draw();
    for (double& x : env.u) x = draw();
    for (double& x : env.p) x = draw();
    for (int r = 0; r < layout.size; ++r) {
      const Residual& res = unit_residuals[static_cast<std::size_t>(r)];
      const Eigen::Index row0 = static_cast<Eigen::Index>(s) * equations_per_sample;
      system(row0, r) = res.free_part.eval(env);
      for (int i = 0; i < prob.n; ++i)
        system(row0 + 1 + i, r) = res.qdot_coeff[static_cast<std::size_t>(i)].eval(env);
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(system, Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  constexpr double kRankTol = 1e-8;

  SymmetryBasis basis;
  basis.layout = layout;
  basis.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma_max > 0.0 && sigma(k) >= kRankTol * sigma_max) continue;
    std::vector<double> v(static_cast<std::size_t>(layout.size));
    for (int i = 0; i < layout.size; ++i) v[static_cast<std::size_t>(i)] = svd.matrixV()(i, k);
    // Sign convention: first significant coefficient positive.
    double max_abs = 0.0;
    for (double x : v) max_abs = std::max(max_abs, std::abs(x));
    for (double x : v) {
      if (std::abs(x) > 1e-10 * max_abs) {
        if (x < 0.0)
          for (double& y : v) y = -y;
        break;
      }
    }
    basis.vectors.push_back(std::move(v));
  }

  for (std::size_t k = 0; k < basis.vectors.size(); ++k) {
    Generators gen = layout.materialize(basis.vectors[k]);
    const InvarianceVerdict verdict = check_invariance(prob, gen, tol, seed);
    if (!verdict.invariant)
      throw VerificationFailedError(
          "nullspace vector " + std::to_string(k) + " failed re-verification (residual " +
          std::to_string(verdict.residual_max) + ")");
    basis.members.push_back(std::move(gen));
  }
  return basis;
}

}  // namespace noct
