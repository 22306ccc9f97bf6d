#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noct/problem.hpp"
#include "noct/zero_test.hpp"

namespace noct {

/// Invariance defect of a generator set, split along the formal state
/// derivatives: the full residual is free_part + Σ qdot_coeff[i]·q̇_i and is
/// affine in q̇ because tau, xi and the gauge depend on (t, q) only.
struct Residual {
  Expr free_part;                // over (t, q, u, p)
  std::vector<Expr> qdot_coeff;  // n entries over (t, q, u, p)

  /// Recombines both parts with formal q̇ variables.
  Expr raw() const;
};

/// R = tau·∂H/∂t + xi·∂H/∂q + sigma·∂H/∂u + alpha·(∂H/∂p − q̇)
///     − ξ̇·p + τ̇·H − dΛ/dt,
/// with total derivatives expanded as ġ = ∂g/∂t + Σ ∂g/∂q_i·q̇_i.
Residual build_residual(const OCProblem& prob, const Generators& gen);

struct InvarianceVerdict {
  bool invariant = false;
  double residual_max = 0.0;            // max scaled |residual| seen over all components
  int failed_component = -2;            // -1: free part, i>=0: qdot coefficient i
  std::optional<ZeroWitness> witness;   // sample where the residual failed
};

/// Decides invariance by zero-testing the free part and every q̇ coefficient.
InvarianceVerdict check_invariance(const OCProblem& prob, const Generators& gen,
                                   double tol = 1e-9, std::uint64_t seed = kDefaultSeed,
                                   const SampleBox& box = {});

/// Polynomial ansatz degrees per generator component. tau, xi and the gauge
/// are polynomials in (t, q); sigma and alpha in (t, q, u, p). gauge=false
/// pins the gauge term to zero (exact symmetries).
struct AnsatzSpec {
  int tau_degree = 1;
  int xi_degree = 1;
  int sigma_degree = 1;
  int alpha_degree = 1;
  int gauge_degree = 1;
  bool gauge = false;

  static AnsatzSpec uniform(int degree, bool with_gauge = false);
};

/// Coefficient layout of the ansatz. Monomials are listed in graded
/// lexicographic order with variable precedence t, q1.., u1.., p1.., so
/// coefficient vectors are reproducible.
struct AnsatzLayout {
  struct Block {
    std::string component;  // "tau" | "xi" | "sigma" | "alpha" | "gauge"
    int component_index;    // entry within a vector component, 0 otherwise
    std::vector<VarId> variables;
    std::vector<std::vector<int>> monomials;  // exponent vectors
    int offset;
  };
  std::vector<Block> blocks;
  int size = 0;
  int state_dim = 0;
  int control_dim = 0;

  /// Position of a monomial coefficient, -1 if absent. `powers` lists
  /// (variable, exponent) pairs; omitted variables have exponent 0.
  int index_of(std::string_view component, int component_index,
               const std::vector<std::pair<VarId, int>>& powers) const;

  /// Builds the Generators value for a raw coefficient vector. Coefficients
  /// with magnitude below clean_tol * max|c| are dropped.
  Generators materialize(const std::vector<double>& coefficients,
                         double clean_tol = 1e-12) const;
};

AnsatzLayout ansatz_layout(const OCProblem& prob, const AnsatzSpec& spec);

/// Orthonormal basis of the symmetry space found for an ansatz, sign-fixed so
/// the first significant coefficient of each vector is positive. Every member
/// has been re-verified with check_invariance.
struct SymmetryBasis {
  AnsatzLayout layout;
  std::vector<std::vector<double>> vectors;
  std::vector<Generators> members;
  std::vector<double> singular_values;  // all singular values, descending

  int dimension() const { return static_cast<int>(vectors.size()); }
  /// Euclidean distance from `coefficients` to its projection onto the span.
  double projection_distance(const std::vector<double>& coefficients) const;
};

/// Samples the residual of the parametrized ansatz (linear in the unknown
/// coefficients) at max(2·unknowns, 128) points and returns the numerical
/// nullspace of the resulting system. Singular values below 1e-8·σ_max are
/// treated as zero. Throws VerificationFailedError if a nullspace vector
/// fails the symbolic re-check.
SymmetryBasis find_symmetries(const OCProblem& prob, const AnsatzSpec& spec, double tol = 1e-9,
                              std::uint64_t seed = kDefaultSeed);

}  // namespace noct
