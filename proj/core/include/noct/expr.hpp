#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace noct {

/// Kinds of scalar variables an expression may reference. StateDot and
/// ControlDot are formal derivative slots: StateDot carries the q̇ that
/// appears in invariance residuals, ControlDot carries the extra derivative
/// a second-order force may reference (resolved only along trajectories).
enum class VarKind : std::uint8_t { Time, State, Control, Costate, StateDot, ControlDot };

struct VarId {
  VarKind kind = VarKind::Time;
  int index = 0;  // zero-based; ignored for Time

  friend auto operator<=>(const VarId&, const VarId&) = default;

  static VarId time() { return {VarKind::Time, 0}; }
  static VarId state(int i) { return {VarKind::State, i}; }
  static VarId control(int j) { return {VarKind::Control, j}; }
  static VarId costate(int i) { return {VarKind::Costate, i}; }
  static VarId state_dot(int i) { return {VarKind::StateDot, i}; }
  static VarId control_dot(int j) { return {VarKind::ControlDot, j}; }
};

std::string to_string(const VarId& id);

/// Point at which an expression is evaluated. The qdot/udot slots are only
/// needed when the expression mentions the corresponding formal variables.
struct Env {
  double t = 0.0;
  std::vector<double> q;
  std::vector<double> u;
  std::vector<double> p;
  std::optional<std::vector<double>> qdot;
  std::optional<std::vector<double>> udot;
};

enum class Fn : std::uint8_t { Sin, Cos, Exp, Ln, Sqrt };

enum class NodeKind : std::uint8_t {
  Constant,
  Variable,
  Negate,
  Sum,      // k >= 2 children
  Product,  // k >= 2 children
  Quotient,
  Power,  // child ^ numeric exponent
  Apply,
};

/// Immutable symbolic scalar expression. Value type over a shared tree;
/// cheap to copy and safe to share between threads.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(double value);
  static Expr variable(VarId id);
  static Expr time() { return variable(VarId::time()); }
  static Expr state(int i) { return variable(VarId::state(i)); }
  static Expr control(int j) { return variable(VarId::control(j)); }
  static Expr costate(int i) { return variable(VarId::costate(i)); }
  static Expr state_dot(int i) { return variable(VarId::state_dot(i)); }
  static Expr control_dot(int j) { return variable(VarId::control_dot(j)); }

  /// Evaluates the tree at `env`. Deterministic: the same expression and
  /// environment always produce the bit-identical value.
  double eval(const Env& env) const;

  /// Exact symbolic partial derivative with respect to `id`.
  Expr diff(VarId id) const;

  /// Light normalization: constant folding, flattening, 0/1 identities,
  /// shallow distribution of products over sums, and collection of
  /// syntactically identical terms. Evaluation-equivalent to the input on
  /// every environment where the input evaluates.
  Expr simplified() const;

  NodeKind kind() const;
  /// Constant value / power exponent / variable id of this node.
  double number() const;
  VarId var() const;
  Fn fn() const;
  const std::vector<Expr>& children() const;

  bool is_constant() const { return kind() == NodeKind::Constant; }
  bool is_constant(double value) const;

  void collect_vars(std::set<VarId>& out) const;
  std::set<VarId> vars() const;
  bool contains_kind(VarKind kind) const;
  std::size_t node_count() const;

  /// Structural total order (used for canonical sorting and term collection).
  static int compare(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend Expr operator+(const Expr&, const Expr&);
  friend Expr operator-(const Expr&, const Expr&);
  friend Expr operator*(const Expr&, const Expr&);
  friend Expr operator/(const Expr&, const Expr&);
  friend Expr operator-(const Expr&);
  friend Expr pow(const Expr& base, double exponent);
  friend Expr apply(Fn fn, const Expr& arg);
  friend Expr make_sum(std::vector<Expr> terms);
  friend Expr make_product(std::vector<Expr> factors);
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, double exponent);
Expr apply(Fn fn, const Expr& arg);
Expr sin(const Expr& arg);
Expr cos(const Expr& arg);
Expr exp(const Expr& arg);
Expr ln(const Expr& arg);
Expr sqrt(const Expr& arg);

/// n-ary builders; flatten and fold like the binary operators.
Expr make_sum(std::vector<Expr> terms);
Expr make_product(std::vector<Expr> factors);

/// Infix rendering in the input grammar (with `qdot<i>`/`qdddot` for the
/// formal derivative slots). Numbers are printed with the shortest
/// round-tripping representation.
std::string to_string(const Expr& e);

}  // namespace noct
