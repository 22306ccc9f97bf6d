#include "noct/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <utility>

#include "noct/errors.hpp"

namespace noct {

struct Expr::Node {
  NodeKind kind = NodeKind::Constant;
  double number = 0.0;  // Constant value or Power exponent
  VarId var{};
  Fn fn = Fn::Sin;
  std::vector<Expr> kids;
};

namespace {

using Node = Expr::Node;

std::shared_ptr<const Node> make_node(Node n) {
  return std::make_shared<const Node>(std::move(n));
}

bool is_integral(double x) {
  return std::isfinite(x) && x == std::floor(x) && std::abs(x) <= 1e15;
}

double ipow(double base, long long e) {
  if (e < 0) {
    if (base == 0.0) throw DomainError("zero raised to a negative power");
    return 1.0 / ipow(base, -e);
  }
  double acc = 1.0;
  double b = base;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

double eval_power(double base, double exponent) {
  if (is_integral(exponent)) return ipow(base, static_cast<long long>(exponent));
  if (base <= 0.0) throw DomainError("non-integer power of a non-positive base");
  return std::pow(base, exponent);
}

double eval_fn(Fn fn, double x) {
  switch (fn) {
    case Fn::Sin: return std::sin(x);
    case Fn::Cos: return std::cos(x);
    case Fn::Exp: return std::exp(x);
    case Fn::Ln:
      if (x <= 0.0) throw DomainError("ln of a non-positive argument");
      return std::log(x);
    case Fn::Sqrt:
      if (x <= 0.0) throw DomainError("sqrt of a non-positive argument");
      return std::sqrt(x);
  }
  throw Error("unreachable function kind");
}

const char* fn_name(Fn fn) {
  switch (fn) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
    case Fn::Sqrt: return "sqrt";
  }
  return "?";
}

double lookup(const Env& env, const VarId& id) {
  auto fetch = [&](const std::vector<double>& v, const char* what) -> double {
    if (id.index < 0 || id.index >= static_cast<int>(v.size()))
      throw UnboundVariableError(std::string(what) + " index " +
                                 std::to_string(id.index + 1) + " not bound in environment");
    return v[static_cast<std::size_t>(id.index)];
  };
  switch (id.kind) {
    case VarKind::Time: return env.t;
    case VarKind::State: return fetch(env.q, "state");
    case VarKind::Control: return fetch(env.u, "control");
    case VarKind::Costate: return fetch(env.p, "costate");
    case VarKind::StateDot:
      if (!env.qdot) throw UnboundVariableError("state derivative slot requested but absent");
      return fetch(*env.qdot, "state derivative");
    case VarKind::ControlDot:
      if (!env.udot) throw UnboundVariableError("control derivative slot requested but absent");
      return fetch(*env.udot, "control derivative");
  }
  throw Error("unreachable variable kind");
}

double eval_node(const Node& n, const Env& env) {
  switch (n.kind) {
    case NodeKind::Constant: return n.number;
    case NodeKind::Variable: return lookup(env, n.var);
    case NodeKind::Negate: return -n.kids[0].eval(env);
    case NodeKind::Sum: {
      double acc = n.kids[0].eval(env);
      for (std::size_t i = 1; i < n.kids.size(); ++i) acc += n.kids[i].eval(env);
      return acc;
    }
    case NodeKind::Product: {
      double acc = n.kids[0].eval(env);
      for (std::size_t i = 1; i < n.kids.size(); ++i) acc *= n.kids[i].eval(env);
      return acc;
    }
    case NodeKind::Quotient: {
      const double den = n.kids[1].eval(env);
      if (den == 0.0) throw DomainError("division by zero");
      return n.kids[0].eval(env) / den;
    }
    case NodeKind::Power: return eval_power(n.kids[0].eval(env), n.number);
    case NodeKind::Apply: return eval_fn(n.fn, n.kids[0].eval(env));
  }
  throw Error("unreachable node kind");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

int kind_rank(NodeKind k) {
  switch (k) {
    case NodeKind::Constant: return 0;
    case NodeKind::Variable: return 1;
    case NodeKind::Apply: return 2;
    case NodeKind::Power: return 3;
    case NodeKind::Product: return 4;
    case NodeKind::Sum: return 5;
    case NodeKind::Quotient: return 6;
    case NodeKind::Negate: return 7;
  }
  return 8;
}

}  // namespace

Expr::Expr() {
  static const std::shared_ptr<const Node> zero =
      make_node(Node{NodeKind::Constant, 0.0, {}, Fn::Sin, {}});
  node_ = zero;
}

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw ValidationError("expression constants must be finite");
  return Expr(make_node(Node{NodeKind::Constant, value, {}, Fn::Sin, {}}));
}

Expr Expr::variable(VarId id) {
  if (id.index < 0) throw ValidationError("variable index must be non-negative");
  return Expr(make_node(Node{NodeKind::Variable, 0.0, id, Fn::Sin, {}}));
}

NodeKind Expr::kind() const { return node_->kind; }
double Expr::number() const { return node_->number; }
VarId Expr::var() const { return node_->var; }
Fn Expr::fn() const { return node_->fn; }
const std::vector<Expr>& Expr::children() const { return node_->kids; }

bool Expr::is_constant(double value) const {
  return node_->kind == NodeKind::Constant && node_->number == value;
}

double Expr::eval(const Env& env) const {
  const double v = eval_node(*node_, env);
  if (!std::isfinite(v)) throw DomainError("evaluation produced a non-finite value");
  return v;
}

void Expr::collect_vars(std::set<VarId>& out) const {
  if (node_->kind == NodeKind::Variable) out.insert(node_->var);
  for (const Expr& k : node_->kids) k.collect_vars(out);
}

std::set<VarId> Expr::vars() const {
  std::set<VarId> out;
  collect_vars(out);
  return out;
}

bool Expr::contains_kind(VarKind kind) const {
  if (node_->kind == NodeKind::Variable && node_->var.kind == kind) return true;
  for (const Expr& k : node_->kids)
    if (k.contains_kind(kind)) return true;
  return false;
}

std::size_t Expr::node_count() const {
  std::size_t total = 1;
  for (const Expr& k : node_->kids) total += k.node_count();
  return total;
}

int Expr::compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (kind_rank(x.kind) != kind_rank(y.kind))
    return kind_rank(x.kind) < kind_rank(y.kind) ? -1 : 1;
  switch (x.kind) {
    case NodeKind::Constant:
      if (x.number != y.number) return x.number < y.number ? -1 : 1;
      return 0;
    case NodeKind::Variable:
      if (x.var != y.var) return x.var < y.var ? -1 : 1;
      return 0;
    case NodeKind::Apply:
      if (x.fn != y.fn) return x.fn < y.fn ? -1 : 1;
      return compare(x.kids[0], y.kids[0]);
    case NodeKind::Power: {
      const int c = compare(x.kids[0], y.kids[0]);
      if (c != 0) return c;
      if (x.number != y.number) return x.number < y.number ? -1 : 1;
      return 0;
    }
    default: {
      const std::size_t n = std::min(x.kids.size(), y.kids.size());
      for (std::size_t i = 0; i < n; ++i) {
        const int c = compare(x.kids[i], y.kids[i]);
        if (c != 0) return c;
      }
      if (x.kids.size() != y.kids.size()) return x.kids.size() < y.kids.size() ? -1 : 1;
      if (x.number != y.number) return x.number < y.number ? -1 : 1;
      return 0;
    }
  }
}

// ---------------------------------------------------------------------------
// Construction with light folding

Expr make_sum(std::vector<Expr> terms) {
  std::vector<Expr> kids;
  double constant = 0.0;
  bool has_constant = false;
  for (Expr& t : terms) {
    if (t.kind() == NodeKind::Sum) {
      for (const Expr& k : t.children()) {
        if (k.is_constant()) {
          constant += k.number();
          has_constant = true;
        } else {
          kids.push_back(k);
        }
      }
    } else if (t.is_constant()) {
      constant += t.number();
      has_constant = true;
    } else {
      kids.push_back(std::move(t));
    }
  }
  if (has_constant && constant != 0.0) kids.push_back(Expr::constant(constant));
  if (kids.empty()) return Expr::constant(constant);
  if (kids.size() == 1) return kids[0];
  Expr::Node n;
  n.kind = NodeKind::Sum;
  n.kids = std::move(kids);
  return Expr(make_node(std::move(n)));
}

Expr make_product(std::vector<Expr> factors) {
  std::vector<Expr> kids;
  double constant = 1.0;
  for (Expr& f : factors) {
    if (f.kind() == NodeKind::Product) {
      for (const Expr& k : f.children()) {
        if (k.is_constant())
          constant *= k.number();
        else
          kids.push_back(k);
      }
    } else if (f.is_constant()) {
      constant *= f.number();
    } else {
      kids.push_back(std::move(f));
    }
  }
  if (constant == 0.0) return Expr::constant(0.0);
  if (constant != 1.0) kids.insert(kids.begin(), Expr::constant(constant));
  if (kids.empty()) return Expr::constant(1.0);
  if (kids.size() == 1) return kids[0];
  Expr::Node n;
  n.kind = NodeKind::Product;
  n.kids = std::move(kids);
  return Expr(make_node(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b) { return make_sum({a, b}); }

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.number());
  if (a.kind() == NodeKind::Negate) return a.children()[0];
  Expr::Node n;
  n.kind = NodeKind::Negate;
  n.kids = {a};
  return Expr(make_node(std::move(n)));
}

Expr operator-(const Expr& a, const Expr& b) { return make_sum({a, -b}); }

Expr operator*(const Expr& a, const Expr& b) { return make_product({a, b}); }

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) throw DomainError("division by the constant zero");
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0)) return a;
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.number() / b.number());
  Expr::Node n;
  n.kind = NodeKind::Quotient;
  n.kids = {a, b};
  return Expr(make_node(std::move(n)));
}

Expr pow(const Expr& base, double exponent) {
  if (!std::isfinite(exponent)) throw ValidationError("power exponent must be finite");
  if (exponent == 0.0) return Expr::constant(1.0);
  if (exponent == 1.0) return base;
  if (base.is_constant()) {
    try {
      return Expr::constant(eval_power(base.number(), exponent));
    } catch (const DomainError&) {
      // keep symbolic; evaluation will report the domain violation
    }
  }
  Expr::Node n;
  n.kind = NodeKind::Power;
  n.number = exponent;
  n.kids = {base};
  return Expr(make_node(std::move(n)));
}

Expr apply(Fn fn, const Expr& arg) {
  if (arg.is_constant()) {
    try {
      return Expr::constant(eval_fn(fn, arg.number()));
    } catch (const DomainError&) {
    }
  }
  Expr::Node n;
  n.kind = NodeKind::Apply;
  n.fn = fn;
  n.kids = {arg};
  return Expr(make_node(std::move(n)));
}

Expr sin(const Expr& arg) { return apply(Fn::Sin, arg); }
Expr cos(const Expr& arg) { return apply(Fn::Cos, arg); }
Expr exp(const Expr& arg) { return apply(Fn::Exp, arg); }
Expr ln(const Expr& arg) { return apply(Fn::Ln, arg); }
Expr sqrt(const Expr& arg) { return apply(Fn::Sqrt, arg); }

// ---------------------------------------------------------------------------
// Differentiation

Expr Expr::diff(VarId id) const {
  const Node& n = *node_;
  switch (n.kind) {
    case NodeKind::Constant: return Expr::constant(0.0);
    case NodeKind::Variable: return Expr::constant(n.var == id ? 1.0 : 0.0);
    case NodeKind::Negate: return -n.kids[0].diff(id);
    case NodeKind::Sum: {
      std::vector<Expr> parts;
      parts.reserve(n.kids.size());
      for (const Expr& k : n.kids) parts.push_back(k.diff(id));
      return make_sum(std::move(parts));
    }
    case NodeKind::Product: {
      std::vector<Expr> parts;
      parts.reserve(n.kids.size());
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        std::vector<Expr> factors = n.kids;
        factors[i] = n.kids[i].diff(id);
        parts.push_back(make_product(std::move(factors)));
      }
      return make_sum(std::move(parts));
    }
    case NodeKind::Quotient: {
      const Expr& num = n.kids[0];
      const Expr& den = n.kids[1];
      return (num.diff(id) * den - num * den.diff(id)) / pow(den, 2.0);
    }
    case NodeKind::Power: {
      const Expr& base = n.kids[0];
      return Expr::constant(n.number) * pow(base, n.number - 1.0) * base.diff(id);
    }
    case NodeKind::Apply: {
      const Expr& arg = n.kids[0];
      const Expr darg = arg.diff(id);
      switch (n.fn) {
        case Fn::Sin: return cos(arg) * darg;
        case Fn::Cos: return -(sin(arg) * darg);
        case Fn::Exp: return exp(arg) * darg;
        case Fn::Ln: return darg / arg;
        case Fn::Sqrt: return darg / (Expr::constant(2.0) * sqrt(arg));
      }
      throw Error("unreachable function kind");
    }
  }
  throw Error("unreachable node kind");
}

// ---------------------------------------------------------------------------
// Simplification: canonical sums of coefficient-weighted products.

namespace {

constexpr std::size_t kExpansionLimit = 128;

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return Expr::compare(a, b) < 0; }
};

Expr canon(const Expr& e);
Expr canon_sum(std::vector<Expr> kids);
Expr canon_product(std::vector<Expr> kids);

Expr canon_power(const Expr& base, double exponent) {
  if (exponent == 0.0) return Expr::constant(1.0);
  if (exponent == 1.0) return base;
  if (base.is_constant()) {
    try {
      return Expr::constant(eval_power(base.number(), exponent));
    } catch (const DomainError&) {
    }
  }
  if (base.kind() == NodeKind::Power) {
    const double inner = base.number();
    const bool inner_even = is_integral(inner) && std::fmod(inner, 2.0) == 0.0;
    // (x^a)^b = x^(a*b) except when a is even and b is not an integer
    // (that case would drop the absolute value).
    if (!(inner_even && !is_integral(exponent)))
      return canon_power(base.children()[0], inner * exponent);
  }
  if (base.kind() == NodeKind::Product && is_integral(exponent)) {
    std::vector<Expr> powered;
    powered.reserve(base.children().size());
    for (const Expr& f : base.children()) powered.push_back(canon_power(f, exponent));
    return canon_product(std::move(powered));
  }
  if (base.kind() == NodeKind::Sum && is_integral(exponent) && exponent > 1.0 &&
      exponent <= 8.0 &&
      std::pow(static_cast<double>(base.children().size()), exponent) <=
          static_cast<double>(kExpansionLimit)) {
    std::vector<Expr> copies(static_cast<std::size_t>(exponent), base);
    return canon_product(std::move(copies));
  }
  return pow(base, exponent);
}

// Splits a canonical term into (coefficient, remaining factors).
std::pair<double, Expr> split_coefficient(const Expr& term) {
  if (term.is_constant()) return {term.number(), Expr::constant(1.0)};
  if (term.kind() == NodeKind::Negate) {
    auto [c, core] = split_coefficient(term.children()[0]);
    return {-c, core};
  }
  if (term.kind() == NodeKind::Product && term.children()[0].is_constant()) {
    const auto& kids = term.children();
    std::vector<Expr> rest(kids.begin() + 1, kids.end());
    if (rest.size() == 1) return {kids[0].number(), rest[0]};
    return {kids[0].number(), make_product(std::move(rest))};
  }
  return {1.0, term};
}

Expr weighted(double coeff, const Expr& core) {
  if (coeff == 0.0) return Expr::constant(0.0);
  if (core.is_constant(1.0)) return Expr::constant(coeff);
  if (coeff == 1.0) return core;
  std::vector<Expr> kids;
  kids.push_back(Expr::constant(coeff));
  if (core.kind() == NodeKind::Product) {
    for (const Expr& k : core.children()) kids.push_back(k);
  } else {
    kids.push_back(core);
  }
  return make_product(std::move(kids));
}

Expr canon_sum(std::vector<Expr> kids) {
  // Flatten, then collect structurally identical cores.
  double constant = 0.0;
  std::map<Expr, double, ExprLess> terms;
  std::vector<Expr> stack(std::move(kids));
  for (std::size_t i = 0; i < stack.size(); ++i) {
    const Expr& k = stack[i];
    if (k.kind() == NodeKind::Sum) {
      for (const Expr& kk : k.children()) stack.push_back(kk);
      continue;
    }
    if (k.is_constant()) {
      constant += k.number();
      continue;
    }
    auto [c, core] = split_coefficient(k);
    terms[core] += c;
  }
  std::vector<Expr> out;
  if (constant != 0.0) out.push_back(Expr::constant(constant));
  for (const auto& [core, coeff] : terms) {
    if (coeff == 0.0) continue;
    out.push_back(weighted(coeff, core));
  }
  return make_sum(std::move(out));
}

Expr canon_product(std::vector<Expr> kids) {
  double coeff = 1.0;
  std::vector<std::pair<Expr, double>> bases;  // base -> exponent
  std::vector<Expr> sums;                      // degree-1 sum factors to distribute
  std::vector<Expr> stack(std::move(kids));
  for (std::size_t i = 0; i < stack.size(); ++i) {
    const Expr& k = stack[i];
    if (k.kind() == NodeKind::Product) {
      for (const Expr& kk : k.children()) stack.push_back(kk);
      continue;
    }
    if (k.is_constant()) {
      coeff *= k.number();
      continue;
    }
    if (k.kind() == NodeKind::Sum) {
      sums.push_back(k);
      continue;
    }
    if (k.kind() == NodeKind::Power)
      bases.emplace_back(k.children()[0], k.number());
    else
      bases.emplace_back(k, 1.0);
  }
  if (coeff == 0.0) return Expr::constant(0.0);

  // Merge repeated bases and sort.
  std::sort(bases.begin(), bases.end(), [](const auto& a, const auto& b) {
    const int c = Expr::compare(a.first, b.first);
    if (c != 0) return c < 0;
    return a.second < b.second;
  });
  std::vector<Expr> factors;
  for (std::size_t i = 0; i < bases.size();) {
    double total = bases[i].second;
    std::size_t j = i + 1;
    while (j < bases.size() && Expr::compare(bases[j].first, bases[i].first) == 0) {
      total += bases[j].second;
      ++j;
    }
    if (total != 0.0) {
      Expr f = total == 1.0 ? bases[i].first : pow(bases[i].first, total);
      factors.push_back(std::move(f));
    }
    i = j;
  }

  if (!sums.empty()) {
    std::size_t expanded_terms = 1;
    for (const Expr& s : sums) {
      expanded_terms *= s.children().size();
      if (expanded_terms > kExpansionLimit) break;
    }
    if (expanded_terms <= kExpansionLimit) {
      // Distribute the sum factors over the rest.
      std::vector<Expr> base_term;
      if (coeff != 1.0) base_term.push_back(Expr::constant(coeff));
      base_term.insert(base_term.end(), factors.begin(), factors.end());
      std::vector<std::vector<Expr>> partials = {base_term};
      for (const Expr& s : sums) {
        std::vector<std::vector<Expr>> next;
        next.reserve(partials.size() * s.children().size());
        for (const auto& partial : partials) {
          for (const Expr& term : s.children()) {
            auto factors_copy = partial;
            factors_copy.push_back(term);
            next.push_back(std::move(factors_copy));
          }
        }
        partials = std::move(next);
      }
      std::vector<Expr> expanded;
      expanded.reserve(partials.size());
      for (auto& fs : partials) expanded.push_back(canon_product(std::move(fs)));
      return canon_sum(std::move(expanded));
    }
    // Too large to distribute: keep the sums as opaque factors.
    factors.insert(factors.end(), sums.begin(), sums.end());
    std::sort(factors.begin(), factors.end(),
              [](const Expr& a, const Expr& b) { return Expr::compare(a, b) < 0; });
  }

  if (factors.empty()) return Expr::constant(coeff);
  std::vector<Expr> out;
  if (coeff != 1.0) out.push_back(Expr::constant(coeff));
  out.insert(out.end(), factors.begin(), factors.end());
  return make_product(std::move(out));
}

Expr canon(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Constant:
    case NodeKind::Variable:
      return e;
    case NodeKind::Negate:
      return canon_product({Expr::constant(-1.0), canon(e.children()[0])});
    case NodeKind::Sum: {
      std::vector<Expr> kids;
      kids.reserve(e.children().size());
      for (const Expr& k : e.children()) kids.push_back(canon(k));
      return canon_sum(std::move(kids));
    }
    case NodeKind::Product: {
      std::vector<Expr> kids;
      kids.reserve(e.children().size());
      for (const Expr& k : e.children()) kids.push_back(canon(k));
      return canon_product(std::move(kids));
    }
    case NodeKind::Quotient: {
      Expr num = canon(e.children()[0]);
      Expr den = canon(e.children()[1]);
      if (den.is_constant(0.0)) {
        // Simplifying the denominator to a literal zero would break the
        // quotient invariant; keep the original denominator.
        return num / e.children()[1];
      }
      return canon_product({num, canon_power(den, -1.0)});
    }
    case NodeKind::Power:
      return canon_power(canon(e.children()[0]), e.number());
    case NodeKind::Apply: {
      Expr arg = canon(e.children()[0]);
      return apply(e.fn(), arg);
    }
  }
  throw Error("unreachable node kind");
}

}  // namespace

Expr Expr::simplified() const { return canon(*this); }

// ---------------------------------------------------------------------------
// Printing

std::string to_string(const VarId& id) {
  switch (id.kind) {
    case VarKind::Time: return "t";
    case VarKind::State: return "q" + std::to_string(id.index + 1);
    case VarKind::Control: return "u" + std::to_string(id.index + 1);
    case VarKind::Costate: return "p" + std::to_string(id.index + 1);
    case VarKind::StateDot: return "qdot" + std::to_string(id.index + 1);
    case VarKind::ControlDot:
      return id.index == 0 ? "qdddot" : "udot" + std::to_string(id.index + 1);
  }
  return "?";
}

namespace {

// Precedence: sum 1, product/quotient 2, power 3, atoms 4.
std::string render(const Expr& e, int min_prec);

std::string render_sum(const Expr& e) {
  std::string out;
  bool first = true;
  for (const Expr& term : e.children()) {
    double coeff = 1.0;
    Expr body = term;
    if (term.kind() == NodeKind::Negate) {
      coeff = -1.0;
      body = term.children()[0];
    } else if (term.is_constant() && term.number() < 0.0) {
      coeff = -1.0;
      body = Expr::constant(-term.number());
    } else if (term.kind() == NodeKind::Product && term.children()[0].is_constant() &&
               term.children()[0].number() < 0.0) {
      coeff = -1.0;
      std::vector<Expr> kids = term.children();
      kids[0] = Expr::constant(-kids[0].number());
      if (kids[0].is_constant(1.0)) kids.erase(kids.begin());
      body = kids.size() == 1 ? kids[0] : make_product(std::move(kids));
    }
    if (first) {
      if (coeff < 0.0) out += "-";
      out += render(body, 2);
      first = false;
    } else {
      out += coeff < 0.0 ? " - " : " + ";
      out += render(body, 2);
    }
  }
  return out;
}

std::string render(const Expr& e, int min_prec) {
  std::string out;
  int prec = 4;
  switch (e.kind()) {
    case NodeKind::Constant: {
      out = format_double(e.number());
      if (e.number() < 0.0) prec = 0;
      break;
    }
    case NodeKind::Variable:
      out = to_string(e.var());
      break;
    case NodeKind::Negate:
      out = "-" + render(e.children()[0], 4);
      prec = 0;
      break;
    case NodeKind::Sum:
      out = render_sum(e);
      prec = 1;
      break;
    case NodeKind::Product: {
      bool first = true;
      for (const Expr& k : e.children()) {
        if (!first) out += "*";
        out += render(k, 3);
        first = false;
      }
      prec = 2;
      break;
    }
    case NodeKind::Quotient:
      out = render(e.children()[0], 3) + "/" + render(e.children()[1], 4);
      prec = 2;
      break;
    case NodeKind::Power: {
      const double ex = e.number();
      std::string exponent = is_integral(ex) ? std::to_string(static_cast<long long>(ex))
                                             : format_double(ex);
      out = render(e.children()[0], 4) + "^" + exponent;
      prec = 3;
      break;
    }
    case NodeKind::Apply:
      out = std::string(fn_name(e.fn())) + "(" + render(e.children()[0], 0) + ")";
      break;
  }
  if (prec < min_prec) return "(" + out + ")";
  return out;
}

}  // namespace

std::string to_string(const Expr& e) { return render(e, 0); }

}  // namespace noct
