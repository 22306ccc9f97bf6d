#pragma once

#include <string>
#include <string_view>

#include "noct/expr.hpp"

namespace noct {

struct ParseOptions {
  /// Accept the reserved `qdddot` token (third-derivative slot used by the
  /// force of second-order problems in lifted coordinates).
  bool allow_qdddot = false;
};

/// Parses an expression over t, q1..qn, u1..um, p1..pn.
///
/// Grammar:
///   expr     := term (('+'|'-') term)*
///   term     := factor (('*'|'/') factor)*
///   factor   := base ('^' exponent)?
///   exponent := ('-')? number
///   base     := number | var | fn '(' expr ')' | '(' expr ')' | '-' base
///   fn       := sin | cos | exp | ln | sqrt
///   var      := 't' | 'q'IDX | 'u'IDX | 'p'IDX        (IDX 1-based)
///
/// Unary minus binds tighter than '^': "-x^2" reads as (-x)^2.
/// Numeric parameters are literals; unknown identifiers are rejected.
Expr parse(std::string_view text, int state_dim, int control_dim,
           const ParseOptions& options = {});

}  // namespace noct
