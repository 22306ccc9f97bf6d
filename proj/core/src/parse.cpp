#include "noct/parse.hpp"

#include <cctype>
#include <charconv>
#include <string>

#include "noct/errors.hpp"

namespace noct {

namespace {

class Parser {
 public:
  Parser(std::string_view text, int n, int m, const ParseOptions& options)
      : text_(text), n_(n), m_(m), options_(options) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int n_;
  int m_;
  ParseOptions options_;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!consume(c)) throw SyntaxError(std::string("expected '") + c + "' " + what, pos_);
  }

  Expr parse_expr() {
    std::vector<Expr> terms;
    terms.push_back(parse_term());
    while (true) {
      if (consume('+')) {
        terms.push_back(parse_term());
      } else if (consume('-')) {
        terms.push_back(-parse_term());
      } else {
        break;
      }
    }
    return make_sum(std::move(terms));
  }

  Expr parse_term() {
    Expr acc = parse_factor();
    while (true) {
      if (consume('*')) {
        acc = acc * parse_factor();
      } else if (consume('/')) {
        const std::size_t at = pos_;
        Expr den = parse_factor();
        if (den.is_constant(0.0)) throw SyntaxError("division by the constant zero", at);
        acc = acc / den;
      } else {
        break;
      }
    }
    return acc;
  }

  Expr parse_factor() {
    Expr base = parse_base();
    if (consume('^')) {
      const bool negative = consume('-');
      skip_ws();
      const double e = parse_number();
      return pow(base, negative ? -e : e);
    }
    return base;
  }

  Expr parse_base() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return -parse_base();
    }
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')', "to close parenthesis");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return Expr::constant(parse_number());
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    if (c == '\0') throw SyntaxError("unexpected end of input", pos_);
    throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
  }

  double parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_ + 1;
      if (mark < text_.size() && (text_[mark] == '+' || text_[mark] == '-')) ++mark;
      if (mark < text_.size() && std::isdigit(static_cast<unsigned char>(text_[mark]))) {
        pos_ = mark;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    if (pos_ == start) throw SyntaxError("expected a number", pos_);
    double value = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc()) throw SyntaxError("malformed number", start);
    return value;
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    std::size_t digits_start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string digits(text_.substr(digits_start, pos_ - digits_start));

    if (digits.empty() && (name == "sin" || name == "cos" || name == "exp" || name == "ln" ||
                           name == "sqrt")) {
      expect('(', ("after function '" + name + "'").c_str());
      Expr arg = parse_expr();
      expect(')', "to close function argument");
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      if (name == "exp") return exp(arg);
      if (name == "ln") return ln(arg);
      return sqrt(arg);
    }

    if (name == "t" && digits.empty()) return Expr::time();
    if (options_.allow_qdddot && name == "qdddot" && digits.empty())
      return Expr::control_dot(0);

    if ((name == "q" || name == "u" || name == "p") && !digits.empty()) {
      int idx = 0;
      const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
      if (res.ec != std::errc())
        throw SyntaxError("malformed variable index", digits_start);
      if (idx < 1)
        throw IndexOutOfRangeError("variable indices are 1-based", start);
      const int limit = name == "u" ? m_ : n_;
      if (idx > limit)
        throw IndexOutOfRangeError("variable '" + name + digits + "' exceeds dimension " +
                                       std::to_string(limit),
                                   start);
      if (name == "q") return Expr::state(idx - 1);
      if (name == "u") return Expr::control(idx - 1);
      return Expr::costate(idx - 1);
    }

    throw UnknownVariableError("unknown identifier '" + name + digits + "'", start);
  }
};

}  // namespace

Expr parse(std::string_view text, int state_dim, int control_dim, const ParseOptions& options) {
  if (state_dim < 0 || control_dim < 0)
    throw ValidationError("dimensions must be non-negative");
  return Parser(text, state_dim, control_dim, options).run();
}

}  // namespace noct
