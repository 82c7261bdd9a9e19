#pragma once

#include <memory>
#include <string>

namespace sdewalk {

// Tiny arithmetic expression language for user-supplied coefficients.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-'* power
//   power   := primary ('^' unary)?
//   primary := number | 't' | 'x' | ('exp'|'log'|'tanh') '(' expr ')' | '(' expr ')'
//
// Parsing happens once; evaluation is a plain tree walk.  Unknown names and
// syntax errors raise ConfigError with the offending position.
class Expr {
  public:
    struct Node;

    Expr() = default;

    double operator()(double t, double x) const;
    bool uses_time() const { return uses_time_; }
    const std::string& source() const { return source_; }
    bool valid() const { return root_ != nullptr; }

    friend Expr parse_expression(const std::string& text);

  private:
    std::shared_ptr<const Node> root_;
    bool uses_time_ = false;
    std::string source_;
};

Expr parse_expression(const std::string& text);

}  // namespace sdewalk
