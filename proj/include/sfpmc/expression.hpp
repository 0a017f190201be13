#pragma once

#include <memory>
#include <string>

namespace sfpmc {

/// Arithmetic expression over the variables x, y and t.
///
/// Grammar: numbers, pi, e, + - * / ^ (right associative), unary minus,
/// parentheses and the functions sin, cos, tan, exp, log, sqrt, abs.
/// Parse errors throw ParameterError with the column of the offending token.
class Expression {
 public:
  Expression() = default;
  explicit Expression(const std::string& text);

  double operator()(double x, double y, double t = 0.0) const;
  const std::string& text() const { return text_; }
  /// True when the expression does not reference any variable.
  bool is_constant() const;

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace sfpmc
