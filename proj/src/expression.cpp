#include "sfpmc/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "sfpmc/errors.hpp"
#include "sfpmc/types.hpp"

namespace sfpmc {

struct Expression::Node {
  enum class Op { num, var_x, var_y, var_t, neg, add, sub, mul, div, pow, call } op;
  double value = 0.0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> a, b;

  double eval(double x, double y, double t) const {
    switch (op) {
      case Op::num: return value;
      case Op::var_x: return x;
      case Op::var_y: return y;
      case Op::var_t: return t;
      case Op::neg: return -a->eval(x, y, t);
      case Op::add: return a->eval(x, y, t) + b->eval(x, y, t);
      case Op::sub: return a->eval(x, y, t) - b->eval(x, y, t);
      case Op::mul: return a->eval(x, y, t) * b->eval(x, y, t);
      case Op::div: return a->eval(x, y, t) / b->eval(x, y, t);
      case Op::pow: return std::pow(a->eval(x, y, t), b->eval(x, y, t));
      case Op::call: return fn(a->eval(x, y, t));
    }
    return 0.0;
  }

  bool uses_variables() const {
    if (op == Op::var_x || op == Op::var_y || op == Op::var_t) return true;
    return (a && a->uses_variables()) || (b && b->uses_variables());
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

double f_sin(double v) { return std::sin(v); }
double f_cos(double v) { return std::cos(v); }
double f_tan(double v) { return std::tan(v); }
double f_exp(double v) { return std::exp(v); }
double f_log(double v) { return std::log(v); }
double f_sqrt(double v) { return std::sqrt(v); }
double f_abs(double v) { return std::abs(v); }

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParameterError("expression '" + s_ + "': " + what + " at column " + std::to_string(pos_ + 1));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = make(Op::add, n, term());
      else if (accept('-')) n = make(Op::sub, n, term());
      else return n;
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::mul, n, unary());
      else if (accept('/')) n = make(Op::div, n, unary());
      else return n;
    }
  }
  // Unary minus binds looser than ^, so -x^2 = -(x^2).
  NodePtr unary() {
    if (accept('-')) return make(Op::neg, unary());
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::pow, base, unary());
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::num;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "x") return make(Op::var_x);
      if (id == "y") return make(Op::var_y);
      if (id == "t") return make(Op::var_t);
      if (id == "pi" || id == "e") {
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::num;
        n->value = id == "pi" ? kPi : std::exp(1.0);
        return n;
      }
      static const std::vector<std::pair<const char*, double (*)(double)>> fns = {
          {"sin", f_sin}, {"cos", f_cos}, {"tan", f_tan}, {"exp", f_exp},
          {"log", f_log}, {"sqrt", f_sqrt}, {"abs", f_abs}};
      for (const auto& [name, fn] : fns) {
        if (id != name) continue;
        if (!accept('(')) fail("expected '(' after " + id);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::call;
        n->fn = fn;
        n->a = arg;
        return n;
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected character");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& text) : text_(text), root_(Parser(text).parse()) {}

double Expression::operator()(double x, double y, double t) const {
  if (!root_) throw ParameterError("empty expression");
  return root_->eval(x, y, t);
}

bool Expression::is_constant() const { return root_ && !root_->uses_variables(); }

}  // namespace sfpmc
