#include "subkernel/expr.hpp"

#include <cctype>
#include <cmath>
#include <vector>

namespace subkernel {

enum class NodeOp { constant, variable, add, sub, mul, div, pow, neg, exp_fn, log_fn };

struct Expression::Node {
  NodeOp op;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct Parser {
  const std::string& s;
  size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }

  NodePtr make(NodeOp op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    n->value = v;
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (eat('+'))
        lhs = make(NodeOp::add, lhs, term());
      else if (eat('-'))
        lhs = make(NodeOp::sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (eat('*'))
        lhs = make(NodeOp::mul, lhs, unary());
      else if (eat('/'))
        lhs = make(NodeOp::div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(NodeOp::neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  // right-associative
  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make(NodeOp::pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos >= s.size()) throw ConfigError("expression: unexpected end of input");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      NodePtr e = expr();
      if (!eat(')')) throw ConfigError("expression: missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ConfigError(std::string("expression: unexpected character '") + c + "'");
  }

  NodePtr number() {
    size_t start = pos;
    while (pos < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
            s[pos] == 'e' || s[pos] == 'E' ||
            ((s[pos] == '+' || s[pos] == '-') && pos > start &&
             (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
      ++pos;
    try {
      return make(NodeOp::constant, nullptr, nullptr, std::stod(s.substr(start, pos - start)));
    } catch (const std::exception&) {
      throw ConfigError("expression: bad number '" + s.substr(start, pos - start) + "'");
    }
  }

  NodePtr identifier() {
    size_t start = pos;
    while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
    std::string name = s.substr(start, pos - start);
    if (name == "t") return make(NodeOp::variable);
    if (name == "exp" || name == "log") {
      if (!eat('(')) throw ConfigError("expression: expected '(' after " + name);
      NodePtr arg = expr();
      if (!eat(')')) throw ConfigError("expression: missing ')'");
      return make(name == "exp" ? NodeOp::exp_fn : NodeOp::log_fn, arg);
    }
    throw ConfigError("expression: unknown identifier '" + name + "'");
  }
};

double eval_node(const Expression::Node& n, double t) {
  switch (n.op) {
    case NodeOp::constant: return n.value;
    case NodeOp::variable: return t;
    case NodeOp::add: return eval_node(*n.a, t) + eval_node(*n.b, t);
    case NodeOp::sub: return eval_node(*n.a, t) - eval_node(*n.b, t);
    case NodeOp::mul: return eval_node(*n.a, t) * eval_node(*n.b, t);
    case NodeOp::div: return eval_node(*n.a, t) / eval_node(*n.b, t);
    case NodeOp::pow: return std::pow(eval_node(*n.a, t), eval_node(*n.b, t));
    case NodeOp::neg: return -eval_node(*n.a, t);
    case NodeOp::exp_fn: return std::exp(eval_node(*n.a, t));
    case NodeOp::log_fn: return std::log(eval_node(*n.a, t));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p(text);
  Expression e;
  e.root_ = p.expr();
  p.skip();
  if (p.pos != text.size())
    throw ConfigError("expression: trailing input at position " + std::to_string(p.pos));
  e.text_ = text;
  return e;
}

double Expression::eval(double t) const {
  if (!root_) throw ConfigError("empty expression");
  return eval_node(*root_, t);
}

}  // namespace subkernel
