#pragma once

#include <cctype>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

/// Compiled arithmetic expression over the plane coordinates (x, y).
/// Grammar: + - * / ^ (right-associative), unary minus, parentheses,
/// numeric literals, the constant pi, and sin, cos, exp, abs, min, max.
class Expression {
public:
  static Expression parse(const std::string& text) {
    Parser parser{text, 0};
    Expression e;
    e.text_ = text;
    e.root_ = parser.parse_sum(e.nodes_);
    parser.skip_ws();
    if (parser.pos != text.size())
      throw config_error("expression '" + text + "': unexpected input at position " +
                         std::to_string(parser.pos));
    return e;
  }

  double operator()(double x, double y) const { return eval(root_, x, y); }

  const std::string& text() const { return text_; }

private:
  enum class Op { Literal, X, Y, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Abs, Min, Max };

  struct Node {
    Op op;
    double value = 0.0;
    int a = -1;
    int b = -1;
  };

  std::vector<Node> nodes_;
  int root_ = -1;
  std::string text_;

  double eval(int n, double x, double y) const {
    const Node& node = nodes_[n];
    switch (node.op) {
      case Op::Literal: return node.value;
      case Op::X: return x;
      case Op::Y: return y;
      case Op::Add: return eval(node.a, x, y) + eval(node.b, x, y);
      case Op::Sub: return eval(node.a, x, y) - eval(node.b, x, y);
      case Op::Mul: return eval(node.a, x, y) * eval(node.b, x, y);
      case Op::Div: return eval(node.a, x, y) / eval(node.b, x, y);
      case Op::Pow: return std::pow(eval(node.a, x, y), eval(node.b, x, y));
      case Op::Neg: return -eval(node.a, x, y);
      case Op::Sin: return std::sin(eval(node.a, x, y));
      case Op::Cos: return std::cos(eval(node.a, x, y));
      case Op::Exp: return std::exp(eval(node.a, x, y));
      case Op::Abs: return std::abs(eval(node.a, x, y));
      case Op::Min: return std::min(eval(node.a, x, y), eval(node.b, x, y));
      case Op::Max: return std::max(eval(node.a, x, y), eval(node.b, x, y));
    }
    return 0.0;
  }

  struct Parser {
    const std::string& text;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw config_error("expression '" + text + "': " + what + " at position " +
                         std::to_string(pos));
    }

    void skip_ws() {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool consume(char c) {
      skip_ws();
      if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    int push(std::vector<Node>& nodes, Node n) {
      nodes.push_back(n);
      return static_cast<int>(nodes.size()) - 1;
    }

    int parse_sum(std::vector<Node>& nodes) {
      int lhs = parse_product(nodes);
      for (;;) {
        if (consume('+'))
          lhs = push(nodes, {Op::Add, 0.0, lhs, parse_product(nodes)});
        else if (consume('-'))
          lhs = push(nodes, {Op::Sub, 0.0, lhs, parse_product(nodes)});
        else
          return lhs;
      }
    }

    int parse_product(std::vector<Node>& nodes) {
      int lhs = parse_unary(nodes);
      for (;;) {
        if (consume('*'))
          lhs = push(nodes, {Op::Mul, 0.0, lhs, parse_unary(nodes)});
        else if (consume('/'))
          lhs = push(nodes, {Op::Div, 0.0, lhs, parse_unary(nodes)});
        else
          return lhs;
      }
    }

    int parse_unary(std::vector<Node>& nodes) {
      if (consume('-')) return push(nodes, {Op::Neg, 0.0, parse_unary(nodes), -1});
      consume('+');
      return parse_power(nodes);
    }

    int parse_power(std::vector<Node>& nodes) {
      const int base = parse_primary(nodes);
      if (consume('^')) return push(nodes, {Op::Pow, 0.0, base, parse_unary(nodes)});
      return base;
    }

    int parse_primary(std::vector<Node>& nodes) {
      skip_ws();
      if (pos >= text.size()) fail("unexpected end of input");
      const char c = text[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number(nodes);
      if (std::isalpha(static_cast<unsigned char>(c))) return parse_name(nodes);
      if (consume('(')) {
        const int inner = parse_sum(nodes);
        if (!consume(')')) fail("missing ')'");
        return inner;
      }
      fail(std::string("unexpected character '") + c + "'");
    }

    int parse_number(std::vector<Node>& nodes) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(text.substr(pos), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos += used;
      return push(nodes, {Op::Literal, value, -1, -1});
    }

    int parse_name(std::vector<Node>& nodes) {
      const std::size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        ++pos;
      const std::string name = text.substr(start, pos - start);
      if (name == "x") return push(nodes, {Op::X, 0.0, -1, -1});
      if (name == "y") return push(nodes, {Op::Y, 0.0, -1, -1});
      if (name == "pi") return push(nodes, {Op::Literal, M_PI, -1, -1});

      Op op;
      bool binary = false;
      if (name == "sin")
        op = Op::Sin;
      else if (name == "cos")
        op = Op::Cos;
      else if (name == "exp")
        op = Op::Exp;
      else if (name == "abs")
        op = Op::Abs;
      else if (name == "min") {
        op = Op::Min;
        binary = true;
      } else if (name == "max") {
        op = Op::Max;
        binary = true;
      } else {
        pos = start;
        fail("unknown name '" + name + "'");
      }
      if (!consume('(')) fail("expected '(' after '" + name + "'");
      const int a = parse_sum(nodes);
      int b = -1;
      if (binary) {
        if (!consume(',')) fail("'" + name + "' takes two arguments");
        b = parse_sum(nodes);
      }
      if (!consume(')')) fail("missing ')'");
      return push(nodes, {op, 0.0, a, b});
    }
  };
};

} // namespace thinfilm
