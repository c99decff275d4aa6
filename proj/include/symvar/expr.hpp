/*
 Copyright 2026 The symvar authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <cctype>
#include <memory>

#include "symvar/core.hpp"

namespace symvar {

struct ExprParseError : Error {
  using Error::Error;
};

/// Tiny arithmetic expression: + - * / ^ (right assoc), unary minus,
/// parentheses, named variables bound at parse time, and the usual scalar
/// functions. Evaluation is reentrant and allocation-free.
class Expr {
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Node {
    enum Kind { Const, Var, Unary, Binary, Call } kind;
    double value = 0.0;                   // Const
    int var = -1;                         // Var
    char op = 0;                          // Unary/Binary
    double (*fn1)(double) = nullptr;      // Call, 1 arg
    double (*fn2)(double, double) = nullptr;  // Call, 2 args
    NodePtr a, b;
  };

 public:
  Expr() = default;

  static Expr parse(const std::string& src, const std::vector<std::string>& variables) {
    Parser p{src, variables};
    Expr e;
    e.root_ = p.expression();
    p.skip_ws();
    if (p.pos != src.size())
      throw ExprParseError("expression: trailing input at position " + std::to_string(p.pos));
    e.arity_ = variables.size();
    return e;
  }

  double eval(std::span<const double> vars) const {
    if (!root_) throw Error("Expr: empty");
    if (vars.size() < arity_) throw Error("Expr: too few variable values");
    return eval_node(*root_, vars);
  }

  bool empty() const { return !root_; }

 private:
  static double eval_node(const Node& n, std::span<const double> v) {
    switch (n.kind) {
      case Node::Const: return n.value;
      case Node::Var: return v[n.var];
      case Node::Unary: return -eval_node(*n.a, v);
      case Node::Binary: {
        const double l = eval_node(*n.a, v), r = eval_node(*n.b, v);
        switch (n.op) {
          case '+': return l + r;
          case '-': return l - r;
          case '*': return l * r;
          case '/': return l / r;
          default: return std::pow(l, r);
        }
      }
      case Node::Call:
        if (n.fn2) return n.fn2(eval_node(*n.a, v), eval_node(*n.b, v));
        return n.fn1(eval_node(*n.a, v));
    }
    return 0.0;
  }

  struct Parser {
    const std::string& s;
    const std::vector<std::string>& vars;
    std::size_t pos = 0;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    NodePtr expression() {
      NodePtr left = term();
      for (;;) {
        if (eat('+')) left = binary('+', left, term());
        else if (eat('-')) left = binary('-', left, term());
        else return left;
      }
    }
    NodePtr term() {
      NodePtr left = factor();
      for (;;) {
        if (eat('*')) left = binary('*', left, factor());
        else if (eat('/')) left = binary('/', left, factor());
        else return left;
      }
    }
    NodePtr factor() {
      // Unary minus binds looser than '^': -x^2 is -(x^2).
      if (eat('-')) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Unary;
        n->a = factor();
        return n;
      }
      if (eat('+')) return factor();
      NodePtr base = primary();
      if (eat('^')) return binary('^', base, factor());
      return base;
    }
    NodePtr primary() {
      skip_ws();
      if (pos >= s.size()) throw ExprParseError("expression: unexpected end of input");
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
      if (eat('(')) {
        NodePtr e = expression();
        if (!eat(')')) throw ExprParseError("expression: missing ')'");
        return e;
      }
      throw ExprParseError(std::string("expression: unexpected character '") + c + "'");
    }
    NodePtr number() {
      std::size_t used = 0;
      const double v = std::stod(s.substr(pos), &used);
      pos += used;
      auto n = std::make_shared<Node>();
      n->kind = Node::Const;
      n->value = v;
      return n;
    }
    NodePtr ident() {
      const std::size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      const std::string name = s.substr(start, pos - start);
      skip_ws();
      if (pos < s.size() && s[pos] == '(') {
        ++pos;
        NodePtr a = expression();
        NodePtr b;
        if (eat(',')) b = expression();
        if (!eat(')')) throw ExprParseError("expression: missing ')' after " + name);
        return call(name, a, b);
      }
      if (name == "pi") return constant(M_PI);
      if (name == "e") return constant(M_E);
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == name) {
          auto n = std::make_shared<Node>();
          n->kind = Node::Var;
          n->var = static_cast<int>(i);
          return n;
        }
      throw ExprParseError("expression: unknown identifier '" + name + "'");
    }
    static NodePtr constant(double v) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Const;
      n->value = v;
      return n;
    }
    static NodePtr binary(char op, NodePtr a, NodePtr b) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Binary;
      n->op = op;
      n->a = std::move(a);
      n->b = std::move(b);
      return n;
    }
    NodePtr call(const std::string& name, NodePtr a, NodePtr b) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Call;
      n->a = std::move(a);
      n->b = std::move(b);
      static const std::pair<const char*, double (*)(double)> fns1[] = {
          {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},
          {"exp", std::exp},   {"log", std::log},   {"sqrt", std::sqrt},
          {"abs", std::fabs},  {"tanh", std::tanh}, {"sinh", std::sinh},
          {"cosh", std::cosh}, {"asin", std::asin}, {"acos", std::acos},
          {"atan", std::atan}};
      static const std::pair<const char*, double (*)(double, double)> fns2[] = {
          {"pow", std::pow},
          {"min", [](double x, double y) { return x < y ? x : y; }},
          {"max", [](double x, double y) { return x > y ? x : y; }},
          {"atan2", std::atan2}};
      if (n->b) {
        for (const auto& [fname, fp] : fns2)
          if (name == fname) {
            n->fn2 = fp;
            return n;
          }
        throw ExprParseError("expression: unknown two-argument function '" + name + "'");
      }
      for (const auto& [fname, fp] : fns1)
        if (name == fname) {
          n->fn1 = fp;
          return n;
        }
      throw ExprParseError("expression: unknown function '" + name + "'");
    }
  };

  NodePtr root_;
  std::size_t arity_ = 0;
};

}  // namespace symvar
