#pragma once

// Arithmetic expressions for vector field components.
//
// Grammar:
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := '-' factor | primary
//   primary := number | variable | fn '(' expr ')' | '(' expr ')'
// Variables are x1, x2, ... up to the field dimension. Functions: sin, cos,
// exp. Errors carry the byte offset of the offending token.

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace cubcat {

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " at offset " + std::to_string(off)),
        offset(off) {}
};

struct FieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExprNode {
  enum class Op { Num, Var, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp };
  Op op{};
  double num = 0;
  int var = 0;  // 0-based axis index for Var
  int a = -1, b = -1;
};

class Program {
 public:
  std::vector<ExprNode> nodes;
  int root = -1;

  double eval(const double* x) const { return eval_node(root, x); }

  std::string print() const { return print_node(root); }

 private:
  double eval_node(int i, const double* x) const {
    const ExprNode& n = nodes[static_cast<std::size_t>(i)];
    using Op = ExprNode::Op;
    switch (n.op) {
      case Op::Num: return n.num;
      case Op::Var: return x[n.var];
      case Op::Add: return eval_node(n.a, x) + eval_node(n.b, x);
      case Op::Sub: return eval_node(n.a, x) - eval_node(n.b, x);
      case Op::Mul: return eval_node(n.a, x) * eval_node(n.b, x);
      case Op::Div: return eval_node(n.a, x) / eval_node(n.b, x);
      case Op::Neg: return -eval_node(n.a, x);
      case Op::Sin: return std::sin(eval_node(n.a, x));
      case Op::Cos: return std::cos(eval_node(n.a, x));
      case Op::Exp: return std::exp(eval_node(n.a, x));
    }
    return 0;
  }

  std::string print_node(int i) const {
    const ExprNode& n = nodes[static_cast<std::size_t>(i)];
    using Op = ExprNode::Op;
    switch (n.op) {
      case Op::Num: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", n.num);
        return buf;
      }
      case Op::Var: return "x" + std::to_string(n.var + 1);
      case Op::Add: return "(" + print_node(n.a) + " + " + print_node(n.b) + ")";
      case Op::Sub: return "(" + print_node(n.a) + " - " + print_node(n.b) + ")";
      case Op::Mul: return "(" + print_node(n.a) + " * " + print_node(n.b) + ")";
      case Op::Div: return "(" + print_node(n.a) + " / " + print_node(n.b) + ")";
      case Op::Neg: return "(-" + print_node(n.a) + ")";
      case Op::Sin: return "sin(" + print_node(n.a) + ")";
      case Op::Cos: return "cos(" + print_node(n.a) + ")";
      case Op::Exp: return "exp(" + print_node(n.a) + ")";
    }
    return "";
  }
};

namespace detail {

class ExprParser {
 public:
  ExprParser(const std::string& src, int dim) : s_(src), dim_(dim) {}

  Program run() {
    Program p;
    nodes_ = &p.nodes;
    p.root = parse_expr();
    skip_ws();
    if (pos_ < s_.size())
      throw ParseError("unexpected character '" + std::string(1, s_[pos_]) + "'",
                       pos_);
    nodes_ = nullptr;
    return p;
  }

 private:
  const std::string& s_;
  int dim_;
  std::size_t pos_ = 0;
  std::vector<ExprNode>* nodes_ = nullptr;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool eat(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  int add(ExprNode n) {
    nodes_->push_back(n);
    return static_cast<int>(nodes_->size()) - 1;
  }

  int parse_expr() {
    int left = parse_term();
    for (;;) {
      if (eat('+'))
        left = add({ExprNode::Op::Add, 0, 0, left, parse_term()});
      else if (eat('-'))
        left = add({ExprNode::Op::Sub, 0, 0, left, parse_term()});
      else
        return left;
    }
  }

  int parse_term() {
    int left = parse_factor();
    for (;;) {
      if (eat('*'))
        left = add({ExprNode::Op::Mul, 0, 0, left, parse_factor()});
      else if (eat('/'))
        left = add({ExprNode::Op::Div, 0, 0, left, parse_factor()});
      else
        return left;
    }
  }

  int parse_factor() {
    if (eat('-')) return add({ExprNode::Op::Neg, 0, 0, parse_factor(), -1});
    return parse_primary();
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("expected an operand", pos_);
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_ident();
    if (c == '(') {
      ++pos_;
      int e = parse_expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    throw ParseError("expected an operand", pos_);
  }

  int parse_number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() &&
               std::isdigit(static_cast<unsigned char>(s_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // 'e' belonged to something else
      }
    }
    if (pos_ == start || (pos_ == start + 1 && s_[start] == '.'))
      throw ParseError("malformed number", start);
    double v = std::strtod(s_.c_str() + start, nullptr);
    return add({ExprNode::Op::Num, v, 0, -1, -1});
  }

  int parse_ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string name = s_.substr(start, pos_ - start);
    if (name == "sin" || name == "cos" || name == "exp") {
      if (!eat('(')) throw ParseError("expected '(' after '" + name + "'", pos_);
      int arg = parse_expr();
      if (peek(','))
        throw ParseError("'" + name + "' takes a single argument", pos_);
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      ExprNode::Op op = name == "sin"   ? ExprNode::Op::Sin
                        : name == "cos" ? ExprNode::Op::Cos
                                        : ExprNode::Op::Exp;
      return add({op, 0, 0, arg, -1});
    }
    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      if (digits) {
        long idx = std::strtol(name.c_str() + 1, nullptr, 10);
        if (idx < 1 || idx > dim_)
          throw ParseError("unknown identifier '" + name + "' (dimension is " +
                               std::to_string(dim_) + ")",
                           start);
        return add({ExprNode::Op::Var, 0, static_cast<int>(idx) - 1, -1, -1});
      }
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }
};

}  // namespace detail

inline Program parse_component(const std::string& src, int dim) {
  return detail::ExprParser(src, dim).run();
}

struct VectorField {
  int dim = 0;
  std::vector<Program> comps;
  std::vector<std::string> sources;

  void eval(const double* x, double* out) const {
    for (int a = 0; a < dim; ++a) out[a] = comps[static_cast<std::size_t>(a)].eval(x);
  }
};

// One expression string per axis; component count must equal the dimension.
inline VectorField parse_field(const std::vector<std::string>& comps, int dim) {
  if (static_cast<int>(comps.size()) != dim)
    throw FieldError("field has " + std::to_string(comps.size()) +
                     " components but the dimension is " + std::to_string(dim));
  VectorField f;
  f.dim = dim;
  f.sources = comps;
  for (const auto& s : comps) f.comps.push_back(parse_component(s, dim));
  return f;
}

}  // namespace cubcat
