#include "kintegra/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace kintegra {

struct Expr::Node {
  enum class Op { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Sqrt };
  Op op;
  double number = 0.0;
  int var = 0;       // 1-based
  int exponent = 0;  // Pow only
  std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;
using Op = Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

double ipow(double base, int e) {
  unsigned k = e < 0 ? static_cast<unsigned>(-(static_cast<long long>(e)))
                     : static_cast<unsigned>(e);
  double r = 1.0, b = base;
  while (k) {
    if (k & 1u) r *= b;
    b *= b;
    k >>= 1;
  }
  return e < 0 ? 1.0 / r : r;
}

double eval_node(const Node& n, std::span<const double> x) {
  switch (n.op) {
    case Op::Number: return n.number;
    case Op::Var:
      if (n.var > static_cast<int>(x.size()))
        throw std::invalid_argument("Expr::eval: variable x" + std::to_string(n.var) +
                                    " exceeds the provided coordinate count");
      return x[n.var - 1];
    case Op::Neg: return -eval_node(*n.a, x);
    case Op::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Op::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Op::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Op::Div: return eval_node(*n.a, x) / eval_node(*n.b, x);
    case Op::Pow: return ipow(eval_node(*n.a, x), n.exponent);
    case Op::Sin: return std::sin(eval_node(*n.a, x));
    case Op::Cos: return std::cos(eval_node(*n.a, x));
    case Op::Exp: return std::exp(eval_node(*n.a, x));
    case Op::Log: return std::log(eval_node(*n.a, x));
    case Op::Sqrt: return std::sqrt(eval_node(*n.a, x));
  }
  return 0.0;
}

int max_var(const Node& n) {
  int m = n.op == Op::Var ? n.var : 0;
  if (n.a) m = std::max(m, max_var(*n.a));
  if (n.b) m = std::max(m, max_var(*n.b));
  return m;
}

bool trees_equal(const Node* a, const Node* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op || a->number != b->number || a->var != b->var ||
      a->exponent != b->exponent)
    return false;
  return trees_equal(a->a.get(), b->a.get()) && trees_equal(a->b.get(), b->b.get());
}

// precedence: add/sub 1, mul/div 2, neg 3, pow 4, atoms 5
int prec(const Node& n) {
  switch (n.op) {
    case Op::Add: case Op::Sub: return 1;
    case Op::Mul: case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

void print_node(const Node& n, int min_prec, std::string& out) {
  const bool wrap = prec(n) < min_prec;
  if (wrap) out += '(';
  switch (n.op) {
    case Op::Number: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      out += buf;
      break;
    }
    case Op::Var: out += 'x'; out += std::to_string(n.var); break;
    case Op::Neg: out += '-'; print_node(*n.a, 3, out); break;
    case Op::Add: print_node(*n.a, 1, out); out += " + "; print_node(*n.b, 2, out); break;
    case Op::Sub: print_node(*n.a, 1, out); out += " - "; print_node(*n.b, 2, out); break;
    case Op::Mul: print_node(*n.a, 2, out); out += '*'; print_node(*n.b, 3, out); break;
    case Op::Div: print_node(*n.a, 2, out); out += '/'; print_node(*n.b, 3, out); break;
    case Op::Pow:
      print_node(*n.a, 5, out);
      out += '^';
      out += std::to_string(n.exponent);
      break;
    case Op::Sin: out += "sin("; print_node(*n.a, 0, out); out += ')'; break;
    case Op::Cos: out += "cos("; print_node(*n.a, 0, out); out += ')'; break;
    case Op::Exp: out += "exp("; print_node(*n.a, 0, out); out += ')'; break;
    case Op::Log: out += "log("; print_node(*n.a, 0, out); out += ')'; break;
    case Op::Sqrt: out += "sqrt("; print_node(*n.a, 0, out); out += ')'; break;
  }
  if (wrap) out += ')';
}

}  // namespace

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ < src_.size())
      throw ParseError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_);
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool at(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }
  bool eat(char c) {
    if (!at(c)) return false;
    ++pos_;
    return true;
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      if (eat('+')) {
        auto n = make(Op::Add, e, parse_term());
        e = n;
      } else if (eat('-')) {
        auto n = make(Op::Sub, e, parse_term());
        e = n;
      } else {
        return e;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_unary();
    for (;;) {
      if (eat('*')) {
        e = make(Op::Mul, e, parse_unary());
      } else if (eat('/')) {
        e = make(Op::Div, e, parse_unary());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_unary() {
    if (eat('-')) return make(Op::Neg, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (!eat('^')) return base;
    auto n = std::make_shared<Node>();
    n->op = Op::Pow;
    n->a = base;
    n->exponent = parse_int_exponent();
    return n;
  }

  int parse_int_exponent() {
    skip_ws();
    const std::size_t start = pos_;
    bool neg = false;
    if (pos_ < src_.size() && src_[pos_] == '-') {
      neg = true;
      ++pos_;
    }
    std::size_t digits = pos_;
    while (digits < src_.size() && std::isdigit(static_cast<unsigned char>(src_[digits]))) ++digits;
    if (digits == pos_) throw ParseError("exponent must be an integer literal", start);
    if (digits < src_.size() && (src_[digits] == '.' || src_[digits] == 'e' || src_[digits] == 'E'))
      throw ParseError("exponent must be an integer literal", start);
    int value = 0;
    auto [p, ec] = std::from_chars(src_.data() + pos_, src_.data() + digits, value);
    if (ec != std::errc())
      throw ParseError("exponent out of range", start);
    pos_ = digits;
    return neg ? -value : value;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("expected expression", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '.'))
      ++end;
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
      std::size_t d = e;
      while (d < src_.size() && std::isdigit(static_cast<unsigned char>(src_[d]))) ++d;
      if (d > e) end = d;
    }
    double value = 0.0;
    auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + end, value);
    if (ec != std::errc() || p != src_.data() + end)
      throw ParseError("malformed number", start);
    pos_ = end;
    auto n = std::make_shared<Node>();
    n->op = Op::Number;
    n->number = value;
    return n;
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
      ++end;
    const std::string_view name = src_.substr(start, end - start);
    pos_ = end;
    if (name.size() >= 2 && name[0] == 'x') {
      bool all_digits = true;
      for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) all_digits = false;
      if (all_digits) {
        int idx = 0;
        std::from_chars(name.data() + 1, name.data() + name.size(), idx);
        if (idx < 1) throw ParseError("variable indices are 1-based", start);
        auto n = std::make_shared<Node>();
        n->op = Op::Var;
        n->var = idx;
        return n;
      }
    }
    Op op;
    if (name == "sin") op = Op::Sin;
    else if (name == "cos") op = Op::Cos;
    else if (name == "exp") op = Op::Exp;
    else if (name == "log") op = Op::Log;
    else if (name == "sqrt") op = Op::Sqrt;
    else throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    if (!eat('(')) throw ParseError("expected '(' after function name", pos_);
    NodePtr arg = parse_expr();
    if (!eat(')')) throw ParseError("expected ')'", pos_);
    return make(op, std::move(arg));
  }
};

Expr Expr::parse(std::string_view src) {
  ExprParser p(src);
  return Expr(p.run());
}

double Expr::eval(std::span<const double> vars) const {
  if (!root_) throw std::logic_error("Expr::eval on an empty expression");
  return eval_node(*root_, vars);
}

std::string Expr::str() const {
  if (!root_) return "";
  std::string out;
  print_node(*root_, 0, out);
  return out;
}

bool Expr::same_tree(const Expr& o) const { return trees_equal(root_.get(), o.root_.get()); }

int Expr::max_var_index() const { return root_ ? max_var(*root_) : 0; }

}  // namespace kintegra
