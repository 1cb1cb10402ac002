#include "lieform/expression.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace lieform {

namespace {
enum class Op { num, var_u, var_v, add, sub, mul, div, pow, neg, exp, log, sin, cos, sqrt };
}

struct Expr::Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_num(double x) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::num;
  n->value = x;
  return n;
}

bool is_num(const NodePtr& n, double x) { return n->op == Op::num && n->value == x; }

// light simplification keeps derivative trees small
NodePtr add(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  if (a->op == Op::num && b->op == Op::num) return make_num(a->value + b->value);
  return make(Op::add, std::move(a), std::move(b));
}
NodePtr sub(NodePtr a, NodePtr b) {
  if (is_num(b, 0.0)) return a;
  if (a->op == Op::num && b->op == Op::num) return make_num(a->value - b->value);
  if (is_num(a, 0.0)) return make(Op::neg, std::move(b));
  return make(Op::sub, std::move(a), std::move(b));
}
NodePtr mul(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0) || is_num(b, 0.0)) return make_num(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  if (a->op == Op::num && b->op == Op::num) return make_num(a->value * b->value);
  return make(Op::mul, std::move(a), std::move(b));
}
NodePtr divide(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0)) return make_num(0.0);
  if (is_num(b, 1.0)) return a;
  return make(Op::div, std::move(a), std::move(b));
}

double eval_node(const Expr::Node* n, double u, double v) {
  switch (n->op) {
    case Op::num: return n->value;
    case Op::var_u: return u;
    case Op::var_v: return v;
    case Op::add: return eval_node(n->a.get(), u, v) + eval_node(n->b.get(), u, v);
    case Op::sub: return eval_node(n->a.get(), u, v) - eval_node(n->b.get(), u, v);
    case Op::mul: return eval_node(n->a.get(), u, v) * eval_node(n->b.get(), u, v);
    case Op::div: return eval_node(n->a.get(), u, v) / eval_node(n->b.get(), u, v);
    case Op::pow: return std::pow(eval_node(n->a.get(), u, v), eval_node(n->b.get(), u, v));
    case Op::neg: return -eval_node(n->a.get(), u, v);
    case Op::exp: return std::exp(eval_node(n->a.get(), u, v));
    case Op::log: return std::log(eval_node(n->a.get(), u, v));
    case Op::sin: return std::sin(eval_node(n->a.get(), u, v));
    case Op::cos: return std::cos(eval_node(n->a.get(), u, v));
    case Op::sqrt: return std::sqrt(eval_node(n->a.get(), u, v));
  }
  return 0.0;
}

NodePtr diff_node(const NodePtr& n, char var) {
  switch (n->op) {
    case Op::num: return make_num(0.0);
    case Op::var_u: return make_num(var == 'u' ? 1.0 : 0.0);
    case Op::var_v: return make_num(var == 'v' ? 1.0 : 0.0);
    case Op::add: return add(diff_node(n->a, var), diff_node(n->b, var));
    case Op::sub: return sub(diff_node(n->a, var), diff_node(n->b, var));
    case Op::mul:
      return add(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var)));
    case Op::div:
      return divide(sub(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var))),
                    make(Op::mul, n->b, n->b));
    case Op::pow: {
      // general a^b: a^b (b' log a + b a'/a)
      NodePtr da = diff_node(n->a, var), db = diff_node(n->b, var);
      if (is_num(db, 0.0) && n->b->op == Op::num) {
        // a^c: c a^(c-1) a'
        NodePtr p = make(Op::pow, n->a, make_num(n->b->value - 1.0));
        return mul(make_num(n->b->value), mul(std::move(p), std::move(da)));
      }
      NodePtr t1 = mul(db, make(Op::log, n->a));
      NodePtr t2 = mul(n->b, divide(da, n->a));
      return mul(make(Op::pow, n->a, n->b), add(std::move(t1), std::move(t2)));
    }
    case Op::neg: return make(Op::neg, diff_node(n->a, var));
    case Op::exp: return mul(make(Op::exp, n->a), diff_node(n->a, var));
    case Op::log: return divide(diff_node(n->a, var), n->a);
    case Op::sin: return mul(make(Op::cos, n->a), diff_node(n->a, var));
    case Op::cos: return make(Op::neg, mul(make(Op::sin, n->a), diff_node(n->a, var)));
    case Op::sqrt:
      return divide(diff_node(n->a, var), mul(make_num(2.0), make(Op::sqrt, n->a)));
  }
  return make_num(0.0);
}

void print_node(const Expr::Node* n, std::ostream& os) {
  switch (n->op) {
    case Op::num: os << n->value; return;
    case Op::var_u: os << 'u'; return;
    case Op::var_v: os << 'v'; return;
    case Op::add: os << '('; print_node(n->a.get(), os); os << " + "; print_node(n->b.get(), os); os << ')'; return;
    case Op::sub: os << '('; print_node(n->a.get(), os); os << " - "; print_node(n->b.get(), os); os << ')'; return;
    case Op::mul: os << '('; print_node(n->a.get(), os); os << " * "; print_node(n->b.get(), os); os << ')'; return;
    case Op::div: os << '('; print_node(n->a.get(), os); os << " / "; print_node(n->b.get(), os); os << ')'; return;
    case Op::pow: os << '('; print_node(n->a.get(), os); os << " ^ "; print_node(n->b.get(), os); os << ')'; return;
    case Op::neg: os << "(-"; print_node(n->a.get(), os); os << ')'; return;
    case Op::exp: os << "exp("; print_node(n->a.get(), os); os << ')'; return;
    case Op::log: os << "log("; print_node(n->a.get(), os); os << ')'; return;
    case Op::sin: os << "sin("; print_node(n->a.get(), os); os << ')'; return;
    case Op::cos: os << "cos("; print_node(n->a.get(), os); os << ')'; return;
    case Op::sqrt: os << "sqrt("; print_node(n->a.get(), os); os << ')'; return;
  }
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size())
      fail(ErrorKind::Input, "expression: trailing input at position " + std::to_string(pos_));
    return e;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr e = term();
    while (true) {
      if (eat('+'))
        e = add(e, term());
      else if (eat('-'))
        e = sub(e, term());
      else
        return e;
    }
  }

  NodePtr term() {
    NodePtr e = unary();
    while (true) {
      if (eat('*'))
        e = mul(e, unary());
      else if (eat('/'))
        e = divide(e, unary());
      else
        return e;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Op::neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return make(Op::pow, std::move(base), unary());  // right-assoc
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail(ErrorKind::Input, "expression: unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double x = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      return make_num(x);
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail(ErrorKind::Input, "expression: missing ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (name == "u") return make(Op::var_u);
      if (name == "v") return make(Op::var_v);
      Op op;
      if (name == "exp")
        op = Op::exp;
      else if (name == "log")
        op = Op::log;
      else if (name == "sin")
        op = Op::sin;
      else if (name == "cos")
        op = Op::cos;
      else if (name == "sqrt")
        op = Op::sqrt;
      else
        fail(ErrorKind::Input, "expression: unknown identifier '" + name + "'");
      if (!eat('(')) fail(ErrorKind::Input, "expression: expected '(' after " + name);
      NodePtr arg = expr();
      if (!eat(')')) fail(ErrorKind::Input, "expression: missing ')'");
      return make(op, std::move(arg));
    }
    fail(ErrorKind::Input, std::string("expression: unexpected character '") + c + "'");
  }
};

}  // namespace

Expr::Expr() : node_(make_num(0.0)) {}

Expr Expr::parse(const std::string& text) { return Expr(Parser(text).run()); }
Expr Expr::number(double x) { return Expr(make_num(x)); }
Expr Expr::var_u() { return Expr(make(Op::var_u)); }
Expr Expr::var_v() { return Expr(make(Op::var_v)); }

double Expr::eval(double u, double v) const { return eval_node(node_.get(), u, v); }
Expr Expr::diff(char var) const { return Expr(diff_node(node_, var)); }

std::string Expr::str() const {
  std::ostringstream os;
  print_node(node_.get(), os);
  return os.str();
}

Expr Expr::operator+(const Expr& o) const { return Expr(add(node_, o.node_)); }
Expr Expr::operator-(const Expr& o) const { return Expr(sub(node_, o.node_)); }
Expr Expr::operator*(const Expr& o) const { return Expr(mul(node_, o.node_)); }
Expr Expr::operator/(const Expr& o) const { return Expr(divide(node_, o.node_)); }

}  // namespace lieform
