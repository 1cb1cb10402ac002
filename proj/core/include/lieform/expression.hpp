#pragma once

#include <memory>
#include <string>

#include "lieform/types.hpp"

namespace lieform {

/// Small closed-form expression language for catalog parameters:
/// identifiers u, v; numeric literals; + - * / ^; exp, log, sin, cos, sqrt.
/// Supports exact symbolic differentiation, so catalog families get analytic
/// derivatives of user-supplied potentials.
class Expr {
 public:
  Expr();  // the zero expression

  static Expr parse(const std::string& text);  // throws Input on syntax errors
  static Expr number(double x);
  static Expr var_u();
  static Expr var_v();

  double eval(double u, double v) const;
  Expr diff(char var) const;  // var is 'u' or 'v'
  std::string str() const;

  Expr operator+(const Expr& o) const;
  Expr operator-(const Expr& o) const;
  Expr operator*(const Expr& o) const;
  Expr operator/(const Expr& o) const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace lieform
