#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "lieform/types.hpp"

namespace lieform {

/// Uniform rectangular parameter grid. Node (iu, iv) sits at
/// (u0 + iu*hu, v0 + iv*hv); storage order is row-major in u (u fastest).
struct Grid {
  double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
  int nu = 0, nv = 0;

  Grid() = default;
  Grid(double u0_, double u1_, double v0_, double v1_, int nu_, int nv_);

  double hu() const { return (u1 - u0) / (nu - 1); }
  double hv() const { return (v1 - v0) / (nv - 1); }
  double u(int iu) const { return u0 + iu * hu(); }
  double v(int iv) const { return v0 + iv * hv(); }
  int size() const { return nu * nv; }
  int idx(int iu, int iv) const { return iv * nu + iu; }
  bool interior(int iu, int iv) const { return iu > 0 && iu < nu - 1 && iv > 0 && iv < nv - 1; }
  bool same(const Grid& o, double tol = 1e-12) const;

  /// Grid with every second node dropped (requires odd nu, nv).
  Grid coarsened() const;
};

struct ScalarField {
  Grid grid;
  std::vector<double> v;
  /// Optional closed-form reference, carried by catalog constructors so
  /// convergence tests have exact values to compare against.
  std::optional<std::function<double(double, double)>> exact;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}

  double& at(int iu, int iv) { return v[grid.idx(iu, iv)]; }
  double at(int iu, int iv) const { return v[grid.idx(iu, iv)]; }

  static ScalarField sampled(const Grid& g, const std::function<double(double, double)>& f);
  static ScalarField constant(const Grid& g, double c) { return ScalarField(g, c); }
};

ScalarField d_du(const ScalarField& f);
ScalarField d_dv(const ScalarField& f);
double max_abs(const ScalarField& f);
double max_abs_interior(const ScalarField& f);

ScalarField zip(const ScalarField& a, const ScalarField& b,
                const std::function<double(double, double)>& op);
ScalarField map(const ScalarField& a, const std::function<double(double)>& op);

/// Sign-preserving real cube root.
double real_cbrt(double x);

/// Generic per-node fields of fixed-size values (frames, matrix-valued forms).
template <class T>
struct NodeField {
  Grid grid;
  std::vector<T> v;

  NodeField() = default;
  explicit NodeField(const Grid& g) : grid(g), v(g.size()) {}
  NodeField(const Grid& g, const T& fill) : grid(g), v(g.size(), fill) {}

  T& at(int iu, int iv) { return v[grid.idx(iu, iv)]; }
  const T& at(int iu, int iv) const { return v[grid.idx(iu, iv)]; }
};

/// Second-order finite differences on node fields (central inside,
/// one-sided three-point at the boundary).
template <class T>
NodeField<T> d_du(const NodeField<T>& f) {
  NodeField<T> out(f.grid);
  const double h = f.grid.hu();
  for (int iv = 0; iv < f.grid.nv; ++iv) {
    for (int iu = 0; iu < f.grid.nu; ++iu) {
      if (iu == 0)
        out.at(iu, iv) = (-3.0 * f.at(0, iv) + 4.0 * f.at(1, iv) - f.at(2, iv)) / (2.0 * h);
      else if (iu == f.grid.nu - 1)
        out.at(iu, iv) =
            (3.0 * f.at(iu, iv) - 4.0 * f.at(iu - 1, iv) + f.at(iu - 2, iv)) / (2.0 * h);
      else
        out.at(iu, iv) = (f.at(iu + 1, iv) - f.at(iu - 1, iv)) / (2.0 * h);
    }
  }
  return out;
}

template <class T>
NodeField<T> d_dv(const NodeField<T>& f) {
  NodeField<T> out(f.grid);
  const double h = f.grid.hv();
  for (int iv = 0; iv < f.grid.nv; ++iv) {
    for (int iu = 0; iu < f.grid.nu; ++iu) {
      if (iv == 0)
        out.at(iu, iv) = (-3.0 * f.at(iu, 0) + 4.0 * f.at(iu, 1) - f.at(iu, 2)) / (2.0 * h);
      else if (iv == f.grid.nv - 1)
        out.at(iu, iv) =
            (3.0 * f.at(iu, iv) - 4.0 * f.at(iu, iv - 1) + f.at(iu, iv - 2)) / (2.0 * h);
      else
        out.at(iu, iv) = (f.at(iu, iv + 1) - f.at(iu, iv - 1)) / (2.0 * h);
    }
  }
  return out;
}

/// Cubic Lagrange interpolation at fractional index s (in node units) along a
/// sampled line. Used to feed Runge-Kutta midpoints; O(h^4) accurate.
template <class T>
T interp_line(const std::vector<T>& line, double s) {
  const int n = static_cast<int>(line.size());
  int j = static_cast<int>(std::floor(s));
  int lo = std::clamp(j - 1, 0, n - 4);
  double x = s - lo;
  // Lagrange weights for nodes lo..lo+3 at offset x in [0,3]
  double w0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
  double w1 = x * (x - 2.0) * (x - 3.0) / 2.0;
  double w2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
  double w3 = x * (x - 1.0) * (x - 2.0) / 6.0;
  return w0 * line[lo] + w1 * line[lo + 1] + w2 * line[lo + 2] + w3 * line[lo + 3];
}

}  // namespace lieform
