#include "lieform/fields.hpp"

#include <algorithm>
#include <cmath>

namespace lieform {

Grid::Grid(double u0_, double u1_, double v0_, double v1_, int nu_, int nv_)
    : u0(u0_), u1(u1_), v0(v0_), v1(v1_), nu(nu_), nv(nv_) {
  if (nu < 5 || nv < 5) fail(ErrorKind::Input, "grid: nu and nv must be >= 5");
  if (!(u1 > u0) || !(v1 > v0)) fail(ErrorKind::Input, "grid: empty parameter ranges");
}

bool Grid::same(const Grid& o, double tol) const {
  return nu == o.nu && nv == o.nv && std::abs(u0 - o.u0) < tol && std::abs(u1 - o.u1) < tol &&
         std::abs(v0 - o.v0) < tol && std::abs(v1 - o.v1) < tol;
}

Grid Grid::coarsened() const {
  if (nu % 2 == 0 || nv % 2 == 0)
    fail(ErrorKind::Input, "grid: coarsening requires odd node counts");
  return Grid(u0, u1, v0, v1, (nu + 1) / 2, (nv + 1) / 2);
}

ScalarField ScalarField::sampled(const Grid& g, const std::function<double(double, double)>& f) {
  ScalarField out(g);
  for (int iv = 0; iv < g.nv; ++iv)
    for (int iu = 0; iu < g.nu; ++iu) out.at(iu, iv) = f(g.u(iu), g.v(iv));
  out.exact = f;
  return out;
}

namespace {

ScalarField derivative(const ScalarField& f, bool along_u) {
  ScalarField out(f.grid);
  const Grid& g = f.grid;
  const double h = along_u ? g.hu() : g.hv();
  const int n = along_u ? g.nu : g.nv;
  auto val = [&](int i, int j) { return along_u ? f.at(i, j) : f.at(j, i); };
  auto set = [&](int i, int j, double x) {
    if (along_u)
      out.at(i, j) = x;
    else
      out.at(j, i) = x;
  };
  const int m = along_u ? g.nv : g.nu;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      double d;
      if (i == 0)
        d = (-3.0 * val(0, j) + 4.0 * val(1, j) - val(2, j)) / (2.0 * h);
      else if (i == n - 1)
        d = (3.0 * val(i, j) - 4.0 * val(i - 1, j) + val(i - 2, j)) / (2.0 * h);
      else
        d = (val(i + 1, j) - val(i - 1, j)) / (2.0 * h);
      set(i, j, d);
    }
  }
  return out;
}

}  // namespace

ScalarField d_du(const ScalarField& f) { return derivative(f, true); }
ScalarField d_dv(const ScalarField& f) { return derivative(f, false); }

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_interior(const ScalarField& f) {
  double m = 0.0;
  for (int iv = 1; iv < f.grid.nv - 1; ++iv)
    for (int iu = 1; iu < f.grid.nu - 1; ++iu) m = std::max(m, std::abs(f.at(iu, iv)));
  return m;
}

ScalarField zip(const ScalarField& a, const ScalarField& b,
                const std::function<double(double, double)>& op) {
  if (!a.grid.same(b.grid)) fail(ErrorKind::Input, "zip: grid mismatch");
  ScalarField out(a.grid);
  for (int i = 0; i < a.grid.size(); ++i) out.v[i] = op(a.v[i], b.v[i]);
  return out;
}

ScalarField map(const ScalarField& a, const std::function<double(double)>& op) {
  ScalarField out(a.grid);
  for (int i = 0; i < a.grid.size(); ++i) out.v[i] = op(a.v[i]);
  return out;
}

double real_cbrt(double x) { return std::cbrt(x); }

}  // namespace lieform
