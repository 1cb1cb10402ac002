#include "lieform/catalog.hpp"

#include <cmath>
#include <sstream>

#include "lieform/transport.hpp"

namespace lieform::catalog {

SurfacePatch enneper(const Grid& g) {
  for (int iu = 0; iu < g.nu; ++iu)
    if (std::abs(g.u(iu)) < 1e-9)
      fail(ErrorKind::Input, "enneper: grid touches the axis u = 0 (degenerate there)");
  for (int iv = 0; iv < g.nv; ++iv)
    if (std::abs(g.v(iv)) < 1e-9)
      fail(ErrorKind::Input, "enneper: grid touches the axis v = 0 (degenerate there)");
  return SurfacePatch::analytic(g, [](double u, double v) {
    SurfaceJet j;
    j.F << u - u * u * u / 3.0 + u * v * v, -v + v * v * v / 3.0 - u * u * v, v * v - u * u;
    j.Fu << 1.0 - u * u + v * v, -2.0 * u * v, -2.0 * u;
    j.Fv << 2.0 * u * v, -1.0 + v * v - u * u, 2.0 * v;
    j.Fuu << -2.0 * u, -2.0 * v, -2.0;
    j.Fuv << 2.0 * v, -2.0 * u, 0.0;
    j.Fvv << 2.0 * u, 2.0 * v, 2.0;
    j.Fuuu << -2.0, 0.0, 0.0;
    j.Fuuv << 0.0, -2.0, 0.0;
    j.Fuvv << 2.0, 0.0, 0.0;
    j.Fvvv << 0.0, 2.0, 0.0;
    return j;
  });
}

SurfacePatch torus(double R, double r, const Grid& g) {
  if (!(R > r && r > 0.0)) fail(ErrorKind::Input, "torus: need R > r > 0");
  return SurfacePatch::analytic(g, [R, r](double u, double v) {
    double cu = std::cos(u), su = std::sin(u), cv = std::cos(v), sv = std::sin(v);
    double rho = R + r * cu;
    SurfaceJet j;
    j.F << rho * cv, rho * sv, r * su;
    j.Fu << -r * su * cv, -r * su * sv, r * cu;
    j.Fv << -rho * sv, rho * cv, 0.0;
    j.Fuu << -r * cu * cv, -r * cu * sv, -r * su;
    j.Fuv << r * su * sv, -r * su * cv, 0.0;
    j.Fvv << -rho * cv, -rho * sv, 0.0;
    j.Fuuu << r * su * cv, r * su * sv, -r * cu;
    j.Fuuv << r * cu * sv, -r * cu * cv, 0.0;
    j.Fuvv << r * su * cv, r * su * sv, 0.0;
    j.Fvvv << rho * sv, -rho * cv, 0.0;
    return j;
  });
}

SurfacePatch sphere(double R, const Grid& g) {
  return SurfacePatch::analytic(g, [R](double u, double v) {
    double cu = std::cos(u), su = std::sin(u), cv = std::cos(v), sv = std::sin(v);
    SurfaceJet j;
    j.F << R * cu * cv, R * cu * sv, R * su;
    j.Fu << -R * su * cv, -R * su * sv, R * cu;
    j.Fv << -R * cu * sv, R * cu * cv, 0.0;
    j.Fuu << -R * cu * cv, -R * cu * sv, -R * su;
    j.Fuv << R * su * sv, -R * su * cv, 0.0;
    j.Fvv << -R * cu * cv, -R * cu * sv, 0.0;
    j.Fuuu << R * su * cv, R * su * sv, -R * cu;
    j.Fuuv << R * cu * sv, -R * cu * cv, 0.0;
    j.Fuvv << R * su * cv, R * su * sv, 0.0;
    j.Fvvv << R * cu * sv, -R * cu * cv, 0.0;
    return j;
  });
}

SurfacePatch plane(const Grid& g) {
  return SurfacePatch::analytic(g, [](double u, double v) {
    SurfaceJet j{};
    j.F << u, v, 0.0;
    j.Fu << 1.0, 0.0, 0.0;
    j.Fv << 0.0, 1.0, 0.0;
    j.Fuu.setZero();
    j.Fuv.setZero();
    j.Fvv.setZero();
    j.Fuuu.setZero();
    j.Fuuv.setZero();
    j.Fuvv.setZero();
    j.Fvvv.setZero();
    return j;
  });
}

SurfacePatch revolution(const Expr& rho, const Expr& z, const Grid& g) {
  Expr r1 = rho.diff('v'), r2 = r1.diff('v'), r3 = r2.diff('v');
  Expr z1 = z.diff('v'), z2 = z1.diff('v'), z3 = z2.diff('v');
  return SurfacePatch::analytic(g, [=](double u, double v) {
    double cu = std::cos(u), su = std::sin(u);
    double p = rho.eval(0, v), p1 = r1.eval(0, v), p2 = r2.eval(0, v), p3 = r3.eval(0, v);
    double h1 = z1.eval(0, v), h2 = z2.eval(0, v), h3 = z3.eval(0, v);
    SurfaceJet j;
    j.F << p * cu, p * su, z.eval(0, v);
    j.Fu << -p * su, p * cu, 0.0;
    j.Fv << p1 * cu, p1 * su, h1;
    j.Fuu << -p * cu, -p * su, 0.0;
    j.Fuv << -p1 * su, p1 * cu, 0.0;
    j.Fvv << p2 * cu, p2 * su, h2;
    j.Fuuu << p * su, -p * cu, 0.0;
    j.Fuuv << -p1 * cu, -p1 * su, 0.0;
    j.Fuvv << -p2 * su, p2 * cu, 0.0;
    j.Fvvv << p3 * cu, p3 * su, h3;
    return j;
  });
}

SurfacePatch revolution(const std::string& profile, const Grid& g) {
  if (profile == "catenary")
    return revolution(Expr::parse("(exp(v) + exp(-v))/2"), Expr::parse("v"), g);
  if (profile == "parabola") return revolution(Expr::parse("v"), Expr::parse("v*v/2"), g);
  if (profile == "cylinder") return revolution(Expr::parse("1"), Expr::parse("v"), g);
  fail(ErrorKind::Input, "revolution: unknown profile '" + profile + "'");
}

// --------------------------------------------------------------- conformal

namespace {

struct PsiFields {
  ScalarField pu, pv;  // first derivatives of psi, exact
};

PsiFields psi_derivatives(const Expr& psi, const Grid& g) {
  Expr du = psi.diff('u'), dv = psi.diff('v');
  return {ScalarField::sampled(g, [&](double u, double v) { return du.eval(u, v); }),
          ScalarField::sampled(g, [&](double u, double v) { return dv.eval(u, v); })};
}

void require_nondegenerate(const PsiFields& d, const char* who) {
  for (size_t i = 0; i < d.pu.v.size(); ++i)
    if (std::abs(d.pu.v[i] * d.pv.v[i]) < 1e-12)
      fail(ErrorKind::Degenerate, std::string(who) + ": psi_u psi_v vanishes on the grid");
}

}  // namespace

Coframe isothermic_coframe(const IsothermicSpec& spec, const Grid& g) {
  PsiFields d = psi_derivatives(spec.psi, g);
  require_nondegenerate(d, "isothermic_coframe");
  Coframe cf;
  cf.a1 = OneForm{ScalarField(g), ScalarField(g)};
  cf.a2 = OneForm{ScalarField(g), ScalarField(g)};
  for (int i = 0; i < g.size(); ++i) {
    double a = real_cbrt(d.pu.v[i] * d.pv.v[i] * d.pv.v[i]);
    double b = real_cbrt(d.pu.v[i] * d.pu.v[i] * d.pv.v[i]);
    if (spec.mode == IsothermicSpec::Mode::isothermic) {
      cf.a1.Q.v[i] = a;  // a1 = cbrt(psi_u psi_v^2) dv
      cf.a2.P.v[i] = b;  // a2 = cbrt(psi_u^2 psi_v) du
    } else {
      cf.a1.P.v[i] = b;  // a1 = cbrt(psi_u^2 psi_v) du
      cf.a2.Q.v[i] = a;  // a2 = cbrt(psi_u psi_v^2) dv
    }
  }
  cf.validate();
  return cf;
}

ScalarField compat_residual(const IsothermicSpec& spec, const Grid& g) {
  ScalarField phi =
      ScalarField::sampled(g, [&](double u, double v) { return std::exp(spec.psi.eval(u, v)); });
  ScalarField phi_uv = d_dv(d_du(phi));
  ScalarField S = zip(phi_uv, phi, std::divides<double>());
  ScalarField lap = zip(d_du(d_du(S)), d_dv(d_dv(S)), std::plus<double>());
  if (spec.mode == IsothermicSpec::Mode::l_isothermic) return lap;
  ScalarField phi2 = map(phi, [](double x) { return x * x; });
  ScalarField mixed = d_dv(d_du(phi2));
  return zip(lap, mixed, [](double a, double b) { return a + 2.0 * b; });
}

AlphaPhi alpha_phi(const IsothermicSpec& spec, const Grid& g) {
  // analytic pieces up to third derivatives of psi
  Expr pu = spec.psi.diff('u'), pv = spec.psi.diff('v');
  Expr lap = pu.diff('u') + pv.diff('v');
  Expr lap_u = lap.diff('u'), lap_v = lap.diff('v');
  const bool iso = spec.mode == IsothermicSpec::Mode::isothermic;

  auto Pcomp = [&](double u, double v) {
    double e2 = std::exp(2.0 * spec.psi.eval(u, v));
    double D = lap.eval(u, v);
    double t = (iso ? 1.0 : 0.0) + D / e2;
    // (e^{-2psi} D)_u = (D_u - 2 psi_u D) / e^{2psi}
    double inner_u = (lap_u.eval(u, v) - 2.0 * pu.eval(u, v) * D) / e2;
    return -e2 * (0.5 * inner_u + 2.0 * pu.eval(u, v) * t);
  };
  auto Qcomp = [&](double u, double v) {
    double e2 = std::exp(2.0 * spec.psi.eval(u, v));
    double D = lap.eval(u, v);
    double t = (iso ? 1.0 : 0.0) + D / e2;
    double inner_v = (lap_v.eval(u, v) - 2.0 * pv.eval(u, v) * D) / e2;
    return e2 * (0.5 * inner_v + 2.0 * pv.eval(u, v) * t);
  };

  AlphaPhi out;
  out.form = OneForm{ScalarField::sampled(g, Pcomp), ScalarField::sampled(g, Qcomp)};
  out.d_residual = exterior_d(out.form);
  out.max_residual = max_abs_interior(out.d_residual);
  return out;
}

// ------------------------------------------------------------- candidates

GenericCandidate generic_candidate(const Expr& psi, const Grid& g) {
  PsiFields d = psi_derivatives(psi, g);
  require_nondegenerate(d, "generic_candidate");
  Expr puv_e = psi.diff('u').diff('v');
  ScalarField puv =
      ScalarField::sampled(g, [&](double u, double v) { return puv_e.eval(u, v); });

  GenericCandidate out;
  out.cf.a1 = OneForm{ScalarField(g), ScalarField(g)};
  out.cf.a2 = OneForm{ScalarField(g), ScalarField(g)};
  out.w = Section{ScalarField(g), ScalarField(g), ScalarField(g)};
  for (int i = 0; i < g.size(); ++i) {
    double a = d.pu.v[i], b = d.pv.v[i];
    out.cf.a1.P.v[i] = real_cbrt(a * a * b);  // a1 = cbrt(psi_u^2 psi_v) du
    out.cf.a2.Q.v[i] = real_cbrt(a * b * b);  // a2 = cbrt(psi_u psi_v^2) dv
    out.w[0].v[i] = real_cbrt(1.0 / (a * a * a * a * b * b));
    out.w[1].v[i] = -real_cbrt(1.0 / (a * a * b * b * b * b));
    out.w[2].v[i] = 2.0 * puv.v[i] / (a * a * b * b);
  }
  out.cf.validate();
  InvariantSet inv = extract_invariants(out.cf);
  out.residual = parallel_residual(sigma(inv, out.cf), out.w);
  out.cls = classify_deformation(out.w);
  return out;
}

SpecialData special_coframe(const Expr& psi, const Grid& g) {
  ScalarField ps = ScalarField::sampled(g, [&](double u, double v) { return psi.eval(u, v); });
  for (double x : ps.v)
    if (!(x > 0.0)) fail(ErrorKind::Input, "special_coframe: psi must be positive");

  SpecialData out;
  out.cf.a1 = OneForm{ScalarField(g), ScalarField(g)};
  out.cf.a2 = OneForm{ScalarField(g), ScalarField(g)};
  for (int i = 0; i < g.size(); ++i) {
    out.cf.a1.P.v[i] = std::cbrt(ps.v[i] * ps.v[i]);  // psi^{2/3} du
    out.cf.a2.Q.v[i] = std::cbrt(ps.v[i]);            // psi^{1/3} dv
  }
  out.cf.validate();
  InvariantSet inv = extract_invariants(out.cf);
  out.p2 = inv.p2;
  double dev = 0.0;
  for (int iv = 1; iv < g.nv - 1; ++iv)
    for (int iu = 1; iu < g.nu - 1; ++iu) dev = std::max(dev, std::abs(inv.p2.at(iu, iv) - 1.0));
  out.p2_deviation = dev;

  // candidate with w2 = 0; w3 solved from the du-component of the transport
  // equation for w1
  SigmaForm s = sigma(inv, out.cf);
  out.w = Section{ScalarField(g), ScalarField(g), ScalarField(g)};
  for (int i = 0; i < g.size(); ++i)
    out.w[0].v[i] = 1.0 / std::cbrt(ps.v[i] * ps.v[i]);
  ScalarField w1u = d_du(out.w[0]);
  for (int i = 0; i < g.size(); ++i) {
    double s11 = s.U.v[i](0, 0), s13 = s.U.v[i](0, 2);
    if (std::abs(s13) < 1e-12) fail(ErrorKind::Degenerate, "special_coframe: solve for w3 failed");
    out.w[2].v[i] = -(w1u.v[i] + s11 * out.w[0].v[i]) / s13;
  }
  out.cls = classify_deformation(out.w);
  return out;
}

// --------------------------------------------------------------- flat web

Monotone1D tabulate_u(const Expr& f, const Grid& g) {
  Expr f1 = f.diff('u'), f2 = f1.diff('u'), f3 = f2.diff('u');
  Monotone1D t;
  t.value.resize(g.nu);
  t.d1.resize(g.nu);
  t.d2.resize(g.nu);
  t.d3.resize(g.nu);
  for (int iu = 0; iu < g.nu; ++iu) {
    double x = g.u(iu);
    t.value[iu] = f.eval(x, 0);
    t.d1[iu] = f1.eval(x, 0);
    t.d2[iu] = f2.eval(x, 0);
    t.d3[iu] = f3.eval(x, 0);
  }
  return t;
}

Monotone1D tabulate_v(const Expr& f, const Grid& g) {
  Expr f1 = f.diff('v'), f2 = f1.diff('v'), f3 = f2.diff('v');
  Monotone1D t;
  t.value.resize(g.nv);
  t.d1.resize(g.nv);
  t.d2.resize(g.nv);
  t.d3.resize(g.nv);
  for (int iv = 0; iv < g.nv; ++iv) {
    double x = g.v(iv);
    t.value[iv] = f.eval(0, x);
    t.d1[iv] = f1.eval(0, x);
    t.d2[iv] = f2.eval(0, x);
    t.d3[iv] = f3.eval(0, x);
  }
  return t;
}

PolynomialLambda polynomial_lambda(const std::vector<double>& P, double lam0, double t0, double t1,
                                   int n) {
  if (n < 2) fail(ErrorKind::Input, "polynomial_lambda: need at least two nodes");
  auto peval = [&P](double x) {
    double s = 0.0;
    for (size_t k = P.size(); k-- > 0;) s = s * x + P[k];
    return s;
  };
  auto pderiv = [&P](double x) {
    double s = 0.0;
    for (size_t k = P.size(); k-- > 1;) s = s * x + static_cast<double>(k) * P[k];
    return s;
  };
  auto pderiv2 = [&P](double x) {
    double s = 0.0;
    for (size_t k = P.size(); k-- > 2;)
      s = s * x + static_cast<double>(k) * static_cast<double>(k - 1) * P[k];
    return s;
  };
  double p0 = peval(lam0);
  if (p0 == 0.0) fail(ErrorKind::Input, "polynomial_lambda: P vanishes at the initial value");
  const double sign0 = p0 > 0.0 ? 1.0 : -1.0;

  PolynomialLambda out;
  out.table.value.assign(n, 0.0);
  out.table.d1.assign(n, 0.0);
  out.table.d2.assign(n, 0.0);
  out.table.d3.assign(n, 0.0);
  const double h = (t1 - t0) / (n - 1);
  const int substeps = 8;
  double lam = lam0;
  int valid = 0;
  for (int i = 0; i < n; ++i) {
    double p = peval(lam);
    if (p * sign0 <= 0.0) {
      out.branch_stop = true;
      break;
    }
    out.table.value[i] = lam;
    out.table.d1[i] = real_cbrt(p);
    out.table.d2[i] = pderiv(lam) / (3.0 * real_cbrt(p));
    out.table.d3[i] = (pderiv2(lam) - pderiv(lam) * pderiv(lam) / (3.0 * p)) / 3.0;
    valid = i + 1;
    if (i + 1 < n) {
      bool crossed = false;
      for (int s = 0; s < substeps && !crossed; ++s) {
        double hh = h / substeps;
        auto f = [&](double x) { return real_cbrt(peval(x)); };
        double k1 = f(lam);
        double k2 = f(lam + 0.5 * hh * k1);
        double k3 = f(lam + 0.5 * hh * k2);
        double k4 = f(lam + hh * k3);
        lam += hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (peval(lam) * sign0 <= 0.0) crossed = true;
      }
      if (crossed) {
        out.branch_stop = true;
        out.n_valid = valid;
        return out;
      }
    }
  }
  out.n_valid = valid;
  return out;
}

namespace {

struct LinePack {
  double val, d1, d2, d3;
};

LinePack sample_table(const Monotone1D& t, double s) {
  return {interp_line(t.value, s), interp_line(t.d1, s), interp_line(t.d2, s),
          interp_line(t.d3, s)};
}

struct FlatWebGeometry {
  double c;
  const Monotone1D* lam;
  const Monotone1D* mu;

  struct Point {
    double e2psi, epsi, psi, psi_u, psi_v, psi_uu, psi_vv;
  };

  Point at(const LinePack& L, const LinePack& M) const {
    Point p;
    if (c == 1.0) {
      p.e2psi = L.d1 * M.d1;
      p.psi_u = 0.5 * L.d2 / L.d1;
      p.psi_v = 0.5 * M.d2 / M.d1;
      p.psi_uu = 0.5 * (L.d3 / L.d1 - (L.d2 / L.d1) * (L.d2 / L.d1));
      p.psi_vv = 0.5 * (M.d3 / M.d1 - (M.d2 / M.d1) * (M.d2 / M.d1));
    } else {
      double s = L.val + M.val;
      p.e2psi = L.d1 * M.d1 / ((1.0 - c) * s * s);
      p.psi_u = 0.5 * L.d2 / L.d1 - L.d1 / s;
      p.psi_v = 0.5 * M.d2 / M.d1 - M.d1 / s;
      p.psi_uu = 0.5 * (L.d3 / L.d1 - (L.d2 / L.d1) * (L.d2 / L.d1)) -
                 (L.d2 * s - L.d1 * L.d1) / (s * s);
      p.psi_vv = 0.5 * (M.d3 / M.d1 - (M.d2 / M.d1) * (M.d2 / M.d1)) -
                 (M.d2 * s - M.d1 * M.d1) / (s * s);
    }
    if (!(p.e2psi > 0.0))
      fail(ErrorKind::Input,
           "flatweb: sign-inconsistent family (e^{2 psi} must be positive; check the sign of "
           "(1-c)^{-1} lambda' mu')");
    p.epsi = std::sqrt(p.e2psi);
    p.psi = 0.5 * std::log(p.e2psi);
    return p;
  }
};

// State transport of the connection coefficients behind r along one line.
// dir = 'u': A_u = R - 3 A psi_u; B_u = 3 c e^psi psi_v - B psi_u;
//            R_u = -R psi_u - 2(1-c) e^{2psi} B - 3 c e^psi (psi_vv + 4 psi_v^2)
// dir = 'v': A_v = 3 c e^psi psi_u - A psi_v; B_v = -R - 3 B psi_v;
//            R_v = -R psi_v + 2(1-c) e^{2psi} A + 3 c e^psi (psi_uu + 4 psi_u^2)
void integrate_r_line(const FlatWebGeometry& geo, char dir, const Monotone1D& along,
                      const LinePack& fixed, int from, int to, Eigen::Vector3d& state,
                      double step) {
  const int substeps = 4;
  int d = to > from ? 1 : -1;
  auto rhs = [&](double s, const Eigen::Vector3d& x) {
    LinePack moving = sample_table(along, s);
    FlatWebGeometry::Point p =
        dir == 'u' ? geo.at(moving, fixed) : geo.at(fixed, moving);
    double A = x(0), B = x(1), R = x(2);
    double c = geo.c;
    if (dir == 'u')
      return Eigen::Vector3d(R - 3.0 * A * p.psi_u, 3.0 * c * p.epsi * p.psi_v - B * p.psi_u,
                             -R * p.psi_u - 2.0 * (1.0 - c) * p.e2psi * B -
                                 3.0 * c * p.epsi * (p.psi_vv + 4.0 * p.psi_v * p.psi_v));
    return Eigen::Vector3d(3.0 * c * p.epsi * p.psi_u - A * p.psi_v, -R - 3.0 * B * p.psi_v,
                           -R * p.psi_v + 2.0 * (1.0 - c) * p.e2psi * A +
                               3.0 * c * p.epsi * (p.psi_uu + 4.0 * p.psi_u * p.psi_u));
  };
  for (int i = from; i != to; i += d) {
    for (int s = 0; s < substeps; ++s) {
      double a = i + d * (static_cast<double>(s) / substeps);
      double h = static_cast<double>(d) / substeps * step;
      double hn = static_cast<double>(d) / substeps;
      Eigen::Vector3d k1 = rhs(a, state);
      Eigen::Vector3d k2 = rhs(a + 0.5 * hn, state + 0.5 * h * k1);
      Eigen::Vector3d k3 = rhs(a + 0.5 * hn, state + 0.5 * h * k2);
      Eigen::Vector3d k4 = rhs(a + hn, state + h * k3);
      state += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
}

}  // namespace

FlatWebData flatweb(const FlatWebSpec& spec, const Grid& g, const FlatWebOptions& opt) {
  return flatweb(spec.c, tabulate_u(spec.lambda, g), tabulate_v(spec.mu, g), g, opt);
}

FlatWebData flatweb(double c, const Monotone1D& lambda, const Monotone1D& mu, const Grid& g,
                    const FlatWebOptions& opt) {
  if (static_cast<int>(lambda.value.size()) != g.nu ||
      static_cast<int>(mu.value.size()) != g.nv)
    fail(ErrorKind::Input, "flatweb: tables do not match the grid");

  FlatWebGeometry geo{c, &lambda, &mu};
  FlatWebData out;
  out.psi = ScalarField(g);
  out.cf.a1 = OneForm{ScalarField(g), ScalarField(g)};
  out.cf.a2 = OneForm{ScalarField(g), ScalarField(g)};
  ScalarField q1(g), q2(g);
  NodeField<FlatWebGeometry::Point> pts(g);
  for (int iv = 0; iv < g.nv; ++iv)
    for (int iu = 0; iu < g.nu; ++iu) {
      LinePack L{lambda.value[iu], lambda.d1[iu], lambda.d2[iu], lambda.d3[iu]};
      LinePack M{mu.value[iv], mu.d1[iv], mu.d2[iv], mu.d3[iv]};
      FlatWebGeometry::Point p = geo.at(L, M);
      pts.at(iu, iv) = p;
      int i = g.idx(iu, iv);
      out.psi.v[i] = p.psi;
      out.cf.a1.P.v[i] = p.epsi;  // a1 = e^psi du
      out.cf.a2.Q.v[i] = p.epsi;  // a2 = e^psi dv
      q1.v[i] = -p.psi_u / p.epsi;
      q2.v[i] = p.psi_v / p.epsi;
    }
  out.cf.validate();
  out.inv.q1 = std::move(q1);
  out.inv.q2 = std::move(q2);
  out.inv.p1 = ScalarField::constant(g, c);
  out.inv.p2 = ScalarField::constant(g, c);

  // Liouville residual by finite differences (the analytic identity is exact).
  ScalarField psi_uv = d_dv(d_du(out.psi));
  out.liouville_residual = ScalarField(g);
  for (int i = 0; i < g.size(); ++i) {
    double e2 = out.cf.a1.P.v[i] * out.cf.a1.P.v[i];
    out.liouville_residual.v[i] = psi_uv.v[i] - (1.0 - c) * e2;
  }
  out.liouville_max = max_abs_interior(out.liouville_residual);
  if (out.liouville_max > 1.0)
    fail(ErrorKind::Numerical, "flatweb: Liouville residual out of range (internal inconsistency)");

  // r fields
  ScalarField Af(g), Bf(g);
  bool have_r = false;
  if (opt.A_expr && opt.B_expr) {
    for (int iv = 0; iv < g.nv; ++iv)
      for (int iu = 0; iu < g.nu; ++iu) {
        Af.at(iu, iv) = opt.A_expr->eval(g.u(iu), g.v(iv));
        Bf.at(iu, iv) = opt.B_expr->eval(g.u(iu), g.v(iv));
      }
    // validate the linear system with exact derivatives of the expressions
    Expr Av = opt.A_expr->diff('v'), Bu = opt.B_expr->diff('u');
    Expr Au = opt.A_expr->diff('u'), Bv = opt.B_expr->diff('v');
    double res = 0.0;
    for (int iv = 0; iv < g.nv; ++iv)
      for (int iu = 0; iu < g.nu; ++iu) {
        const auto& p = pts.at(iu, iv);
        double u = g.u(iu), v = g.v(iv);
        double A = Af.at(iu, iv), B = Bf.at(iu, iv);
        res = std::max(res, std::abs(Av.eval(u, v) + A * p.psi_v - 3.0 * c * p.epsi * p.psi_u));
        res = std::max(res, std::abs(Bu.eval(u, v) + B * p.psi_u - 3.0 * c * p.epsi * p.psi_v));
        res = std::max(res, std::abs(Au.eval(u, v) + Bv.eval(u, v) + 3.0 * A * p.psi_u +
                                     3.0 * B * p.psi_v));
      }
    double scale = std::max({1.0, max_abs(Af), max_abs(Bf)});
    if (res > 1e-8 * scale)
      fail(ErrorKind::Verification,
           "flatweb: supplied A, B fail the compatibility system (residual " +
               std::to_string(res) + ")");
    have_r = true;
    out.r_source = "expressions";
  } else if (opt.r_mode == FlatWebRMode::automatic && c == 0.0) {
    // A = (lambda/lambda') e^{-psi}, B = (mu/mu') e^{-psi}
    for (int iv = 0; iv < g.nv; ++iv)
      for (int iu = 0; iu < g.nu; ++iu) {
        const auto& p = pts.at(iu, iv);
        Af.at(iu, iv) = lambda.value[iu] / lambda.d1[iu] / p.epsi;
        Bf.at(iu, iv) = mu.value[iv] / mu.d1[iv] / p.epsi;
      }
    have_r = true;
    out.r_source = "closed-form";
  } else if (opt.r_mode == FlatWebRMode::integrate) {
    // transport (A, B, R) along the base row, then up each column
    NodeField<Eigen::Vector3d> ABR(g);
    Eigen::Vector3d s0(opt.A0, opt.B0, opt.R0);
    ABR.at(0, 0) = s0;
    LinePack mu0{mu.value[0], mu.d1[0], mu.d2[0], mu.d3[0]};
    for (int iu = 1; iu < g.nu; ++iu) {
      Eigen::Vector3d s = ABR.at(iu - 1, 0);
      integrate_r_line(geo, 'u', lambda, mu0, iu - 1, iu, s, g.hu());
      ABR.at(iu, 0) = s;
    }
    for (int iu = 0; iu < g.nu; ++iu) {
      LinePack L{lambda.value[iu], lambda.d1[iu], lambda.d2[iu], lambda.d3[iu]};
      for (int iv = 1; iv < g.nv; ++iv) {
        Eigen::Vector3d s = ABR.at(iu, iv - 1);
        integrate_r_line(geo, 'v', mu, L, iv - 1, iv, s, g.hv());
        ABR.at(iu, iv) = s;
      }
    }
    for (int i = 0; i < g.size(); ++i) {
      Af.v[i] = ABR.v[i](0);
      Bf.v[i] = ABR.v[i](1);
    }
    // consistency of the overdetermined system, by finite differences
    ScalarField Avf = d_dv(Af), Buf = d_du(Bf);
    double res = 0.0;
    for (int iv = 1; iv < g.nv - 1; ++iv)
      for (int iu = 1; iu < g.nu - 1; ++iu) {
        const auto& p = pts.at(iu, iv);
        res = std::max(res, std::abs(Avf.at(iu, iv) + Af.at(iu, iv) * p.psi_v -
                                     3.0 * c * p.epsi * p.psi_u));
        res = std::max(res, std::abs(Buf.at(iu, iv) + Bf.at(iu, iv) * p.psi_u -
                                     3.0 * c * p.epsi * p.psi_v));
      }
    double h2 = std::max(g.hu(), g.hv());
    h2 *= h2;
    double scale = std::max({1.0, max_abs(Af), max_abs(Bf)});
    if (res > 1000.0 * h2 * scale)
      fail(ErrorKind::Verification,
           "flatweb: integrated (A,B,R) are inconsistent (family not realizable; residual " +
               std::to_string(res) + ")");
    have_r = true;
    out.r_source = "integrated";
  } else if (opt.r_mode == FlatWebRMode::automatic && c == 1.0) {
    // constants solve the system when psi_u = psi_v = 0 (affine lambda, mu)
    bool flat_psi = true;
    for (int i = 0; i < g.size(); ++i)
      if (std::abs(pts.v[i].psi_u) > 1e-12 || std::abs(pts.v[i].psi_v) > 1e-12) flat_psi = false;
    if (flat_psi) {
      Af = ScalarField::constant(g, opt.A0);
      Bf = ScalarField::constant(g, opt.B0);
      have_r = true;
      out.r_source = "closed-form";
    }
  }

  if (have_r) {
    ScalarField r1(g), r2(g);
    for (int i = 0; i < g.size(); ++i) {
      double ep = out.cf.a1.P.v[i];
      r1.v[i] = Af.v[i] / ep;
      r2.v[i] = Bf.v[i] / ep;
    }
    out.inv.r1 = std::move(r1);
    out.inv.r2 = std::move(r2);
  } else {
    out.r_source = "none";
  }

  // candidate parallel sections from the family's closed-form table
  auto add_candidate = [&](const std::string& name, auto&& f) {
    CandidateSection cs;
    cs.name = name;
    cs.w = Section{ScalarField(g), ScalarField(g), ScalarField(g)};
    for (int iv = 0; iv < g.nv; ++iv)
      for (int iu = 0; iu < g.nu; ++iu) {
        Eigen::Vector3d w = f(iu, iv);
        int i = g.idx(iu, iv);
        cs.w[0].v[i] = w(0);
        cs.w[1].v[i] = w(1);
        cs.w[2].v[i] = w(2);
      }
    out.candidates.push_back(std::move(cs));
  };
  if (c == 1.0) {
    add_candidate("s0", [&](int iu, int iv) {
      const auto& p = pts.at(iu, iv);
      return Eigen::Vector3d(1.0 / lambda.d1[iu], -1.0 / mu.d1[iv], 0.0) / p.e2psi;
    });
    add_candidate("s1", [&](int iu, int iv) {
      const auto& p = pts.at(iu, iv);
      return Eigen::Vector3d(lambda.value[iu] / lambda.d1[iu], -mu.value[iv] / mu.d1[iv],
                             1.0 / p.epsi) /
             p.e2psi;
    });
    add_candidate("s2", [&](int iu, int iv) {
      const auto& p = pts.at(iu, iv);
      double prod = lambda.value[iu] * mu.value[iv];
      return prod *
             Eigen::Vector3d(lambda.value[iu] / lambda.d1[iu], -mu.value[iv] / mu.d1[iv],
                             2.0 / p.epsi) /
             p.e2psi;
    });
  } else {
    add_candidate("s0", [&](int iu, int iv) {
      const auto& p = pts.at(iu, iv);
      double s = lambda.value[iu] + mu.value[iv];
      return Eigen::Vector3d(-1.0 / lambda.d1[iu], 1.0 / mu.d1[iv], 2.0 / (p.epsi * s)) / p.e2psi;
    });
    add_candidate("s1", [&](int iu, int iv) {
      const auto& p = pts.at(iu, iv);
      double s = lambda.value[iu] + mu.value[iv];
      return Eigen::Vector3d(lambda.value[iu] / lambda.d1[iu], mu.value[iv] / mu.d1[iv],
                             (mu.value[iv] - lambda.value[iu]) / (p.epsi * s)) /
             p.e2psi;
    });
    add_candidate("s2", [&](int iu, int iv) {
      const auto& p = pts.at(iu, iv);
      double s = lambda.value[iu] + mu.value[iv];
      double l = lambda.value[iu], m = mu.value[iv];
      return Eigen::Vector3d(l * l / lambda.d1[iu], -m * m / mu.d1[iv],
                             2.0 * m * l / (p.epsi * s)) /
             p.e2psi;
    });
  }

  SigmaForm s = sigma(out.inv, out.cf);
  for (auto& cs : out.candidates) cs.residual = parallel_residual(s, cs.w);
  if (opt.attach_solver) {
    out.solver = solve_parallel(s);
    out.has_solver = true;
  }
  return out;
}

Coframe constant_coframe(const Grid& g) {
  Coframe cf;
  cf.a1 = OneForm{ScalarField::constant(g, 1.0), ScalarField::constant(g, 0.0)};
  cf.a2 = OneForm{ScalarField::constant(g, 0.0), ScalarField::constant(g, 1.0)};
  cf.validate();
  return cf;
}

Coframe random_coframe(const Grid& g, unsigned seed) {
  // smooth trigonometric perturbations of the coordinate coframe, seeded
  auto lcg = [state = static_cast<uint64_t>(seed) * 6364136223846793005ULL + 1442695040888963407ULL]() mutable {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>((state >> 11) & ((1ULL << 53) - 1)) / static_cast<double>(1ULL << 53);
  };
  double a1 = 1.0 + 2.0 * lcg(), b1 = 1.0 + 2.0 * lcg(), c1 = 2.0 * lcg() - 1.0;
  double a2 = 1.0 + 2.0 * lcg(), b2 = 1.0 + 2.0 * lcg(), c2 = 2.0 * lcg() - 1.0;
  double m1 = 0.15 + 0.2 * lcg(), m2 = 0.15 + 0.2 * lcg();
  Coframe cf;
  cf.a1 = OneForm{ScalarField::sampled(
                      g, [&](double u, double v) { return 1.0 + m1 * std::sin(a1 * u + b1 * v + c1); }),
                  ScalarField::sampled(g, [&](double u, double v) {
                    return 0.2 * m2 * std::cos(a2 * u + b2 * v + c2);
                  })};
  cf.a2 = OneForm{ScalarField::sampled(g, [&](double u, double v) {
                    return 0.2 * m1 * std::sin(a2 * u + b1 * v + c2);
                  }),
                  ScalarField::sampled(g, [&](double u, double v) {
                    return 1.0 + m2 * std::cos(a1 * u + b2 * v + c1);
                  })};
  cf.validate();
  return cf;
}

}  // namespace lieform::catalog
