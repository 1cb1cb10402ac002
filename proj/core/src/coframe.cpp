#include "lieform/coframe.hpp"

#include <cmath>

namespace lieform {

OneForm operator+(const OneForm& a, const OneForm& b) {
  return {zip(a.P, b.P, std::plus<double>()), zip(a.Q, b.Q, std::plus<double>())};
}
OneForm operator-(const OneForm& a, const OneForm& b) {
  return {zip(a.P, b.P, std::minus<double>()), zip(a.Q, b.Q, std::minus<double>())};
}
OneForm operator*(double s, const OneForm& a) {
  return {map(a.P, [s](double x) { return s * x; }), map(a.Q, [s](double x) { return s * x; })};
}
OneForm operator*(const ScalarField& s, const OneForm& a) {
  return {zip(s, a.P, std::multiplies<double>()), zip(s, a.Q, std::multiplies<double>())};
}

ScalarField Coframe::wedge() const {
  ScalarField w(grid());
  for (int i = 0; i < grid().size(); ++i)
    w.v[i] = a1.P.v[i] * a2.Q.v[i] - a1.Q.v[i] * a2.P.v[i];
  return w;
}

void Coframe::validate() {
  ScalarField w = wedge();
  double scale = max_abs(w);
  if (scale == 0.0) fail(ErrorKind::Degenerate, "coframe: wedge coefficient vanishes");
  int sign = w.v[0] > 0.0 ? +1 : -1;
  for (double x : w.v) {
    if (std::abs(x) < 1e-12 * scale || (x > 0.0 ? +1 : -1) != sign)
      fail(ErrorKind::Degenerate, "coframe: independence condition fails on the grid");
  }
  orientation = sign;
}

ScalarField exterior_d(const OneForm& w) {
  ScalarField qu = d_du(w.Q);
  ScalarField pv = d_dv(w.P);
  return zip(qu, pv, std::minus<double>());
}

namespace {

// Wedge coefficient with an explicit floor producing a clean error.
ScalarField checked_wedge(const Coframe& cf) {
  ScalarField w = cf.wedge();
  double floor = 1e-12 * std::max(1.0, max_abs(w));
  for (double x : w.v)
    if (std::abs(x) < floor) fail(ErrorKind::Degenerate, "coframe: singular (wedge below floor)");
  return w;
}

}  // namespace

DualDerivatives dual_derivatives(const ScalarField& gfield, const Coframe& cf) {
  if (!gfield.grid.same(cf.grid())) fail(ErrorKind::Input, "dual_derivatives: grid mismatch");
  ScalarField w = checked_wedge(cf);
  ScalarField gu = d_du(gfield), gv = d_dv(gfield);
  DualDerivatives out{ScalarField(gfield.grid), ScalarField(gfield.grid)};
  for (int i = 0; i < gfield.grid.size(); ++i) {
    // dg = d1 (P1 du + Q1 dv) + d2 (P2 du + Q2 dv)
    double p1 = cf.a1.P.v[i], q1 = cf.a1.Q.v[i], p2 = cf.a2.P.v[i], q2 = cf.a2.Q.v[i];
    out.d1.v[i] = (gu.v[i] * q2 - gv.v[i] * p2) / w.v[i];
    out.d2.v[i] = (gv.v[i] * p1 - gu.v[i] * q1) / w.v[i];
  }
  return out;
}

std::pair<ScalarField, ScalarField> extract_q(const Coframe& cf) {
  ScalarField w = checked_wedge(cf);
  ScalarField d1 = exterior_d(cf.a1);
  ScalarField d2 = exterior_d(cf.a2);
  ScalarField q2 = zip(d1, w, [](double d, double ww) { return -d / ww; });
  ScalarField q1 = zip(d2, w, [](double d, double ww) { return -d / ww; });
  return {q1, q2};
}

std::pair<ScalarField, ScalarField> extract_p(const Coframe& cf, const ScalarField& q1,
                                              const ScalarField& q2) {
  DualDerivatives dq1 = dual_derivatives(q1, cf);
  DualDerivatives dq2 = dual_derivatives(q2, cf);
  ScalarField p1(cf.grid()), p2(cf.grid());
  for (int i = 0; i < cf.grid().size(); ++i) {
    double qq = q1.v[i] * q2.v[i];
    p2.v[i] = 1.0 + qq + 2.0 * dq1.d2.v[i] + dq2.d1.v[i];
    p1.v[i] = 1.0 + qq - dq1.d2.v[i] - 2.0 * dq2.d1.v[i];
  }
  return {p1, p2};
}

InvariantSet extract_invariants(const Coframe& cf) {
  auto [q1, q2] = extract_q(cf);
  auto [p1, p2] = extract_p(cf, q1, q2);
  InvariantSet inv;
  inv.q1 = std::move(q1);
  inv.q2 = std::move(q2);
  inv.p1 = std::move(p1);
  inv.p2 = std::move(p2);
  inv.provenance = InvariantSet::Provenance::extracted;
  return inv;
}

std::array<ScalarField, 3> codazzi_residual(const InvariantSet& inv, const Coframe& cf) {
  if (!inv.has_r()) fail(ErrorKind::Input, "codazzi_residual: r fields missing");
  DualDerivatives dr1 = dual_derivatives(*inv.r1, cf);
  DualDerivatives dr2 = dual_derivatives(*inv.r2, cf);
  DualDerivatives dp1 = dual_derivatives(inv.p1, cf);
  DualDerivatives dp2 = dual_derivatives(inv.p2, cf);
  const Grid& g = cf.grid();
  std::array<ScalarField, 3> res{ScalarField(g), ScalarField(g), ScalarField(g)};
  for (int i = 0; i < g.size(); ++i) {
    double q1 = inv.q1.v[i], q2 = inv.q2.v[i];
    double p1 = inv.p1.v[i], p2 = inv.p2.v[i];
    double r1 = inv.r1->v[i], r2 = inv.r2->v[i];
    res[0].v[i] = (-dr1.d2.v[i] + dp2.d1.v[i]) - (2.0 * q2 * r1 + 3.0 * q1 * p2);
    res[1].v[i] = (-dp1.d2.v[i] + dr2.d1.v[i]) - (2.0 * q1 * r2 + 3.0 * q2 * p1);
    res[2].v[i] = (dr2.d2.v[i] + dr1.d1.v[i]) - 4.0 * (q1 * r1 - q2 * r2);
  }
  return res;
}

WebData web(const Coframe& cf, const ScalarField& q1, const ScalarField& q2) {
  WebData out;
  ScalarField mq1 = map(q1, std::negate<double>());
  out.zeta = mq1 * cf.a1 + q2 * cf.a2;
  auto [p1, p2] = extract_p(cf, q1, q2);
  out.curvature = zip(p2, p1, [](double a, double b) { return (a - b) / 3.0; });

  ScalarField w = checked_wedge(cf);
  ScalarField dz = exterior_d(out.zeta);
  double res = 0.0;
  for (int iv = 1; iv < cf.grid().nv - 1; ++iv)
    for (int iu = 1; iu < cf.grid().nu - 1; ++iu) {
      int i = cf.grid().idx(iu, iv);
      res = std::max(res, std::abs(dz.v[i] / w.v[i] - out.curvature.v[i]));
    }
  out.identity_residual = res;
  out.diagonally_cyclidic = max_abs(out.curvature) < 1e-6;
  return out;
}

double FormPack::phi(int iu, int iv, double xu, double xv) const {
  return -cf.eval1(iu, iv, xu, xv) * cf.eval2(iu, iv, xu, xv);
}

double FormPack::psi(int iu, int iv, double xu, double xv) const {
  double a = cf.eval1(iu, iv, xu, xv), b = cf.eval2(iu, iv, xu, xv);
  return -a * a * a + b * b * b;
}

ExtReal FormPack::quotient(int iu, int iv, double xu, double xv) const {
  if (xu == 0.0 && xv == 0.0)
    fail(ErrorKind::Input, "form quotient: undefined on the zero tangent vector");
  double a = cf.eval1(iu, iv, xu, xv), b = cf.eval2(iu, iv, xu, xv);
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  bool a0 = std::abs(a) < 1e-14 * scale, b0 = std::abs(b) < 1e-14 * scale;
  if (a0 && b0)
    fail(ErrorKind::Degenerate, "form quotient: 0/0 (coframe annihilates the vector)");
  if (a0 || b0) {
    // Phi(X) = 0; quotient is infinite unless the cubic vanishes too (a = b).
    double num = -a * a * a + b * b * b;
    if (std::abs(num) < 1e-14 * scale * scale * scale) return {0.0, false};
    return {0.0, true};
  }
  return {(a * a * a - b * b * b) / (a * b), false};
}

FormPack form_pack(const Coframe& cf) { return FormPack{cf}; }

namespace {
ScalarField negate(const ScalarField& f) { return map(f, std::negate<double>()); }
}  // namespace

Coframe flip_coframe(const Coframe& cf) {
  Coframe out;
  out.a1 = OneForm{negate(cf.a1.P), negate(cf.a1.Q)};
  out.a2 = OneForm{negate(cf.a2.P), negate(cf.a2.Q)};
  out.orientation = cf.orientation;
  return out;
}

Coframe swap_coframe(const Coframe& cf) {
  Coframe out;
  out.a1 = cf.a2;
  out.a2 = cf.a1;
  out.orientation = -cf.orientation;
  return out;
}

InvariantSet flip_invariants(const InvariantSet& inv) {
  InvariantSet out = inv;
  out.q1 = negate(inv.q1);
  out.q2 = negate(inv.q2);
  return out;
}

InvariantSet swap_invariants(const InvariantSet& inv) {
  InvariantSet out;
  out.q1 = negate(inv.q2);
  out.q2 = negate(inv.q1);
  out.p1 = inv.p2;
  out.p2 = inv.p1;
  if (inv.has_r()) {
    out.r1 = inv.r2;
    out.r2 = inv.r1;
  }
  out.provenance = inv.provenance;
  return out;
}

namespace {
double coframe_distance(const Coframe& a, const Coframe& b) {
  double d = 0.0;
  for (int i = 0; i < a.grid().size(); ++i) {
    d = std::max(d, std::abs(a.a1.P.v[i] - b.a1.P.v[i]));
    d = std::max(d, std::abs(a.a1.Q.v[i] - b.a1.Q.v[i]));
    d = std::max(d, std::abs(a.a2.P.v[i] - b.a2.P.v[i]));
    d = std::max(d, std::abs(a.a2.Q.v[i] - b.a2.Q.v[i]));
  }
  return d;
}
}  // namespace

RepresentativeMatch best_representative(const Coframe& reference, const Coframe& candidate) {
  if (!reference.grid().same(candidate.grid()))
    fail(ErrorKind::Input, "best_representative: grid mismatch");
  RepresentativeMatch best;
  best.distance = coframe_distance(reference, candidate);
  for (bool sw : {false, true})
    for (bool fl : {false, true}) {
      if (!sw && !fl) continue;
      Coframe t = sw ? swap_coframe(candidate) : candidate;
      if (fl) t = flip_coframe(t);
      double d = coframe_distance(reference, t);
      if (d < best.distance) best = RepresentativeMatch{sw, fl, d};
    }
  return best;
}

Coframe apply_representative(const Coframe& cf, const RepresentativeMatch& m) {
  Coframe out = m.swapped ? swap_coframe(cf) : cf;
  if (m.flipped) out = flip_coframe(out);
  return out;
}

InvariantSet apply_representative(const InvariantSet& inv, const RepresentativeMatch& m) {
  InvariantSet out = m.swapped ? swap_invariants(inv) : inv;
  if (m.flipped) out = flip_invariants(out);
  return out;
}

}  // namespace lieform
