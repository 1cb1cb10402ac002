#include "lieform/frames.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "lieform/transport.hpp"

namespace lieform {

MatrixForm operator+(const MatrixForm& a, const MatrixForm& b) {
  MatrixForm out(a.grid);
  for (int i = 0; i < a.grid.size(); ++i) {
    out.U.v[i] = a.U.v[i] + b.U.v[i];
    out.V.v[i] = a.V.v[i] + b.V.v[i];
  }
  return out;
}

MatrixForm operator-(const MatrixForm& a, const MatrixForm& b) {
  MatrixForm out(a.grid);
  for (int i = 0; i < a.grid.size(); ++i) {
    out.U.v[i] = a.U.v[i] - b.U.v[i];
    out.V.v[i] = a.V.v[i] - b.V.v[i];
  }
  return out;
}

namespace {

// One du- or dv-component of the canonical Maurer-Cartan matrix. a1, a2 are
// the coframe components in that direction.
Mat6 mc_component(double a1, double a2, double q1, double q2, double p1, double p2, double r1,
                  double r2) {
  Mat6 m = Mat6::Zero();
  m(3, 0) = a1;
  m(0, 1) = a1;
  m(2, 1) = a2;
  m(1, 0) = a2;
  m(0, 0) = -2.0 * q1 * a1 + q2 * a2;
  m(1, 1) = -q1 * a1 + 2.0 * q2 * a2;
  m(0, 3) = r1 * a1 + p2 * a2;
  m(1, 2) = p1 * a1 + r2 * a2;
  m(0, 4) = -r2 * a1 + r1 * a2;
  // algebra mirrors
  m(5, 3) = a1;
  m(4, 2) = a2;
  m(5, 5) = -m(0, 0);
  m(4, 4) = -m(1, 1);
  m(2, 4) = m(1, 2);
  m(3, 5) = m(0, 3);
  m(1, 5) = -m(0, 4);
  m(4, 5) = -m(0, 1);
  m(5, 4) = -m(1, 0);
  return m;
}

}  // namespace

MatrixForm assemble_mc(const InvariantSet& inv, const Coframe& cf) {
  if (!inv.has_r()) fail(ErrorKind::Input, "assemble_mc: r fields missing");
  if (!inv.grid().same(cf.grid())) fail(ErrorKind::Input, "assemble_mc: grid mismatch");
  MatrixForm out(cf.grid());
  for (int i = 0; i < cf.grid().size(); ++i) {
    out.U.v[i] = mc_component(cf.a1.P.v[i], cf.a2.P.v[i], inv.q1.v[i], inv.q2.v[i], inv.p1.v[i],
                              inv.p2.v[i], inv.r1->v[i], inv.r2->v[i]);
    out.V.v[i] = mc_component(cf.a1.Q.v[i], cf.a2.Q.v[i], inv.q1.v[i], inv.q2.v[i], inv.p1.v[i],
                              inv.p2.v[i], inv.r1->v[i], inv.r2->v[i]);
  }
  return out;
}

ScalarField structure_residual(const MatrixForm& alpha) {
  NodeField<Mat6> dU = d_dv(alpha.U), dV = d_du(alpha.V);
  ScalarField out(alpha.grid);
  for (int i = 0; i < alpha.grid.size(); ++i) {
    Mat6 S = dV.v[i] - dU.v[i] + alpha.U.v[i] * alpha.V.v[i] - alpha.V.v[i] * alpha.U.v[i];
    out.v[i] = S.cwiseAbs().maxCoeff();
  }
  return out;
}

FrameField integrate_frame(const MatrixForm& alpha, const Mat6& A0, int base_iu, int base_iv,
                           double drift_tol) {
  const Grid& g = alpha.grid;
  FrameField out{g, NodeField<Mat6>(g, Mat6::Zero()), base_iu, base_iv};

  // Physical step lengths enter through scaled samples: d/ds A = A * (h C).
  auto row_samples = [&](int iv) {
    std::vector<Mat6> s(g.nu);
    for (int iu = 0; iu < g.nu; ++iu) s[iu] = g.hu() * alpha.U.at(iu, iv);
    return s;
  };
  auto col_samples = [&](int iu) {
    std::vector<Mat6> s(g.nv);
    for (int iv = 0; iv < g.nv; ++iv) s[iv] = g.hv() * alpha.V.at(iu, iv);
    return s;
  };

  std::vector<Mat6> base_row = row_samples(base_iv);
  Mat6 A = A0;
  out.A.at(base_iu, base_iv) = A;
  for (int iu = base_iu + 1; iu < g.nu; ++iu) {
    rk4_line(base_row, iu - 1, iu, A, true, 1);
    out.A.at(iu, base_iv) = A;
  }
  A = A0;
  for (int iu = base_iu - 1; iu >= 0; --iu) {
    rk4_line(base_row, iu + 1, iu, A, true, 1);
    out.A.at(iu, base_iv) = A;
  }
  for (int iu = 0; iu < g.nu; ++iu) {
    std::vector<Mat6> col = col_samples(iu);
    Mat6 B = out.A.at(iu, base_iv);
    for (int iv = base_iv + 1; iv < g.nv; ++iv) {
      rk4_line(col, iv - 1, iv, B, true, 1);
      out.A.at(iu, iv) = B;
    }
    B = out.A.at(iu, base_iv);
    for (int iv = base_iv - 1; iv >= 0; --iv) {
      rk4_line(col, iv + 1, iv, B, true, 1);
      out.A.at(iu, iv) = B;
    }
  }

  double worst = 0.0;
  int wu = 0, wv = 0;
  for (int iv = 0; iv < g.nv; ++iv)
    for (int iu = 0; iu < g.nu; ++iu) {
      double r = group_residual(out.A.at(iu, iv));
      if (r > worst) {
        worst = r;
        wu = iu;
        wv = iv;
      }
    }
  if (worst > drift_tol) {
    std::ostringstream os;
    os << "integrate_frame: group residual drifted to " << worst << " at node (" << wu << "," << wv
       << ")";
    fail(ErrorKind::Numerical, os.str());
  }
  return out;
}

// ---------------------------------------------------------------------------
// canonical reduction
// ---------------------------------------------------------------------------

namespace {

// Euclidean projector complement of span{f0, f1}.
struct SpanProjector {
  Eigen::Matrix<double, 6, 2> U;
  explicit SpanProjector(const Vec6& f0, const Vec6& f1) {
    Eigen::Matrix<double, 6, 2> span;
    span.col(0) = f0;
    span.col(1) = f1;
    Eigen::HouseholderQR<Eigen::Matrix<double, 6, 2>> qr(span);
    U = qr.householderQ() * Eigen::Matrix<double, 6, 2>::Identity();
  }
  Vec6 operator()(const Vec6& x) const { return x - U * (U.transpose() * x); }
};

// Pencil member (c0 F0 + c1 F1) stationary along the given derivative pair.
Vec6 stationary_member(const Vec6& f0, const Vec6& f1, const Vec6& d0, const Vec6& d1) {
  SpanProjector P(f0, f1);
  Eigen::Matrix<double, 6, 2> B;
  B.col(0) = P(d0);
  B.col(1) = P(d1);
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 2>> svd(B, Eigen::ComputeFullV);
  if (svd.singularValues()(0) < 1e-12 * std::max(1.0, d0.norm() + d1.norm()))
    fail(ErrorKind::Degenerate, "canonical_reduction: stationary pencil solve degenerated");
  Vec2 c = svd.matrixV().col(1);
  return (c(0) * f0 + c(1) * f1).normalized();
}

void propagate_sign(NodeField<Vec6>& F) {
  const Grid& g = F.grid;
  for (int iv = 0; iv < g.nv; ++iv)
    for (int iu = 0; iu < g.nu; ++iu) {
      const Vec6* prev = nullptr;
      if (iu > 0)
        prev = &F.at(iu - 1, iv);
      else if (iv > 0)
        prev = &F.at(iu, iv - 1);
      if (prev && F.at(iu, iv).dot(*prev) < 0.0) F.at(iu, iv) = -F.at(iu, iv);
    }
}

struct ComponentPair {
  double u = 0.0, v = 0.0;  // coefficients against du, dv
};

ComponentPair comp(const NodeField<Mat6>& MU, const NodeField<Mat6>& MV, int i, int r, int c) {
  return {MU.v[i](r, c), MV.v[i](r, c)};
}

}  // namespace

ReductionResult canonical_reduction(const LegendreField& lift) {
  const Grid& g = lift.grid;
  const int n = g.size();

  NodeField<Vec6> F0(g), F1(g);
  F0.v = lift.F0;
  F1.v = lift.F1;
  NodeField<Vec6> F0u = d_du(F0), F0v = d_dv(F0), F1u = d_du(F1), F1v = d_dv(F1);

  // Stage 1: A0 = member stationary along u, A1 = member stationary along v.
  NodeField<Vec6> KA(g), KB(g);
  for (int i = 0; i < n; ++i) {
    KA.v[i] = stationary_member(lift.F0[i], lift.F1[i], F0u.v[i], F1u.v[i]);
    KB.v[i] = stationary_member(lift.F0[i], lift.F1[i], F0v.v[i], F1v.v[i]);
  }
  propagate_sign(KA);
  propagate_sign(KB);

  // Stage 2: spacelike directions the spheres move in.
  NodeField<Vec6> KAv = d_dv(KA), KBu = d_du(KB);
  NodeField<Vec6> A2(g), A3(g);
  for (int i = 0; i < n; ++i) {
    SpanProjector P(lift.F0[i], lift.F1[i]);
    Vec6 m3 = P(KAv.v[i]);
    Vec6 m2 = P(KBu.v[i]);
    double n2 = inner(m2, m2);
    if (n2 <= 0.0) fail(ErrorKind::Degenerate, "canonical_reduction: sphere motion not spacelike");
    Vec6 a2 = m2 / std::sqrt(n2);
    Vec6 m3o = m3 - inner(m3, a2) * a2;
    double n3 = inner(m3o, m3o);
    if (n3 <= 0.0) fail(ErrorKind::Degenerate, "canonical_reduction: sphere motion not spacelike");
    A2.v[i] = a2;
    A3.v[i] = m3o / std::sqrt(n3);
  }
  propagate_sign(A2);
  propagate_sign(A3);

  // Completion to a full frame.
  NodeField<Mat6> E(g);
  for (int i = 0; i < n; ++i) {
    const Vec6 &a0 = KA.v[i], &a1 = KB.v[i], &a2 = A2.v[i], &a3 = A3.v[i];
    Vec6 B4 = solve_pairings({a1, a0, a2, a3}, {-1.0, 0.0, 0.0, 0.0});
    Vec6 a4 = B4 + 0.5 * inner(B4, B4) * a1;
    Vec6 B5 = solve_pairings({a0, a1, a2, a3, a4}, {-1.0, 0.0, 0.0, 0.0, 0.0});
    Vec6 a5 = B5 + 0.5 * inner(B5, B5) * a0;
    Mat6 Ei;
    Ei.col(0) = a0;
    Ei.col(1) = a1;
    Ei.col(2) = a2;
    Ei.col(3) = a3;
    Ei.col(4) = a4;
    Ei.col(5) = a5;
    E.v[i] = Ei;
  }

  auto connection = [&](const NodeField<Mat6>& frame) {
    NodeField<Mat6> Du = d_du(frame), Dv = d_dv(frame);
    std::pair<NodeField<Mat6>, NodeField<Mat6>> a{NodeField<Mat6>(g), NodeField<Mat6>(g)};
    for (int i = 0; i < n; ++i) {
      Mat6 inv = group_inverse(frame.v[i]);
      a.first.v[i] = inv * Du.v[i];
      a.second.v[i] = inv * Dv.v[i];
    }
    return a;
  };

  auto [MU, MV] = connection(E);

  // Remaining gauge, solved pointwise in normalization order.
  ScalarField x0f(g), y1f(g);
  for (int i = 0; i < n; ++i) {
    ComponentPair t1 = comp(MU, MV, i, 3, 0), t2 = comp(MU, MV, i, 2, 1);
    ComponentPair c32 = comp(MU, MV, i, 3, 2);
    Mat2 A;
    A << t1.u, -t2.u, t1.v, -t2.v;
    Vec2 rhs(-c32.u, -c32.v);
    double det = A.determinant();
    if (std::abs(det) < 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()))
      fail(ErrorKind::Degenerate, "canonical_reduction: coframe candidates dependent");
    Vec2 sol = A.inverse() * rhs;
    x0f.v[i] = sol(0);
    y1f.v[i] = sol(1);
  }
  ScalarField dx0u = d_du(x0f), dx0v = d_dv(x0f);
  ScalarField dy1u = d_du(y1f), dy1v = d_dv(y1f);

  NodeField<Mat6> Eprime(g);
  for (int i = 0; i < n; ++i) {
    ComponentPair t1 = comp(MU, MV, i, 3, 0), t2 = comp(MU, MV, i, 2, 1);
    ComponentPair c10 = comp(MU, MV, i, 1, 0), c01 = comp(MU, MV, i, 0, 1);
    ComponentPair c00 = comp(MU, MV, i, 0, 0), c11 = comp(MU, MV, i, 1, 1);
    ComponentPair c02 = comp(MU, MV, i, 0, 2), c13 = comp(MU, MV, i, 1, 3);
    double x0 = x0f.v[i], y1 = y1f.v[i];

    // scalings from alpha_0^1 = alpha_1^2 and alpha_1^0 = alpha_0^3
    Vec2 den1(c10.u - y1 * t1.u, c10.v - y1 * t1.v);
    Vec2 num1(t2.u, t2.v);
    Vec2 den2(c01.u - x0 * t2.u, c01.v - x0 * t2.v);
    Vec2 num2(t1.u, t1.v);
    double rho1 = den1.dot(num1) / den1.squaredNorm();  // lambda / mu^2
    double rho2 = den2.dot(num2) / den2.squaredNorm();  // mu / lambda^2
    if (!std::isfinite(rho1) || !std::isfinite(rho2) || rho1 == 0.0 || rho2 == 0.0)
      fail(ErrorKind::Degenerate, "canonical_reduction: scaling normalization degenerated");
    double lam = real_cbrt(1.0 / (rho1 * rho2 * rho2));
    double mu = real_cbrt(1.0 / (rho2 * rho1 * rho1));

    // translational parameters from alpha_2^0 = 0 and alpha_3^1 = 0
    Eigen::Matrix<double, 4, 3> M;
    Eigen::Matrix<double, 4, 1> b;
    M << c01.u - 0.5 * x0 * t2.u, -0.5 * y1 * t2.u, -t2.u,
         c01.v - 0.5 * x0 * t2.v, -0.5 * y1 * t2.v, -t2.v,
         -0.5 * x0 * t1.u, c10.u - 0.5 * y1 * t1.u, t1.u,
         -0.5 * x0 * t1.v, c10.v - 0.5 * y1 * t1.v, t1.v;
    b << -(c02.u + dx0u.v[i] + x0 * c00.u), -(c02.v + dx0v.v[i] + x0 * c00.v),
        -(c13.u + dy1u.v[i] + y1 * c11.u), -(c13.v + dy1v.v[i] + y1 * c11.v);
    Eigen::Vector3d sol = M.colPivHouseholderQr().solve(b);
    double x1 = sol(0), y0 = sol(1), z = sol(2);

    Mat6 X = Mat6::Zero();
    double bb = 0.5 * (x1 * x1 + y1 * y1);
    double aa = 0.5 * (x0 * x1 + y0 * y1) + z;
    double ap = 0.5 * (x0 * x0 + y0 * y0);
    double bp = 0.5 * (x0 * x1 + y0 * y1) - z;
    X(0, 0) = lam;
    X(1, 1) = mu;
    X(0, 2) = x0;
    X(1, 2) = x1;
    X(2, 2) = 1.0;
    X(0, 3) = y0;
    X(1, 3) = y1;
    X(3, 3) = 1.0;
    X(0, 4) = aa / mu;
    X(1, 4) = bb / mu;
    X(2, 4) = x1 / mu;
    X(3, 4) = y1 / mu;
    X(4, 4) = 1.0 / mu;
    X(0, 5) = ap / lam;
    X(1, 5) = bp / lam;
    X(2, 5) = x0 / lam;
    X(3, 5) = y0 / lam;
    X(5, 5) = 1.0 / lam;
    Eprime.v[i] = E.v[i] * X;
  }

  auto [AU, AV] = connection(Eprime);

  ReductionResult out;
  out.frame = FrameField{g, Eprime, 0, 0};
  out.coframe.a1 = OneForm{ScalarField(g), ScalarField(g)};
  out.coframe.a2 = OneForm{ScalarField(g), ScalarField(g)};
  ScalarField q1(g), q2(g), p1(g), p2(g), r1(g), r2(g);
  out.residual = ScalarField(g);

  for (int i = 0; i < n; ++i) {
    ComponentPair t1 = comp(AU, AV, i, 3, 0), t2 = comp(AU, AV, i, 2, 1);
    out.coframe.a1.P.v[i] = t1.u;
    out.coframe.a1.Q.v[i] = t1.v;
    out.coframe.a2.P.v[i] = t2.u;
    out.coframe.a2.Q.v[i] = t2.v;

    // invariants from the reduced components
    Eigen::Matrix<double, 4, 2> Mq;
    Eigen::Matrix<double, 4, 1> bq;
    ComponentPair c00 = comp(AU, AV, i, 0, 0), c11 = comp(AU, AV, i, 1, 1);
    Mq << -2.0 * t1.u, t2.u, -2.0 * t1.v, t2.v, -t1.u, 2.0 * t2.u, -t1.v, 2.0 * t2.v;
    bq << c00.u, c00.v, c11.u, c11.v;
    Vec2 q = Mq.colPivHouseholderQr().solve(bq);
    q1.v[i] = q(0);
    q2.v[i] = q(1);

    Mat2 Mc;
    Mc << t1.u, t2.u, t1.v, t2.v;
    Mat2 Mci = Mc.inverse();
    ComponentPair c03 = comp(AU, AV, i, 0, 3), c12 = comp(AU, AV, i, 1, 2);
    Vec2 rp = Mci * Vec2(c03.u, c03.v);  // (r1, p2)
    Vec2 pr = Mci * Vec2(c12.u, c12.v);  // (p1, r2)
    r1.v[i] = rp(0);
    p2.v[i] = rp(1);
    p1.v[i] = pr(0);
    r2.v[i] = pr(1);

    // canonical Pfaffian residual, relative to the coframe scale
    double scale = std::max({1.0, std::abs(t1.u), std::abs(t1.v), std::abs(t2.u),
                             std::abs(t2.v)});
    double res = 0.0;
    auto acc = [&](ComponentPair c) { res = std::max({res, std::abs(c.u), std::abs(c.v)}); };
    acc(comp(AU, AV, i, 2, 0));  // alpha_0^2
    acc(comp(AU, AV, i, 3, 1));  // alpha_1^3
    acc(comp(AU, AV, i, 3, 2));  // alpha_2^3
    acc(comp(AU, AV, i, 0, 2));  // alpha_2^0
    acc(comp(AU, AV, i, 1, 3));  // alpha_3^1
    acc(comp(AU, AV, i, 4, 0));  // alpha_0^4
    ComponentPair d1 = comp(AU, AV, i, 1, 0), d2 = comp(AU, AV, i, 0, 1);
    res = std::max({res, std::abs(d1.u - t2.u), std::abs(d1.v - t2.v)});
    res = std::max({res, std::abs(d2.u - t1.u), std::abs(d2.v - t1.v)});
    out.residual.v[i] = res / scale;
  }

  out.coframe.validate();
  out.invariants.q1 = std::move(q1);
  out.invariants.q2 = std::move(q2);
  out.invariants.p1 = std::move(p1);
  out.invariants.p2 = std::move(p2);
  out.invariants.r1 = std::move(r1);
  out.invariants.r2 = std::move(r2);
  out.invariants.provenance = InvariantSet::Provenance::extracted;
  out.max_residual = max_abs_interior(out.residual);
  return out;
}

bool congruent(const InvariantSet& a, const InvariantSet& b, double tol) {
  if (!a.has_r() || !b.has_r()) fail(ErrorKind::Input, "congruent: incomplete invariant sets");
  if (!a.grid().same(b.grid())) fail(ErrorKind::Input, "congruent: grid mismatch");
  auto close = [tol](const ScalarField& x, const ScalarField& y) {
    double scale = std::max({1.0, max_abs(x), max_abs(y)});
    for (size_t i = 0; i < x.v.size(); ++i)
      if (std::abs(x.v[i] - y.v[i]) > tol * scale) return false;
    return true;
  };
  return close(a.q1, b.q1) && close(a.q2, b.q2) && close(a.p1, b.p1) && close(a.p2, b.p2) &&
         close(*a.r1, *b.r1) && close(*a.r2, *b.r2);
}

int contact_order(const LegendreField& f, const LegendreField& ftilde, const FrameField& B,
                  int iu, int iv, double tol_base) {
  const Grid& g = f.grid;
  if (!g.interior(iu, iv)) fail(ErrorKind::Input, "contact_order: node must be interior");
  if (!g.same(ftilde.grid) || !g.same(B.grid)) fail(ErrorKind::Input, "contact_order: grid mismatch");

  // Common normalization: move ftilde(p) to the chart center.
  int ip = g.idx(iu, iv);
  Mat6 Y = group_inverse(complete_frame(ftilde.F0[ip].normalized(), ftilde.F1[ip]));
  const Mat6& Bp = B.A.v[ip];

  // chart coordinates of both maps on the 3x3 stencil; configurations far
  // enough apart to leave the chart have no analytic contact at all
  std::array<std::array<double, 5>, 9> hf{}, hft{};
  try {
    for (int dv = -1; dv <= 1; ++dv)
      for (int du = -1; du <= 1; ++du) {
        int i = g.idx(iu + du, iv + dv);
        int s = (dv + 1) * 3 + (du + 1);
        Vec6 a0 = Y * (Bp * f.F0[i]);
        Vec6 a1 = Y * (Bp * f.F1[i]);
        hf[s] = chart_coordinates(a0, a1);
        Vec6 b0 = Y * ftilde.F0[i];
        Vec6 b1 = Y * ftilde.F1[i];
        hft[s] = chart_coordinates(b0, b1);
      }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Degenerate) return -1;
    throw;
  }

  const double hu = g.hu(), hv = g.hv();
  auto at = [](const std::array<std::array<double, 5>, 9>& h, int du, int dv, int k) {
    return h[(dv + 1) * 3 + (du + 1)][k];
  };

  double diff0 = 0.0, diff1 = 0.0, diff2 = 0.0;
  double mag0 = 0.0, mag1 = 0.0, mag2 = 0.0;
  for (int k = 0; k < 5; ++k) {
    double a = at(hf, 0, 0, k), b = at(hft, 0, 0, k);
    diff0 = std::max(diff0, std::abs(a - b));
    mag0 = std::max({mag0, std::abs(a), std::abs(b)});

    double au = (at(hf, 1, 0, k) - at(hf, -1, 0, k)) / (2 * hu);
    double av = (at(hf, 0, 1, k) - at(hf, 0, -1, k)) / (2 * hv);
    double bu = (at(hft, 1, 0, k) - at(hft, -1, 0, k)) / (2 * hu);
    double bv = (at(hft, 0, 1, k) - at(hft, 0, -1, k)) / (2 * hv);
    diff1 = std::max({diff1, std::abs(au - bu), std::abs(av - bv)});
    mag1 = std::max({mag1, std::abs(au), std::abs(av), std::abs(bu), std::abs(bv)});

    double auu = (at(hf, 1, 0, k) - 2 * at(hf, 0, 0, k) + at(hf, -1, 0, k)) / (hu * hu);
    double avv = (at(hf, 0, 1, k) - 2 * at(hf, 0, 0, k) + at(hf, 0, -1, k)) / (hv * hv);
    double auv = (at(hf, 1, 1, k) - at(hf, 1, -1, k) - at(hf, -1, 1, k) + at(hf, -1, -1, k)) /
                 (4 * hu * hv);
    double buu = (at(hft, 1, 0, k) - 2 * at(hft, 0, 0, k) + at(hft, -1, 0, k)) / (hu * hu);
    double bvv = (at(hft, 0, 1, k) - 2 * at(hft, 0, 0, k) + at(hft, 0, -1, k)) / (hv * hv);
    double buv = (at(hft, 1, 1, k) - at(hft, 1, -1, k) - at(hft, -1, 1, k) + at(hft, -1, -1, k)) /
                 (4 * hu * hv);
    diff2 = std::max({diff2, std::abs(auu - buu), std::abs(avv - bvv), std::abs(auv - buv)});
    mag2 = std::max({mag2, std::abs(auu), std::abs(avv), std::abs(auv), std::abs(buu),
                     std::abs(bvv), std::abs(buv)});
  }

  const double h = std::max(hu, hv);
  double tol0 = tol_base * h * h * std::max(1.0, mag0);
  double tol1 = tol_base * h * std::max(1.0, mag1);
  double tol2 = tol_base * std::max(1.0, mag2);

  if (diff0 > tol0) return -1;
  if (diff1 > tol1) return 0;
  if (diff2 > tol2) return 1;
  return 2;
}

}  // namespace lieform
