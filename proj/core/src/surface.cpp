#include "lieform/surface.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace lieform {

SurfacePatch SurfacePatch::sampled(const Grid& g, const std::vector<Vec3>& positions) {
  if (static_cast<int>(positions.size()) != g.size())
    fail(ErrorKind::Input, "surface patch: sample count does not match grid");
  return {g, positions, std::nullopt};
}

SurfacePatch SurfacePatch::analytic(const Grid& g, SurfaceEvaluator eval) {
  SurfacePatch p;
  p.grid = g;
  p.F.resize(g.size());
  for (int iv = 0; iv < g.nv; ++iv)
    for (int iu = 0; iu < g.nu; ++iu) p.F[g.idx(iu, iv)] = eval(g.u(iu), g.v(iv)).F;
  p.source = std::move(eval);
  return p;
}

namespace {

struct Derivatives {
  NodeField<Vec3> Fu, Fv, Fuu, Fuv, Fvv;
};

Derivatives patch_derivatives(const SurfacePatch& S) {
  Derivatives d;
  const Grid& g = S.grid;
  if (S.source) {
    d.Fu = NodeField<Vec3>(g);
    d.Fv = NodeField<Vec3>(g);
    d.Fuu = NodeField<Vec3>(g);
    d.Fuv = NodeField<Vec3>(g);
    d.Fvv = NodeField<Vec3>(g);
    for (int iv = 0; iv < g.nv; ++iv)
      for (int iu = 0; iu < g.nu; ++iu) {
        SurfaceJet j = (*S.source)(g.u(iu), g.v(iv));
        d.Fu.at(iu, iv) = j.Fu;
        d.Fv.at(iu, iv) = j.Fv;
        d.Fuu.at(iu, iv) = j.Fuu;
        d.Fuv.at(iu, iv) = j.Fuv;
        d.Fvv.at(iu, iv) = j.Fvv;
      }
  } else {
    NodeField<Vec3> F(g);
    F.v = S.F;
    d.Fu = d_du(F);
    d.Fv = d_dv(F);
    d.Fuu = d_du(d.Fu);
    d.Fuv = d_dv(d.Fu);
    d.Fvv = d_dv(d.Fv);
  }
  return d;
}

}  // namespace

CurvatureData curvature_data(const SurfacePatch& S, double tol) {
  const Grid& g = S.grid;
  Derivatives d = patch_derivatives(S);

  CurvatureData C{g, std::vector<Vec3>(g.size()), ScalarField(g), ScalarField(g), ScalarField(g),
                  ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
  for (int i = 0; i < g.size(); ++i) {
    const Vec3 &fu = d.Fu.v[i], &fv = d.Fv.v[i];
    Vec3 w = fu.cross(fv);
    double wn = w.norm();
    if (wn < 1e-12 * std::max(1.0, fu.norm() * fv.norm()))
      fail(ErrorKind::Degenerate, "curvature_data: immersion fails (F_u x F_v = 0)");
    Vec3 n = w / wn;
    C.n[i] = n;
    C.e.v[i] = fu.dot(fu);
    C.f.v[i] = fu.dot(fv);
    C.g.v[i] = fv.dot(fv);
    C.L.v[i] = n.dot(d.Fuu.v[i]);
    C.M.v[i] = n.dot(d.Fuv.v[i]);
    C.N.v[i] = n.dot(d.Fvv.v[i]);
    C.k1.v[i] = C.L.v[i] / C.e.v[i];
    C.k2.v[i] = C.N.v[i] / C.g.v[i];
  }

  double scale = std::max({max_abs(C.e), max_abs(C.g), max_abs(C.L), max_abs(C.N)});
  for (int iv = 1; iv < g.nv - 1; ++iv)
    for (int iu = 1; iu < g.nu - 1; ++iu) {
      int i = g.idx(iu, iv);
      if (std::abs(C.f.v[i]) > tol * scale || std::abs(C.M.v[i]) > tol * scale) {
        std::ostringstream os;
        os << "curvature_data: coordinates are not curvature-line at node (" << iu << "," << iv
           << "): |f| = " << std::abs(C.f.v[i]) << ", |M| = " << std::abs(C.M.v[i]);
        fail(ErrorKind::Degenerate, os.str());
      }
    }
  return C;
}

SurfacePatch parallel_surface(const SurfacePatch& S, double t) {
  CurvatureData C = curvature_data(S);
  const Grid& g = S.grid;
  SurfacePatch out;
  out.grid = g;
  out.F.resize(g.size());
  for (int i = 0; i < g.size(); ++i) out.F[i] = S.F[i] + t * C.n[i];

  // immersion check on the shifted samples
  NodeField<Vec3> F(g);
  F.v = out.F;
  NodeField<Vec3> Fu = d_du(F), Fv = d_dv(F);
  for (int iv = 1; iv < g.nv - 1; ++iv)
    for (int iu = 1; iu < g.nu - 1; ++iu) {
      int i = g.idx(iu, iv);
      double cn = Fu.v[i].cross(Fv.v[i]).norm();
      if (cn < 1e-8 * std::max(1.0, Fu.v[i].norm() * Fv.v[i].norm())) {
        std::ostringstream os;
        os << "parallel_surface: shift t = " << t << " hits a focal value at node (" << iu << ","
           << iv << "); focal distances 1/k are " << 1.0 / C.k1.v[i] << " and " << 1.0 / C.k2.v[i];
        fail(ErrorKind::Degenerate, os.str());
      }
    }
  return out;
}

LegendreField legendre_lift(const SurfacePatch& S, const CurvatureData& C) {
  const Grid& g = S.grid;
  LegendreField out{g, std::vector<Vec6>(g.size()), std::vector<Vec6>(g.size())};
  const double is2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < g.size(); ++i) {
    const Vec3& F = S.F[i];
    const Vec3& n = C.n[i];
    Vec6 F0, F1;
    F0 << 1.0, is2 * F(0), F(1), F(2), -is2 * F(0), 0.5 * F.dot(F);
    F1 << 0.0, 0.5 * (1.0 + n(0)), is2 * n(1), is2 * n(2), 0.5 * (1.0 - n(0)), is2 * n.dot(F);
    out.F0[i] = F0;
    out.F1[i] = F1;
  }
  return out;
}

double contact_residual(const LegendreField& f) {
  const Grid& g = f.grid;
  double r = 0.0;
  for (int iv = 1; iv < g.nv - 1; ++iv)
    for (int iu = 1; iu < g.nu - 1; ++iu) {
      Vec6 du = (f.F0[g.idx(iu + 1, iv)] - f.F0[g.idx(iu - 1, iv)]) / (2.0 * g.hu());
      Vec6 dv = (f.F0[g.idx(iu, iv + 1)] - f.F0[g.idx(iu, iv - 1)]) / (2.0 * g.hv());
      const Vec6& F1 = f.F1[g.idx(iu, iv)];
      r = std::max(r, std::abs(inner(du, F1)));
      r = std::max(r, std::abs(inner(dv, F1)));
    }
  return r;
}

namespace {

double umbilic_scale(const CurvatureData& C, int i) {
  return std::max({std::abs(C.k1.v[i]), std::abs(C.k2.v[i]), 1.0});
}

}  // namespace

BetaGamma beta_gamma(const CurvatureData& C) {
  const Grid& g = C.grid;
  ScalarField k1u = d_du(C.k1), k2v = d_dv(C.k2);
  BetaGamma out{ScalarField(g), ScalarField(g)};
  for (int i = 0; i < g.size(); ++i) {
    double dk = C.k1.v[i] - C.k2.v[i];
    if (std::abs(dk) < 1e-6 * umbilic_scale(C, i)) {
      std::ostringstream os;
      os << "beta_gamma: umbilic node at index " << i << " (k1 = " << C.k1.v[i]
         << ", k2 = " << C.k2.v[i] << ")";
      fail(ErrorKind::Degenerate, os.str());
    }
    double ratio = std::sqrt(C.e.v[i] / C.g.v[i]);
    out.beta.v[i] = k1u.v[i] * ratio / dk;
    out.gamma.v[i] = -k2v.v[i] / (ratio * dk);
  }
  return out;
}

std::pair<ScalarField, ScalarField> q_from_betagamma(const BetaGamma& bg, const Grid& grid) {
  ScalarField bu = d_du(bg.beta), bv = d_dv(bg.beta);
  ScalarField gu = d_du(bg.gamma), gv = d_dv(bg.gamma);
  ScalarField q1(grid), q2(grid);
  for (int i = 0; i < grid.size(); ++i) {
    double b = bg.beta.v[i], c = bg.gamma.v[i];
    double b2c = real_cbrt(b * b * c), bc2 = real_cbrt(b * c * c);
    q1.v[i] = -(2.0 * bv.v[i] + (b / c) * gv.v[i]) / (3.0 * b2c * b2c);
    q2.v[i] = ((c / b) * bu.v[i] + 2.0 * gu.v[i]) / (3.0 * bc2 * bc2);
  }
  return {q1, q2};
}

std::string to_string(NodeLabel l) {
  switch (l) {
    case NodeLabel::nondegenerate: return "nondegenerate";
    case NodeLabel::umbilic: return "umbilic";
    case NodeLabel::canal_beta: return "canal-beta";
    case NodeLabel::canal_gamma: return "canal-gamma";
    case NodeLabel::dupin: return "dupin";
  }
  return "?";
}

ClassificationReport classify(const CurvatureData& C) {
  const Grid& g = C.grid;
  ScalarField k1u = d_du(C.k1), k2v = d_dv(C.k2);

  // beta/gamma with guarded division; umbilic nodes get their own label.
  std::vector<double> beta(g.size(), 0.0), gamma(g.size(), 0.0);
  std::vector<bool> umb(g.size(), false);
  for (int i = 0; i < g.size(); ++i) {
    double dk = C.k1.v[i] - C.k2.v[i];
    if (std::abs(dk) < 1e-6 * umbilic_scale(C, i)) {
      umb[i] = true;
      continue;
    }
    double ratio = std::sqrt(C.e.v[i] / C.g.v[i]);
    beta[i] = k1u.v[i] * ratio / dk;
    gamma[i] = -k2v.v[i] / (ratio * dk);
  }

  // Degeneracy scale: median over nodes of max(|beta|,|gamma|), floored at 1.
  std::vector<double> mags;
  mags.reserve(g.size());
  for (int i = 0; i < g.size(); ++i)
    if (!umb[i]) mags.push_back(std::max(std::abs(beta[i]), std::abs(gamma[i])));
  double scale = 1.0;
  if (!mags.empty()) {
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    scale = std::max(1.0, mags[mags.size() / 2]);
  }
  const double thr = 1e-6 * scale;

  ClassificationReport rep;
  rep.labels.resize(g.size());
  auto severity = [](NodeLabel l) {
    switch (l) {
      case NodeLabel::nondegenerate: return 0;
      case NodeLabel::canal_beta: return 1;
      case NodeLabel::canal_gamma: return 1;
      case NodeLabel::dupin: return 2;
      case NodeLabel::umbilic: return 3;
    }
    return 0;
  };
  for (int i = 0; i < g.size(); ++i) {
    NodeLabel l;
    if (umb[i])
      l = NodeLabel::umbilic;
    else {
      bool b0 = std::abs(beta[i]) < thr, g0 = std::abs(gamma[i]) < thr;
      l = b0 && g0 ? NodeLabel::dupin
          : b0     ? NodeLabel::canal_beta
          : g0     ? NodeLabel::canal_gamma
                   : NodeLabel::nondegenerate;
    }
    rep.labels[i] = l;
    if (severity(l) > severity(rep.verdict)) rep.verdict = l;
  }
  for (int i = 0; i < g.size(); ++i)
    if (rep.labels[i] == rep.verdict && rep.verdict != NodeLabel::nondegenerate)
      rep.offending.push_back(i);
  return rep;
}

ClassificationReport classify(const SurfacePatch& S) { return classify(curvature_data(S)); }

Coframe euclidean_coframe(const CurvatureData& C) {
  ClassificationReport rep = classify(C);
  if (!rep.nondegenerate())
    fail(ErrorKind::Degenerate,
         "euclidean_coframe: degenerate patch (verdict: " + to_string(rep.verdict) + ", " +
             std::to_string(rep.offending.size()) + " offending nodes)");
  BetaGamma bg = beta_gamma(C);
  const Grid& g = C.grid;
  Coframe cf;
  cf.a1 = OneForm{ScalarField(g), ScalarField(g)};
  cf.a2 = OneForm{ScalarField(g), ScalarField(g)};
  for (int i = 0; i < g.size(); ++i) {
    double b = bg.beta.v[i], c = bg.gamma.v[i];
    cf.a1.Q.v[i] = real_cbrt(b * c * c);  // a1 along dv
    cf.a2.P.v[i] = real_cbrt(b * b * c);  // a2 along du
  }
  cf.validate();
  return cf;
}

CurvatureSpheres curvature_spheres(const SurfacePatch& S, const CurvatureData& C,
                                   const LegendreField& lift) {
  const Grid& g = S.grid;
  for (int i = 0; i < g.size(); ++i) {
    if (std::abs(C.k1.v[i] - C.k2.v[i]) < 1e-6 * umbilic_scale(C, i))
      fail(ErrorKind::Degenerate, "curvature_spheres: umbilic node at index " + std::to_string(i));
  }

  NodeField<Vec6> F0(g), F1(g);
  F0.v = lift.F0;
  F1.v = lift.F1;
  NodeField<Vec6> F0u = d_du(F0), F0v = d_dv(F0), F1u = d_du(F1), F1v = d_dv(F1);

  CurvatureSpheres out;
  out.grid = g;
  out.K1.resize(g.size());
  out.K2.resize(g.size());
  out.t1.resize(g.size());
  out.t2.resize(g.size());
  out.rank_deficient1.assign(g.size(), false);
  out.rank_deficient2.assign(g.size(), false);

  auto pencil = [&](const Vec6& f0, const Vec6& f1, const Vec6& d0, const Vec6& d1, Vec6& K,
                    ExtReal& t) {
    // Euclidean projector onto the complement of span{f0, f1}.
    Eigen::Matrix<double, 6, 2> span;
    span.col(0) = f0;
    span.col(1) = f1;
    Eigen::HouseholderQR<Eigen::Matrix<double, 6, 2>> qr(span);
    Eigen::Matrix<double, 6, 2> U = qr.householderQ() * Eigen::Matrix<double, 6, 2>::Identity();
    auto project = [&U](const Vec6& x) -> Vec6 { return x - U * (U.transpose() * x); };
    Eigen::Matrix<double, 6, 2> B;
    B.col(0) = project(d0);
    B.col(1) = project(d1);
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 2>> svd(B, Eigen::ComputeFullV);
    double smax = svd.singularValues()(0);
    double scale = std::max(1.0, d0.norm() + d1.norm());
    if (smax < 1e-10 * scale)
      fail(ErrorKind::Numerical, "curvature_spheres: rank solve ill-conditioned");
    Vec2 c = svd.matrixV().col(1);
    K = (c(0) * f0 + c(1) * f1).normalized();
    if (std::abs(c(0)) < 1e-8 * std::abs(c(1)))
      t = {0.0, true};
    else
      t = {c(1) / c(0), false};
  };

  for (int iv = 0; iv < g.nv; ++iv)
    for (int iu = 0; iu < g.nu; ++iu) {
      int i = g.idx(iu, iv);
      pencil(lift.F0[i], lift.F1[i], F0u.v[i], F1u.v[i], out.K1[i], out.t1[i]);
      pencil(lift.F0[i], lift.F1[i], F0v.v[i], F1v.v[i], out.K2[i], out.t2[i]);
      // sign continuity along the scan
      const Vec6* prev = nullptr;
      if (iu > 0)
        prev = &out.K1[g.idx(iu - 1, iv)];
      else if (iv > 0)
        prev = &out.K1[g.idx(iu, iv - 1)];
      if (prev && out.K1[i].dot(*prev) < 0.0) out.K1[i] = -out.K1[i];
      const Vec6* prev2 = nullptr;
      if (iu > 0)
        prev2 = &out.K2[g.idx(iu - 1, iv)];
      else if (iv > 0)
        prev2 = &out.K2[g.idx(iu, iv - 1)];
      if (prev2 && out.K2[i].dot(*prev2) < 0.0) out.K2[i] = -out.K2[i];
    }

  // Rank of the sphere maps: dK mod span{K} must be 2 for an immersion.
  NodeField<Vec6> K1f(g), K2f(g);
  K1f.v = out.K1;
  K2f.v = out.K2;
  NodeField<Vec6> K1u = d_du(K1f), K1v = d_dv(K1f), K2u = d_du(K2f), K2v = d_dv(K2f);
  auto rank_ok = [](const Vec6& K, const Vec6& du, const Vec6& dv) {
    Eigen::Matrix<double, 6, 2> D;
    D.col(0) = du - K.dot(du) * K;
    D.col(1) = dv - K.dot(dv) * K;
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 2>> svd(D);
    return svd.singularValues()(1) > 1e-6 * std::max(1.0, svd.singularValues()(0));
  };
  for (int i = 0; i < g.size(); ++i) {
    if (!rank_ok(out.K1[i], K1u.v[i], K1v.v[i])) {
      out.rank_deficient1[i] = true;
      ++out.rank_flags1;
    }
    if (!rank_ok(out.K2[i], K2u.v[i], K2v.v[i])) {
      out.rank_deficient2[i] = true;
      ++out.rank_flags2;
    }
  }
  return out;
}

}  // namespace lieform
