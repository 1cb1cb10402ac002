#include "lieform/deformation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "lieform/transport.hpp"

namespace lieform {

SigmaForm sigma(const InvariantSet& inv, const Coframe& cf) {
  if (!inv.grid().same(cf.grid())) fail(ErrorKind::Input, "sigma: grid mismatch");
  SigmaForm out(cf.grid());
  auto fill = [&](NodeField<Mat3>& dst, const ScalarField& a1c, const ScalarField& a2c) {
    for (int i = 0; i < cf.grid().size(); ++i) {
      double a1 = a1c.v[i], a2 = a2c.v[i];
      double q1 = inv.q1.v[i], q2 = inv.q2.v[i], p1 = inv.p1.v[i], p2 = inv.p2.v[i];
      Mat3 S = Mat3::Zero();
      S(0, 0) = -2.0 * (2.0 * q1 * a1 - q2 * a2);
      S(1, 1) = -2.0 * (q1 * a1 - 2.0 * q2 * a2);
      S(2, 2) = -3.0 * (q1 * a1 - q2 * a2);
      S(0, 2) = -a1;
      S(1, 2) = a2;
      S(2, 0) = 2.0 * (p2 - 1.0) * a2;
      S(2, 1) = -2.0 * (p1 - 1.0) * a1;
      dst.v[i] = S;
    }
  };
  fill(out.U, cf.a1.P, cf.a2.P);
  fill(out.V, cf.a1.Q, cf.a2.Q);
  return out;
}

SigmaCurvature sigma_curvature(const SigmaForm& s) {
  SigmaCurvature out;
  NodeField<Mat3> dU = d_dv(s.U), dV = d_du(s.V);
  out.numeric = NodeField<Mat3>(s.grid);
  for (int i = 0; i < s.grid.size(); ++i)
    out.numeric.v[i] = dV.v[i] - dU.v[i] + s.U.v[i] * s.V.v[i] - s.V.v[i] * s.U.v[i];
  return out;
}

SigmaCurvature sigma_curvature(const SigmaForm& s, const InvariantSet& inv, const Coframe& cf) {
  SigmaCurvature out = sigma_curvature(s);
  out.has_closed = true;
  out.closed = NodeField<Mat3>(s.grid, Mat3::Zero());
  DualDerivatives dp1 = dual_derivatives(inv.p1, cf);
  DualDerivatives dp2 = dual_derivatives(inv.p2, cf);
  ScalarField W = cf.wedge();
  for (int i = 0; i < s.grid.size(); ++i) {
    Mat3 C = Mat3::Zero();
    C(2, 0) = 2.0 * dp2.d1.v[i] * W.v[i];
    C(2, 1) = 2.0 * dp1.d2.v[i] * W.v[i];
    C(2, 2) = 3.0 * (inv.p2.v[i] - inv.p1.v[i]) * W.v[i];
    out.closed.v[i] = C;
  }
  double diff = 0.0;
  for (int iv = 1; iv < s.grid.nv - 1; ++iv)
    for (int iu = 1; iu < s.grid.nu - 1; ++iu) {
      int i = s.grid.idx(iu, iv);
      diff = std::max(diff, (out.numeric.v[i] - out.closed.v[i]).cwiseAbs().maxCoeff());
    }
  out.difference = diff;
  return out;
}

namespace {

// Transports of the fundamental solution of dw = -sigma w along both path
// orders from the corner node.
struct Transports {
  NodeField<Mat3> row_first;  // along v = v0, then up the column
  NodeField<Mat3> col_first;  // up u = u0, then along the row
};

Transports transport_pair(const SigmaForm& s, int substeps) {
  const Grid& g = s.grid;
  Transports t{NodeField<Mat3>(g), NodeField<Mat3>(g)};

  auto row_samples = [&](int iv) {
    std::vector<Mat3> out(g.nu);
    for (int iu = 0; iu < g.nu; ++iu) out[iu] = g.hu() * s.U.at(iu, iv);
    return out;
  };
  auto col_samples = [&](int iu) {
    std::vector<Mat3> out(g.nv);
    for (int iv = 0; iv < g.nv; ++iv) out[iv] = g.hv() * s.V.at(iu, iv);
    return out;
  };

  // base row, then columns
  {
    std::vector<Mat3> row0 = row_samples(0);
    Mat3 T = Mat3::Identity();
    t.row_first.at(0, 0) = T;
    for (int iu = 1; iu < g.nu; ++iu) {
      rk4_line(row0, iu - 1, iu, T, false, substeps);
      t.row_first.at(iu, 0) = T;
    }
    for (int iu = 0; iu < g.nu; ++iu) {
      std::vector<Mat3> col = col_samples(iu);
      Mat3 C = t.row_first.at(iu, 0);
      for (int iv = 1; iv < g.nv; ++iv) {
        rk4_line(col, iv - 1, iv, C, false, substeps);
        t.row_first.at(iu, iv) = C;
      }
    }
  }
  // base column, then rows
  {
    std::vector<Mat3> col0 = col_samples(0);
    Mat3 T = Mat3::Identity();
    t.col_first.at(0, 0) = T;
    for (int iv = 1; iv < g.nv; ++iv) {
      rk4_line(col0, iv - 1, iv, T, false, substeps);
      t.col_first.at(0, iv) = T;
    }
    for (int iv = 0; iv < g.nv; ++iv) {
      std::vector<Mat3> row = row_samples(iv);
      Mat3 C = t.col_first.at(0, iv);
      for (int iu = 1; iu < g.nu; ++iu) {
        rk4_line(row, iu - 1, iu, C, false, substeps);
        t.col_first.at(iu, iv) = C;
      }
    }
  }
  return t;
}

}  // namespace

ParallelSpace solve_parallel(const SigmaForm& s) {
  const Grid& g = s.grid;
  const int n = g.size();
  Transports t = transport_pair(s, 2);

  // Path-consistency system: (col_first^{-1} row_first - I) w0 = 0.
  Eigen::MatrixXd M(3 * n, 3);
  for (int i = 0; i < n; ++i) {
    Mat3 R = t.col_first.v[i].partialPivLu().solve(t.row_first.v[i]) - Mat3::Identity();
    M.block<3, 3>(3 * i, 0) = R;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  Eigen::Vector3d sv = svd.singularValues();

  ParallelSpace out;
  out.singular_values = {sv(0), sv(1), sv(2)};
  out.anchor = std::sqrt(static_cast<double>(n));
  out.threshold = 1e-6 * out.anchor;
  int dim = 0;
  for (int k = 0; k < 3; ++k)
    if (sv(k) <= out.threshold) ++dim;
  out.dim = dim;
  double largest_kept = dim > 0 ? sv(3 - dim) : 0.0;
  double smallest_rejected = dim < 3 ? sv(2 - dim) : out.anchor;
  out.gap = largest_kept > 0.0 ? smallest_rejected / largest_kept
                               : smallest_rejected / out.threshold;

  for (int k = 0; k < dim; ++k) {
    Eigen::Vector3d w0 = svd.matrixV().col(2 - k);
    out.initial.push_back(w0);
    Section w{ScalarField(g), ScalarField(g), ScalarField(g)};
    for (int i = 0; i < n; ++i) {
      Eigen::Vector3d wi = t.row_first.v[i] * w0;
      w[0].v[i] = wi(0);
      w[1].v[i] = wi(1);
      w[2].v[i] = wi(2);
    }
    out.residuals.push_back(parallel_residual(s, w));
    out.basis.push_back(std::move(w));
  }
  return out;
}

double parallel_residual(const SigmaForm& s, const Section& w) {
  const Grid& g = s.grid;
  ScalarField du0 = d_du(w[0]), du1 = d_du(w[1]), du2 = d_du(w[2]);
  ScalarField dv0 = d_dv(w[0]), dv1 = d_dv(w[1]), dv2 = d_dv(w[2]);
  double r = 0.0;
  for (int iv = 1; iv < g.nv - 1; ++iv)
    for (int iu = 1; iu < g.nu - 1; ++iu) {
      int i = g.idx(iu, iv);
      Eigen::Vector3d wi(w[0].v[i], w[1].v[i], w[2].v[i]);
      Eigen::Vector3d ru = Eigen::Vector3d(du0.v[i], du1.v[i], du2.v[i]) + s.U.v[i] * wi;
      Eigen::Vector3d rv = Eigen::Vector3d(dv0.v[i], dv1.v[i], dv2.v[i]) + s.V.v[i] * wi;
      r = std::max({r, ru.cwiseAbs().maxCoeff(), rv.cwiseAbs().maxCoeff()});
    }
  return r;
}

Eigen::VectorXd fit_in_span(const ParallelSpace& ps, const Section& w, double* rel_residual) {
  const int n = static_cast<int>(w[0].v.size());
  const int dim = ps.dim;
  Eigen::VectorXd target(3 * n);
  for (int i = 0; i < n; ++i)
    target.segment<3>(3 * i) = Eigen::Vector3d(w[0].v[i], w[1].v[i], w[2].v[i]);
  if (dim == 0) {
    if (rel_residual) *rel_residual = 1.0;
    return Eigen::VectorXd();
  }
  Eigen::MatrixXd B(3 * n, dim);
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < n; ++i)
      B.block<3, 1>(3 * i, k) =
          Eigen::Vector3d(ps.basis[k][0].v[i], ps.basis[k][1].v[i], ps.basis[k][2].v[i]);
  Eigen::VectorXd c = B.colPivHouseholderQr().solve(target);
  if (rel_residual) {
    double denom = target.norm();
    *rel_residual = denom > 0.0 ? (B * c - target).norm() / denom : 0.0;
  }
  return c;
}

namespace {

Mat6 eta_component(double a1, double a2, double w1, double w2) {
  Mat6 m = Mat6::Zero();
  m(0, 3) = w1 * a1;
  m(0, 4) = -w2 * a1 + w1 * a2;
  m(1, 2) = w2 * a2;
  m(1, 5) = w2 * a1 - w1 * a2;
  m(2, 4) = w2 * a2;
  m(3, 5) = w1 * a1;
  return m;
}

}  // namespace

MatrixForm eta(const ScalarField& w1, const ScalarField& w2, const Coframe& cf) {
  MatrixForm out(cf.grid());
  for (int i = 0; i < cf.grid().size(); ++i) {
    out.U.v[i] = eta_component(cf.a1.P.v[i], cf.a2.P.v[i], w1.v[i], w2.v[i]);
    out.V.v[i] = eta_component(cf.a1.Q.v[i], cf.a2.Q.v[i], w1.v[i], w2.v[i]);
  }
  return out;
}

DeltaResult delta(const FrameField& A, const MatrixForm& eta_form, const MatrixForm& alpha) {
  const Grid& g = A.grid;
  DeltaResult out;
  out.delta = MatrixForm(g);
  for (int i = 0; i < g.size(); ++i) {
    Mat6 inv = group_inverse(A.A.v[i]);
    out.delta.U.v[i] = A.A.v[i] * eta_form.U.v[i] * inv;
    out.delta.V.v[i] = A.A.v[i] * eta_form.V.v[i] * inv;
  }
  NodeField<Mat6> ddU = d_dv(out.delta.U), ddV = d_du(out.delta.V);
  NodeField<Mat6> deU = d_dv(eta_form.U), deV = d_du(eta_form.V);
  double dres = 0.0, gres = 0.0;
  for (int iv = 1; iv < g.nv - 1; ++iv)
    for (int iu = 1; iu < g.nu - 1; ++iu) {
      int i = g.idx(iu, iv);
      dres = std::max(dres, (ddV.v[i] - ddU.v[i]).cwiseAbs().maxCoeff());
      Mat6 gauge = deV.v[i] - deU.v[i] + alpha.U.v[i] * eta_form.V.v[i] -
                   alpha.V.v[i] * eta_form.U.v[i] + eta_form.U.v[i] * alpha.V.v[i] -
                   eta_form.V.v[i] * alpha.U.v[i];
      gres = std::max(gres, gauge.cwiseAbs().maxCoeff());
    }
  out.d_delta_residual = dres;
  out.gauge_residual = gres;
  return out;
}

std::string to_string(DeformationClass c) {
  switch (c) {
    case DeformationClass::generic: return "generic";
    case DeformationClass::special: return "special";
    case DeformationClass::mixed: return "mixed";
  }
  return "?";
}

DeformationClass classify_deformation(const Section& w, double tol) {
  double lo = 1e300, hi = 0.0;
  for (size_t i = 0; i < w[0].v.size(); ++i) {
    double p = std::abs(w[0].v[i] * w[1].v[i]);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  double scale = std::max(1.0, hi);
  if (lo > tol * scale) return DeformationClass::generic;
  if (hi < tol * scale) return DeformationClass::special;
  return DeformationClass::mixed;
}

namespace {

struct Extracted {
  Coframe cf;
  InvariantSet inv;  // with r
};

// Reads coframe and invariants from a frame field by finite differences.
Extracted extract_from_frame(const FrameField& F) {
  const Grid& g = F.grid;
  NodeField<Mat6> Du = d_du(F.A), Dv = d_dv(F.A);
  Extracted out;
  out.cf.a1 = OneForm{ScalarField(g), ScalarField(g)};
  out.cf.a2 = OneForm{ScalarField(g), ScalarField(g)};
  ScalarField q1(g), q2(g), p1(g), p2(g), r1(g), r2(g);
  for (int i = 0; i < g.size(); ++i) {
    Mat6 inv6 = group_inverse(F.A.v[i]);
    Mat6 mu = inv6 * Du.v[i];
    Mat6 mv = inv6 * Dv.v[i];
    double t1u = mu(3, 0), t1v = mv(3, 0), t2u = mu(2, 1), t2v = mv(2, 1);
    out.cf.a1.P.v[i] = t1u;
    out.cf.a1.Q.v[i] = t1v;
    out.cf.a2.P.v[i] = t2u;
    out.cf.a2.Q.v[i] = t2v;
    Eigen::Matrix<double, 4, 2> Mq;
    Eigen::Matrix<double, 4, 1> bq;
    Mq << -2.0 * t1u, t2u, -2.0 * t1v, t2v, -t1u, 2.0 * t2u, -t1v, 2.0 * t2v;
    bq << mu(0, 0), mv(0, 0), mu(1, 1), mv(1, 1);
    Vec2 q = Mq.colPivHouseholderQr().solve(bq);
    q1.v[i] = q(0);
    q2.v[i] = q(1);
    Mat2 Mc;
    Mc << t1u, t2u, t1v, t2v;
    Mat2 Mi = Mc.inverse();
    Vec2 rp = Mi * Vec2(mu(0, 3), mv(0, 3));
    Vec2 pr = Mi * Vec2(mu(1, 2), mv(1, 2));
    r1.v[i] = rp(0);
    p2.v[i] = rp(1);
    p1.v[i] = pr(0);
    r2.v[i] = pr(1);
  }
  out.inv.q1 = std::move(q1);
  out.inv.q2 = std::move(q2);
  out.inv.p1 = std::move(p1);
  out.inv.p2 = std::move(p2);
  out.inv.r1 = std::move(r1);
  out.inv.r2 = std::move(r2);
  out.inv.provenance = InvariantSet::Provenance::extracted;
  return out;
}

double field_diff_interior(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  const Grid& g = a.grid;
  for (int iv = 1; iv < g.nv - 1; ++iv)
    for (int iu = 1; iu < g.nu - 1; ++iu)
      m = std::max(m, std::abs(a.at(iu, iv) - b.at(iu, iv)));
  return m;
}

}  // namespace

DeformationResult deform(const InvariantSet& inv, const Coframe& cf, const Section& w,
                         double tol_scale) {
  if (!inv.has_r()) fail(ErrorKind::Degenerate, "deform: r unavailable (invariants incomplete)");
  const Grid& g = cf.grid();

  MatrixForm alpha = assemble_mc(inv, cf);
  MatrixForm eta_form = eta(w[0], w[1], cf);
  // Sign convention fixed by the frame-difference law: the deformed connection
  // is alpha - eta, so the extrinsic invariants shift by -w.
  MatrixForm alpha_t = alpha - eta_form;

  DeformationResult out;
  out.original = inv;
  out.coframe = cf;
  out.A = integrate_frame(alpha, Mat6::Identity());
  out.At = integrate_frame(alpha_t, Mat6::Identity());
  out.D = NodeField<Mat6>(g);
  out.f = LegendreField{g, std::vector<Vec6>(g.size()), std::vector<Vec6>(g.size())};
  out.ft = LegendreField{g, std::vector<Vec6>(g.size()), std::vector<Vec6>(g.size())};
  for (int i = 0; i < g.size(); ++i) {
    out.D.v[i] = out.At.A.v[i] * group_inverse(out.A.A.v[i]);
    out.f.F0[i] = out.A.A.v[i].col(0);
    out.f.F1[i] = out.A.A.v[i].col(1);
    out.ft.F0[i] = out.At.A.v[i].col(0);
    out.ft.F1[i] = out.At.A.v[i].col(1);
  }

  auto& ver = out.verification;
  ver.structure_residual_alpha = max_abs_interior(structure_residual(alpha));
  ver.structure_residual_deformed = max_abs_interior(structure_residual(alpha_t));
  ver.delta_residual = delta(out.A, eta_form, alpha).d_delta_residual;

  Extracted ext = extract_from_frame(out.At);
  out.deformed = ext.inv;
  ver.max_q_error = std::max(field_diff_interior(ext.inv.q1, inv.q1),
                             field_diff_interior(ext.inv.q2, inv.q2));
  ver.max_p_error = std::max(field_diff_interior(ext.inv.p1, inv.p1),
                             field_diff_interior(ext.inv.p2, inv.p2));
  ScalarField r1_law = zip(*inv.r1, w[0], std::minus<double>());
  ScalarField r2_law = zip(*inv.r2, w[1], std::minus<double>());
  ver.max_r_error = std::max(field_diff_interior(*ext.inv.r1, r1_law),
                             field_diff_interior(*ext.inv.r2, r2_law));

  int qu[5] = {1, 1, 2, 3, 3};
  for (int k = 0; k < 5; ++k) {
    int iu = std::clamp(qu[k] * (g.nu - 1) / 4, 1, g.nu - 2);
    int iv = std::clamp(qu[4 - k] * (g.nv - 1) / 4, 1, g.nv - 2);
    ver.contact_orders.push_back(contact_order(out.f, out.ft, FrameField{g, out.D, 0, 0}, iu, iv));
  }
  ver.congruent_to_original = congruent(inv, out.deformed, 1e-3);

  // Tolerances: second-order small relative to the data scale.
  double h2 = std::max(g.hu(), g.hv());
  h2 *= h2;
  double alpha_scale = 1.0, r_scale = 1.0;
  for (int i = 0; i < g.size(); ++i)
    alpha_scale = std::max({alpha_scale, alpha.U.v[i].cwiseAbs().maxCoeff(),
                            alpha.V.v[i].cwiseAbs().maxCoeff()});
  r_scale = std::max({1.0, max_abs(*inv.r1), max_abs(*inv.r2)});
  double struct_tol = tol_scale * 500.0 * h2 * alpha_scale;
  double law_tol = tol_scale * 500.0 * h2 * r_scale;

  std::ostringstream report;
  bool ok = true;
  if (ver.structure_residual_deformed > struct_tol) {
    ok = false;
    report << "deformed structure residual " << ver.structure_residual_deformed << " > "
           << struct_tol << "; ";
  }
  if (ver.max_q_error > law_tol || ver.max_p_error > law_tol || ver.max_r_error > law_tol) {
    ok = false;
    report << "invariant laws violated (q " << ver.max_q_error << ", p " << ver.max_p_error
           << ", r " << ver.max_r_error << " vs " << law_tol << "); ";
  }
  for (int k : ver.contact_orders)
    if (k != 2) {
      ok = false;
      report << "contact order " << k << " at a sample node; ";
      break;
    }
  if (!ok) fail(ErrorKind::Verification, "deform: verification failed: " + report.str());
  return out;
}

}  // namespace lieform
