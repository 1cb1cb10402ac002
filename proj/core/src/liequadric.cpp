#include "lieform/liequadric.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace lieform {

const Mat6& metric() {
  static const Mat6 g = [] {
    Mat6 m = Mat6::Zero();
    m(0, 5) = m(5, 0) = -1.0;
    m(1, 4) = m(4, 1) = -1.0;
    m(2, 2) = m(3, 3) = 1.0;
    return m;
  }();
  return g;
}

double inner(const Vec6& x, const Vec6& y) {
  return -(x(0) * y(5) + x(5) * y(0)) - (x(1) * y(4) + x(4) * y(1)) + x(2) * y(2) + x(3) * y(3);
}

double group_residual(const Mat6& A) {
  const Mat6& g = metric();
  return (A.transpose() * g * A - g).cwiseAbs().maxCoeff();
}

double algebra_residual(const Mat6& B) {
  const Mat6& g = metric();
  return (B.transpose() * g + g * B).cwiseAbs().maxCoeff();
}

Mat6 group_inverse(const Mat6& A) {
  const Mat6& g = metric();
  // g^{-1} = g for this basis (g is an involution).
  return g * A.transpose() * g;
}

Mat6 algebra_project(const Mat6& X) {
  const Mat6& g = metric();
  return 0.5 * (X - g * X.transpose() * g);
}

Mat6 expm(const Mat6& B) {
  double norm = B.cwiseAbs().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }
  Mat6 S = B * scale;
  Mat6 term = Mat6::Identity();
  Mat6 sum = Mat6::Identity();
  for (int k = 1; k <= 20; ++k) {
    term = term * S / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

double isotropy_residual(const LegendreElement& e) {
  double r = std::abs(inner(e.F0, e.F0));
  r = std::max(r, std::abs(inner(e.F0, e.F1)));
  r = std::max(r, std::abs(inner(e.F1, e.F1)));
  return r;
}

void validate_legendre(const LegendreElement& e, double tol) {
  double scale = std::max({1.0, e.F0.squaredNorm(), e.F1.squaredNorm()});
  if (isotropy_residual(e) > tol * scale)
    fail(ErrorKind::Degenerate, "legendre element: span is not isotropic");
  Eigen::Matrix<double, 6, 2> m;
  m.col(0) = e.F0;
  m.col(1) = e.F1;
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 2>> svd(m);
  if (svd.singularValues()(1) < tol * std::max(1.0, svd.singularValues()(0)))
    fail(ErrorKind::Degenerate, "legendre element: spanning vectors are dependent");
}

LegendreElement lambda_chart(const std::array<double, 5>& y) {
  LegendreElement e;
  e.F0 << 1.0, 0.0, y[0], y[1], y[2], 0.5 * (y[0] * y[0] + y[1] * y[1]);
  e.F1 << 0.0, 1.0, y[3], y[4], 0.5 * (y[3] * y[3] + y[4] * y[4]),
      y[0] * y[3] + y[1] * y[4] - y[2];
  return e;
}

std::array<double, 5> chart_coordinates(const Vec6& V0, const Vec6& V1) {
  Mat2 top;
  top << V0(0), V1(0), V0(1), V1(1);
  double det = top(0, 0) * top(1, 1) - top(0, 1) * top(1, 0);
  double scale = std::max({1.0, V0.cwiseAbs().maxCoeff(), V1.cwiseAbs().maxCoeff()});
  if (std::abs(det) < 1e-12 * scale * scale)
    fail(ErrorKind::Degenerate, "chart_coordinates: plane outside the chart domain");
  // combination with leading block ((1,0),(0,1))
  Mat2 inv = top.inverse();
  Vec6 W0 = V0 * inv(0, 0) + V1 * inv(1, 0);
  Vec6 W1 = V0 * inv(0, 1) + V1 * inv(1, 1);
  return {W0(2), W0(3), W0(4), W1(2), W1(3)};
}

bool plane_equal(const LegendreElement& p, const LegendreElement& q, double tol) {
  auto orthonormal = [](const LegendreElement& e) {
    Eigen::Matrix<double, 6, 2> m;
    m.col(0) = e.F0;
    m.col(1) = e.F1;
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 2>> svd(m, Eigen::ComputeFullU);
    if (svd.singularValues()(1) < 1e-12 * std::max(1.0, svd.singularValues()(0)))
      fail(ErrorKind::Degenerate, "plane_equal: degenerate input (rank < 2)");
    return Eigen::Matrix<double, 6, 2>(svd.matrixU().leftCols<2>());
  };
  // Euclidean projectors; the invariant form is degenerate on isotropic planes.
  Eigen::Matrix<double, 6, 2> up = orthonormal(p), uq = orthonormal(q);
  Mat6 diff = up * up.transpose() - uq * uq.transpose();
  return diff.cwiseAbs().maxCoeff() < tol;
}

Vec6 solve_pairings(const std::vector<Vec6>& with, const std::vector<double>& rhs) {
  const Mat6& g = metric();
  Eigen::MatrixXd C(with.size(), 6);
  Eigen::VectorXd b(rhs.size());
  for (size_t i = 0; i < with.size(); ++i) {
    C.row(i) = (g * with[i]).transpose();
    b(i) = rhs[i];
  }
  return C.completeOrthogonalDecomposition().solve(b);
}

Mat6 complete_frame(const Vec6& F0, const Vec6& F1) {
  const Mat6& g = metric();

  // A4: <A4,F1> = -1, <A4,F0> = 0, then shift by F1 to make it null.
  Vec6 B4 = solve_pairings({F1, F0}, {-1.0, 0.0});
  Vec6 A4 = B4 + 0.5 * inner(B4, B4) * F1;

  // A5: <A5,F0> = -1, <A5,F1> = 0, <A5,A4> = 0, then shift by F0.
  Vec6 B5 = solve_pairings({F0, F1, A4}, {-1.0, 0.0, 0.0});
  Vec6 A5 = B5 + 0.5 * inner(B5, B5) * F0;

  // Spacelike pair spanning the g-orthogonal complement of {F0,F1,A4,A5}.
  Eigen::Matrix<double, 4, 6> C;
  C.row(0) = (g * F0).transpose();
  C.row(1) = (g * F1).transpose();
  C.row(2) = (g * A4).transpose();
  C.row(3) = (g * A5).transpose();
  Eigen::JacobiSVD<Eigen::Matrix<double, 4, 6>> svd(C, Eigen::ComputeFullV);
  Vec6 w2 = svd.matrixV().col(4);
  Vec6 w3 = svd.matrixV().col(5);
  double n2 = inner(w2, w2);
  if (n2 <= 0.0) fail(ErrorKind::Numerical, "complete_frame: complement not spacelike");
  Vec6 A2 = w2 / std::sqrt(n2);
  Vec6 m3 = w3 - inner(w3, A2) * A2;
  double n3 = inner(m3, m3);
  if (n3 <= 0.0) fail(ErrorKind::Numerical, "complete_frame: complement not spacelike");
  Vec6 A3 = m3 / std::sqrt(n3);

  Mat6 A;
  A.col(0) = F0;
  A.col(1) = F1;
  A.col(2) = A2;
  A.col(3) = A3;
  A.col(4) = A4;
  A.col(5) = A5;
  if (A.determinant() < 0.0) A.col(3) = -A3;
  return A;
}

}  // namespace lieform
