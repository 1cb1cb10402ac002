#pragma once

#include <array>
#include <vector>

#include "lieform/types.hpp"

namespace lieform {

inline constexpr double kDefaultTol = 1e-9;

/// The constant symmetric form of signature (4,2) on R^6:
/// <X,Y> = -(x0 y5 + x5 y0) - (x1 y4 + x4 y1) + x2 y2 + x3 y3.
/// Single source of truth for all sign conventions.
const Mat6& metric();

double inner(const Vec6& x, const Vec6& y);

/// max-norm of tA g A - g; zero iff A preserves the form.
double group_residual(const Mat6& A);

/// max-norm of tB g + gB; zero iff B is in the Lie algebra.
double algebra_residual(const Mat6& B);

/// Exact inverse for group elements: A^{-1} = g^{-1} tA g.
Mat6 group_inverse(const Mat6& A);

/// Projects an arbitrary matrix onto the algebra: (X - g^{-1} tX g)/2.
Mat6 algebra_project(const Mat6& X);

/// Matrix exponential by scaling-and-squaring on a truncated series.
Mat6 expm(const Mat6& B);

/// An isotropic 2-plane spanned by an ordered pair of null vectors.
struct LegendreElement {
  Vec6 F0, F1;
};

/// max of |<F0,F0>|, |<F0,F1>|, |<F1,F1>| (absolute).
double isotropy_residual(const LegendreElement& e);

/// Throws Degenerate unless both vectors are null, orthogonal, and independent.
void validate_legendre(const LegendreElement& e, double tol = kDefaultTol);

/// The affine chart of the space of Legendre elements centered at [e0 ^ e1]:
///   X0(y) = (1, 0, y1, y2, y3, (y1^2+y2^2)/2)
///   X1(y) = (0, 1, y4, y5, (y4^2+y5^2)/2, y1 y4 + y2 y5 - y3)
LegendreElement lambda_chart(const std::array<double, 5>& y);

/// Inverts lambda_chart on the span of (V0, V1). Throws Degenerate when the
/// plane falls outside the chart (top 2x2 coordinate block singular).
std::array<double, 5> chart_coordinates(const Vec6& V0, const Vec6& V1);

/// True iff the two elements span the same 2-plane (principal angles < tol).
/// Throws on rank-deficient input.
bool plane_equal(const LegendreElement& p, const LegendreElement& q, double tol = kDefaultTol);

/// Completes a Legendre element to a frame A with positive determinant,
/// A0 = F0, A1 = F1 and <A_I, A_J> = g_IJ.
Mat6 complete_frame(const Vec6& F0, const Vec6& F1);

/// Least-norm x with <x, with[i]> = rhs[i] for all i.
Vec6 solve_pairings(const std::vector<Vec6>& with, const std::vector<double>& rhs);

}  // namespace lieform
