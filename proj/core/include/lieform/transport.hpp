#pragma once

#include <vector>

#include "lieform/fields.hpp"

namespace lieform {

/// RK4 transport of dX/ds = X * C(s) (right_mul) or dX/ds = -C(s) X along a
/// sampled line of coefficients, from node `from` to node `to` in node units.
/// Off-node coefficients come from cubic interpolation of the samples, so the
/// step retains fourth-order accuracy.
template <class MatT>
void rk4_line(const std::vector<MatT>& samples, int from, int to, MatT& state, bool right_mul,
              int substeps = 1) {
  int dir = to > from ? 1 : -1;
  auto deriv = [&](const MatT& X, const MatT& C) -> MatT {
    return right_mul ? MatT(X * C) : MatT(-C * X);
  };
  for (int i = from; i != to; i += dir) {
    for (int s = 0; s < substeps; ++s) {
      double a = i + dir * (static_cast<double>(s) / substeps);
      double h = static_cast<double>(dir) / substeps;
      MatT c1 = interp_line(samples, a);
      MatT c2 = interp_line(samples, a + 0.5 * h);
      MatT c4 = interp_line(samples, a + h);
      MatT k1 = deriv(state, c1);
      MatT k2 = deriv(state + 0.5 * h * k1, c2);
      MatT k3 = deriv(state + 0.5 * h * k2, c2);
      MatT k4 = deriv(state + h * k3, c4);
      state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
}

}  // namespace lieform
