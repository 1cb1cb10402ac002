#pragma once

#include "lieform/coframe.hpp"
#include "lieform/liequadric.hpp"
#include "lieform/surface.hpp"

namespace lieform {

/// A g-algebra-valued 1-form U du + V dv sampled per node.
struct MatrixForm {
  Grid grid;
  NodeField<Mat6> U, V;

  MatrixForm() = default;
  explicit MatrixForm(const Grid& g) : grid(g), U(g, Mat6::Zero()), V(g, Mat6::Zero()) {}
};

MatrixForm operator+(const MatrixForm& a, const MatrixForm& b);
MatrixForm operator-(const MatrixForm& a, const MatrixForm& b);

/// Builds the full Maurer-Cartan form of the canonical frame from the coframe
/// and the invariant functions (r required). Every evaluation lies exactly in
/// the algebra; the canonical zero pattern holds by construction.
MatrixForm assemble_mc(const InvariantSet& inv, const Coframe& cf);

/// Per-node max-norm of the du^dv coefficient of d(alpha) + alpha ^ alpha.
ScalarField structure_residual(const MatrixForm& alpha);

struct FrameField {
  Grid grid;
  NodeField<Mat6> A;
  int base_iu = 0, base_iv = 0;
};

/// Integrates dA = A alpha by RK4 along the base row, then up each column.
/// Coefficients between nodes come from cubic interpolation of the samples.
/// Throws Numerical when the group residual drifts above `drift_tol`.
FrameField integrate_frame(const MatrixForm& alpha, const Mat6& A0, int base_iu = 0,
                           int base_iv = 0, double drift_tol = 1e-6);

struct ReductionResult {
  FrameField frame;
  Coframe coframe;
  InvariantSet invariants;      // q, p, r read off the reduced form
  double max_residual = 0.0;    // worst violation of the canonical Pfaffian system
  ScalarField residual;         // per-node violation
};

/// Canonical frame of a nondegenerate Legendre field: extends the lift to a
/// frame field and gauges it until the canonical Pfaffian conditions hold to
/// discretization order. Returns the reduced frame, coframe, and invariants.
ReductionResult canonical_reduction(const LegendreField& lift);

/// True iff all six invariant fields agree within tol (relative to field
/// scale) on the shared grid. Both sets must carry r.
bool congruent(const InvariantSet& a, const InvariantSet& b, double tol = kDefaultTol);

/// Highest k in {0,1,2} such that f-tilde and B(p) f have the same discrete
/// k-jets at node p after passing both through the chart centered at
/// f-tilde(p); -1 when even the 0-jets differ. Node must be interior.
int contact_order(const LegendreField& f, const LegendreField& ftilde, const FrameField& B,
                  int iu, int iv, double tol_base = 5e-2);

}  // namespace lieform
