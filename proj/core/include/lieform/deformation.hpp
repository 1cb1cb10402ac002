#pragma once

#include <array>
#include <string>
#include <vector>

#include "lieform/frames.hpp"

namespace lieform {

/// gl(3)-valued connection form S_u du + S_v dv on the trivial R^3 bundle.
struct SigmaForm {
  Grid grid;
  NodeField<Mat3> U, V;

  SigmaForm() = default;
  explicit SigmaForm(const Grid& g) : grid(g), U(g, Mat3::Zero()), V(g, Mat3::Zero()) {}
};

/// Builds the connection whose parallel sections encode the infinitesimal
/// deformations. Needs q and p only.
SigmaForm sigma(const InvariantSet& inv, const Coframe& cf);

struct SigmaCurvature {
  NodeField<Mat3> numeric;           // du^dv coefficient of d(sigma) + sigma ^ sigma
  NodeField<Mat3> closed;            // row-3 closed form, when invariants supplied
  bool has_closed = false;
  double difference = 0.0;           // max |numeric - closed| on interior nodes
};

SigmaCurvature sigma_curvature(const SigmaForm& s);
SigmaCurvature sigma_curvature(const SigmaForm& s, const InvariantSet& inv, const Coframe& cf);

using Section = std::array<ScalarField, 3>;

struct ParallelSpace {
  int dim = 0;
  std::vector<Section> basis;             // propagated parallel sections
  std::vector<Eigen::Vector3d> initial;   // initial vectors at the base node
  std::array<double, 3> singular_values{};  // of the holonomy consistency system
  double anchor = 0.0;                    // scale a unit relative mismatch would produce
  double threshold = 0.0;
  double gap = 0.0;                       // separation between kept and rejected directions
  std::vector<double> residuals;          // per basis section: max |dw + sigma w| (interior)
};

/// Decides deformability: transports the 3x3 fundamental solution along both
/// path orders, assembles the path-consistency system on the initial vector,
/// and thresholds its singular values. dim is always in [0, 3].
ParallelSpace solve_parallel(const SigmaForm& s);

/// max over interior nodes of |dw + sigma w| by central differences.
double parallel_residual(const SigmaForm& s, const Section& w);

/// Least-squares coefficients expressing w in the solved basis; writes the
/// relative fit residual |basis c - w| / |w| when requested.
Eigen::VectorXd fit_in_span(const ParallelSpace& ps, const Section& w,
                            double* rel_residual = nullptr);

/// The infinitesimal-deformation 1-form of a section's (w1, w2) components.
/// Values lie in the abelian subalgebra annihilating e0 and e1.
MatrixForm eta(const ScalarField& w1, const ScalarField& w2, const Coframe& cf);

struct DeltaResult {
  MatrixForm delta;               // A eta A^{-1} per node
  double d_delta_residual = 0.0;  // max-norm of d(delta), interior nodes
  double gauge_residual = 0.0;    // max-norm of d(eta) + alpha^eta + eta^alpha
};

/// Closedness test of the gauged deformation form; the discriminator between
/// parallel and non-parallel sections.
DeltaResult delta(const FrameField& A, const MatrixForm& eta_form, const MatrixForm& alpha);

enum class DeformationClass { generic, special, mixed };
std::string to_string(DeformationClass c);

DeformationClass classify_deformation(const Section& w, double tol = 1e-9);

struct DeformationResult {
  InvariantSet original, deformed;
  Coframe coframe;
  FrameField A, At;
  LegendreField f, ft;
  NodeField<Mat6> D;  // At * A^{-1}

  struct Verification {
    double structure_residual_alpha = 0.0;
    double structure_residual_deformed = 0.0;
    double delta_residual = 0.0;
    double max_q_error = 0.0, max_p_error = 0.0, max_r_error = 0.0;  // re-extracted laws
    std::vector<int> contact_orders;                                 // at 5 interior samples
    bool congruent_to_original = true;
  } verification;
};

/// Synthesizes the deformed surface for a parallel section w: integrates the
/// original and deformed frames from a shared base value, forms D = At A^{-1},
/// and verifies the invariant laws (q, p unchanged; r shifted by -w),
/// structure closure, and second-order contact. Throws Verification when a
/// check fails its tolerance (see the report in the message).
DeformationResult deform(const InvariantSet& inv, const Coframe& cf, const Section& w,
                         double tol_scale = 1.0);

}  // namespace lieform
