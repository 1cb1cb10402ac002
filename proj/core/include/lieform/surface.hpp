#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lieform/coframe.hpp"
#include "lieform/liequadric.hpp"

namespace lieform {

/// Position and partial derivatives through third order at one parameter point.
struct SurfaceJet {
  Vec3 F, Fu, Fv, Fuu, Fuv, Fvv, Fuuu, Fuuv, Fuvv, Fvvv;
};

using SurfaceEvaluator = std::function<SurfaceJet(double, double)>;

struct SurfacePatch {
  Grid grid;
  std::vector<Vec3> F;
  std::optional<SurfaceEvaluator> source;

  static SurfacePatch sampled(const Grid& g, const std::vector<Vec3>& positions);
  static SurfacePatch analytic(const Grid& g, SurfaceEvaluator eval);
};

/// First/second fundamental forms in curvature-line coordinates and the
/// principal curvatures (k1 along u, k2 along v).
struct CurvatureData {
  Grid grid;
  std::vector<Vec3> n;
  ScalarField e, f, g, L, M, N, k1, k2;
};

CurvatureData curvature_data(const SurfacePatch& S, double tol = 1e-6);

/// Normal shift F + t n; the caller re-checks immersion through curvature_data.
SurfacePatch parallel_surface(const SurfacePatch& S, double t);

struct LegendreField {
  Grid grid;
  std::vector<Vec6> F0, F1;

  LegendreElement at(int iu, int iv) const {
    return {F0[grid.idx(iu, iv)], F1[grid.idx(iu, iv)]};
  }
};

/// Contact lift of an oriented surface: per node a null orthogonal pair
/// spanning the contact element. F1 is normalized so that the pair is exactly
/// isotropic and the pairing <dF0, F1> reduces to (n . dF)/sqrt(2).
LegendreField legendre_lift(const SurfacePatch& S, const CurvatureData& C);

/// max over interior nodes of |<dF0, F1>| by central differences (both
/// parameter directions); second-order small for genuine lifts.
double contact_residual(const LegendreField& f);

struct BetaGamma {
  ScalarField beta, gamma;
};

/// beta = (k1-k2)^-1 sqrt(e/g) (k1)_u, gamma = (k2-k1)^-1 sqrt(g/e) (k2)_v,
/// with central-difference curvature derivatives. Throws on umbilic nodes.
BetaGamma beta_gamma(const CurvatureData& C);

std::pair<ScalarField, ScalarField> q_from_betagamma(const BetaGamma& bg, const Grid& grid);

enum class NodeLabel { nondegenerate, umbilic, canal_beta, canal_gamma, dupin };

struct ClassificationReport {
  std::vector<NodeLabel> labels;
  NodeLabel verdict = NodeLabel::nondegenerate;
  std::vector<int> offending;  // node indices with verdict-grade labels

  bool nondegenerate() const { return verdict == NodeLabel::nondegenerate; }
};

std::string to_string(NodeLabel l);

ClassificationReport classify(const CurvatureData& C);
ClassificationReport classify(const SurfacePatch& S);

/// Canonical coframe from Euclidean data: a1 = cbrt(beta gamma^2) dv,
/// a2 = cbrt(beta^2 gamma) du. Throws with the classification verdict when
/// the patch is degenerate.
Coframe euclidean_coframe(const CurvatureData& C);

/// Pencil members stationary along each principal direction. The pencil
/// coefficients (c0, c1) with K = c0 F0 + c1 F1 are solved projectively;
/// t = c1/c0 is reported as an extended real (infinite when K is the tangent
/// plane member).
struct CurvatureSpheres {
  Grid grid;
  std::vector<Vec6> K1, K2;
  std::vector<ExtReal> t1, t2;
  std::vector<bool> rank_deficient1, rank_deficient2;  // dK_i mod K_i below rank 2
  int rank_flags1 = 0, rank_flags2 = 0;
};

CurvatureSpheres curvature_spheres(const SurfacePatch& S, const CurvatureData& C,
                                   const LegendreField& lift);

}  // namespace lieform
