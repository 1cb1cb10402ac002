#pragma once

#include <string>
#include <vector>

#include "lieform/deformation.hpp"
#include "lieform/expression.hpp"
#include "lieform/surface.hpp"

namespace lieform::catalog {

// ---------------------------------------------------------------- surfaces

SurfacePatch enneper(const Grid& g);
SurfacePatch torus(double R, double r, const Grid& g);
SurfacePatch sphere(double R, const Grid& g);
SurfacePatch plane(const Grid& g);

/// Surface of revolution (u is the rotation angle): profile (rho(v), z(v))
/// given as expressions in v with exact derivatives.
SurfacePatch revolution(const Expr& rho, const Expr& z, const Grid& g);
/// Named profiles: "catenary", "parabola", "cylinder".
SurfacePatch revolution(const std::string& profile, const Grid& g);

// ------------------------------------------------- conformal-net coframes

struct IsothermicSpec {
  Expr psi;  // log of the potential
  enum class Mode { isothermic, l_isothermic } mode = Mode::isothermic;
};

/// Canonical coframe of the net's contact lift; requires psi_u psi_v != 0.
Coframe isothermic_coframe(const IsothermicSpec& spec, const Grid& g);

/// Residual field of the mode's compatibility equation on phi = exp(psi):
/// fourth-order mixed derivatives by nested central stencils.
ScalarField compat_residual(const IsothermicSpec& spec, const Grid& g);

struct AlphaPhi {
  OneForm form;
  ScalarField d_residual;   // exterior-derivative coefficient
  double max_residual = 0;  // interior max; small exactly when the equation holds
};
AlphaPhi alpha_phi(const IsothermicSpec& spec, const Grid& g);

// ------------------------------------------------------ deformation forms

struct GenericCandidate {
  Coframe cf;
  Section w;            // printed closed-form candidate section
  double residual = 0;  // max |dw + sigma w|; diagnostic, not asserted
  DeformationClass cls = DeformationClass::generic;
};
/// Normal-form coframe of a generic deformation and its candidate section.
GenericCandidate generic_candidate(const Expr& psi, const Grid& g);

struct SpecialData {
  Coframe cf;
  ScalarField p2;            // extracted; the family's defining identity is p2 = 1
  double p2_deviation = 0;   // max |p2 - 1| on interior nodes
  Section w;                 // (psi^{-2/3}, 0, solved w3) candidate
  DeformationClass cls = DeformationClass::special;
};
SpecialData special_coframe(const Expr& psi, const Grid& g);

// ------------------------------------------------------- flat-web family

struct FlatWebSpec {
  double c = 0.0;
  Expr lambda, mu;  // monotone functions of u and of v
};

/// One-variable table with exact derivatives on the grid line.
struct Monotone1D {
  std::vector<double> value, d1, d2, d3;
};
Monotone1D tabulate_u(const Expr& f, const Grid& g);
Monotone1D tabulate_v(const Expr& f, const Grid& g);

/// Integrates (dl/dt)^3 = P(l) with the real cube root from l(t0) = lam0 over
/// n uniform nodes. Stops at a branch point (sign change of P); n_valid marks
/// the usable prefix.
struct PolynomialLambda {
  Monotone1D table;
  int n_valid = 0;
  bool branch_stop = false;
};
PolynomialLambda polynomial_lambda(const std::vector<double>& P, double lam0, double t0, double t1,
                                   int n);

struct CandidateSection {
  std::string name;
  Section w;
  double residual = 0;  // max |dw + sigma w|
};

enum class FlatWebRMode { automatic, none, integrate };

struct FlatWebOptions {
  FlatWebRMode r_mode = FlatWebRMode::automatic;
  // expressions for the connection coefficients behind r, validated against
  // the family's linear system when supplied
  std::optional<Expr> A_expr, B_expr;
  double A0 = 1.0, B0 = 1.0, R0 = 0.0;  // initial values for the integrate mode
  bool attach_solver = true;
};

struct FlatWebData {
  Coframe cf;
  InvariantSet inv;  // q exact, p = c; r present when constructible
  ScalarField psi;
  ScalarField liouville_residual;  // finite-difference
  double liouville_max = 0;
  std::vector<CandidateSection> candidates;
  ParallelSpace solver;
  bool has_solver = false;
  std::string r_source;  // "closed-form" | "expressions" | "integrated" | "none"
};

FlatWebData flatweb(const FlatWebSpec& spec, const Grid& g, const FlatWebOptions& opt = {});
FlatWebData flatweb(double c, const Monotone1D& lambda, const Monotone1D& mu, const Grid& g,
                    const FlatWebOptions& opt = {});

// ------------------------------------------------------------ other data

/// Coframe (du, dv) with q = 0, p = 1: the flat model whose parallel space is
/// spanned by (1,0,0), (0,1,0), (u,-v,1).
Coframe constant_coframe(const Grid& g);

/// Smooth seeded pseudo-random coframe close to (du, dv); generic data whose
/// connection has no parallel sections.
Coframe random_coframe(const Grid& g, unsigned seed);

}  // namespace lieform::catalog
