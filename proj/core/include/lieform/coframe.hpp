#pragma once

#include <array>
#include <optional>
#include <utility>

#include "lieform/fields.hpp"

namespace lieform {

/// A 1-form P du + Q dv sampled on a grid.
struct OneForm {
  ScalarField P, Q;

  OneForm() = default;
  OneForm(ScalarField p, ScalarField q) : P(std::move(p)), Q(std::move(q)) {}
  const Grid& grid() const { return P.grid; }
};

OneForm operator+(const OneForm& a, const OneForm& b);
OneForm operator-(const OneForm& a, const OneForm& b);
OneForm operator*(double s, const OneForm& a);
OneForm operator*(const ScalarField& s, const OneForm& a);

/// du/dv-coefficient pair of a coframe, stored against the coordinate basis.
/// No du/dv convention is baked in; `orientation` records the sign of the
/// wedge coefficient (+1 when a1 ^ a2 is positively oriented against du ^ dv).
struct Coframe {
  OneForm a1, a2;
  int orientation = +1;

  const Grid& grid() const { return a1.grid(); }
  ScalarField wedge() const;  // P1 Q2 - Q1 P2 against du ^ dv

  /// Evaluate on a tangent vector (xu, xv) at a node.
  double eval1(int iu, int iv, double xu, double xv) const {
    return a1.P.at(iu, iv) * xu + a1.Q.at(iu, iv) * xv;
  }
  double eval2(int iu, int iv, double xu, double xv) const {
    return a2.P.at(iu, iv) * xu + a2.Q.at(iu, iv) * xv;
  }

  /// Throws Degenerate when the wedge coefficient vanishes or changes sign;
  /// fixes `orientation` to the common sign.
  void validate();
};

/// du ^ dv coefficient of d(omega) = (Q_u - P_v) du ^ dv.
ScalarField exterior_d(const OneForm& w);

/// Coefficients of dg against the coframe: dg = d1 * a1 + d2 * a2.
struct DualDerivatives {
  ScalarField d1, d2;
};
DualDerivatives dual_derivatives(const ScalarField& gfield, const Coframe& cf);

/// The complete local invariants of a surface in this geometry. q and p are
/// determined by the coframe; r is extrinsic and optional.
struct InvariantSet {
  ScalarField q1, q2, p1, p2;
  std::optional<ScalarField> r1, r2;
  enum class Provenance { extracted, supplied } provenance = Provenance::supplied;

  bool has_r() const { return r1.has_value() && r2.has_value(); }
  const Grid& grid() const { return q1.grid; }
};

std::pair<ScalarField, ScalarField> extract_q(const Coframe& cf);
std::pair<ScalarField, ScalarField> extract_p(const Coframe& cf, const ScalarField& q1,
                                              const ScalarField& q2);
InvariantSet extract_invariants(const Coframe& cf);

/// Left-minus-right du^dv coefficients of the three compatibility equations
/// tying (r1, r2) to the coframe data. Requires r.
std::array<ScalarField, 3> codazzi_residual(const InvariantSet& inv, const Coframe& cf);

/// The 3-web cut by a1 = 0, a2 = 0, a1 - a2 = 0.
struct WebData {
  OneForm zeta;           // connection form -q1 a1 + q2 a2
  ScalarField curvature;  // (p2 - p1)/3
  double identity_residual = 0.0;  // max | d(zeta)/W - curvature | on interior nodes
  bool diagonally_cyclidic = false;
};
WebData web(const Coframe& cf, const ScalarField& q1, const ScalarField& q2);

/// Extended real line for the cubic/quadratic quotient.
struct ExtReal {
  double value = 0.0;
  bool infinite = false;

  bool agrees(const ExtReal& o, double tol) const {
    if (infinite || o.infinite) return infinite == o.infinite;
    return std::abs(value - o.value) <= tol * std::max(1.0, std::abs(value));
  }
};

/// Pointwise evaluators of the quadratic form, cubic form, and their quotient.
struct FormPack {
  Coframe cf;

  double phi(int iu, int iv, double xu, double xv) const;   // -a1(X) a2(X)
  double psi(int iu, int iv, double xu, double xv) const;   // -a1(X)^3 + a2(X)^3
  ExtReal quotient(int iu, int iv, double xu, double xv) const;
};
FormPack form_pack(const Coframe& cf);

/// Canonical data is defined up to a sign pair and, under orientation
/// reversal of the surface, an index swap. These transforms relabel the
/// invariants exactly:
///   flip: (a1, a2) -> (-a1, -a2), q -> -q, p and r unchanged
///   swap: (a1, a2) -> (a2, a1), q -> (-q2, -q1), p -> (p2, p1), r -> (r2, r1)
Coframe flip_coframe(const Coframe& cf);
Coframe swap_coframe(const Coframe& cf);
InvariantSet flip_invariants(const InvariantSet& inv);
InvariantSet swap_invariants(const InvariantSet& inv);

struct RepresentativeMatch {
  bool swapped = false, flipped = false;
  double distance = 0.0;  // max-abs coframe component difference after transform
};

/// Best of the four representative choices bringing `candidate` onto
/// `reference`, by coframe component distance.
RepresentativeMatch best_representative(const Coframe& reference, const Coframe& candidate);

Coframe apply_representative(const Coframe& cf, const RepresentativeMatch& m);
InvariantSet apply_representative(const InvariantSet& inv, const RepresentativeMatch& m);

}  // namespace lieform
