#pragma once

#include "beamstring/model.hpp"
#include "beamstring/polynomial.hpp"

namespace beamstring {

/// Static lifting of the boundary inputs: displacement profiles (g, h) with
///   a1 g'''' = 0,  g(0) = g'(0) = 0,  a1 g''(l) = 0,  (a1 g'')'(l) = d3,
///   a2 h''  = 0,  h(0) = 0,          (a2 h')(l) = d4,
/// so that subtracting (g, 0, h, 0) from the state homogenizes the boundary.
/// Closed form: g(y) = -d3 y^2 (3l - y) / (6 a1),  h(y) = d4 y / a2.
struct LiftedPair {
  Polynomial g;  ///< beam displacement profile (cubic)
  Polynomial h;  ///< string displacement profile (linear)
};

LiftedPair boundary_lifting(const PhysicalParams& p, double d3, double d4);

/// Residuals of all defining identities, computed by exact differentiation
/// of the polynomial coefficients (interior residuals are coefficient norms,
/// boundary residuals are trace evaluations).  Everything is zero up to
/// floating-point rounding.
struct LiftingResiduals {
  double interior_beam = 0;    ///< max coefficient of a1 g''''
  double interior_string = 0;  ///< max coefficient of a2 h''
  double clamp_w = 0;          ///< |g(0)|
  double clamp_wy = 0;         ///< |g'(0)|
  double anchor_phi = 0;       ///< |h(0)|
  double moment = 0;           ///< |a1 g''(l)|
  double shear = 0;            ///< |(a1 g'')'(l) - d3|
  double tension = 0;          ///< |(a2 h')(l) - d4|

  double max_residual() const;
};

LiftingResiduals check_lifting_identities(const PhysicalParams& p, double d3,
                                          double d4);

/// Squared state-space norm of the lifted pair,
///   ||(g,0,h,0)||^2 = a1 ||g''||^2 + a2 ||h'||^2
///                   = d3^2 l^3/(3 a1) + d4^2 l/a2   (closed form).
double lifting_norm_sq(const PhysicalParams& p, double d3, double d4);

/// Same quantity by Gauss–Legendre quadrature of the profile derivatives
/// (exact for polynomials; cross-checks the closed form).
double lifting_norm_sq_quadrature(const PhysicalParams& p, double d3, double d4);

/// Operator norm of (d3,d4) -> (g,0,h,0) from Euclidean R^2 to the state
/// space: sqrt(l * max(l^2/(3 a1), 1/a2)).
double lifting_operator_norm(const PhysicalParams& p);

/// Operator norm by maximizing over a direction grid that includes both axes
/// (cross-checks the closed form).
double lifting_operator_norm_gridsearch(const PhysicalParams& p, int n = 720);

}  // namespace beamstring
