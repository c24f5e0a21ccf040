#include "beamstring/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beamstring/quadrature.hpp"

namespace beamstring {

LiftedPair boundary_lifting(const PhysicalParams& p, double d3, double d4) {
  if (!(p.a1 > 0.0) || !(p.a2 > 0.0) || !(p.l > 0.0))
    throw std::invalid_argument("boundary_lifting: a1, a2, l must be positive");
  LiftedPair lp;
  // g(y) = -d3 (3 l y^2 - y^3) / (6 a1)
  const double s = -d3 / (6.0 * p.a1);
  lp.g = Polynomial({0.0, 0.0, 3.0 * p.l * s, -s});
  // h(y) = d4 y / a2
  lp.h = Polynomial({0.0, d4 / p.a2});
  return lp;
}

double LiftingResiduals::max_residual() const {
  return std::max({interior_beam, interior_string, clamp_w, clamp_wy,
                   anchor_phi, moment, shear, tension});
}

LiftingResiduals check_lifting_identities(const PhysicalParams& p, double d3,
                                          double d4) {
  const LiftedPair lp = boundary_lifting(p, d3, d4);
  const Polynomial g1 = lp.g.derivative();
  const Polynomial g2 = g1.derivative();
  const Polynomial g3 = g2.derivative();
  const Polynomial g4 = g3.derivative();
  const Polynomial h1 = lp.h.derivative();
  const Polynomial h2 = h1.derivative();

  LiftingResiduals r;
  r.interior_beam = p.a1 * g4.max_abs_coeff();
  r.interior_string = p.a2 * h2.max_abs_coeff();
  r.clamp_w = std::abs(lp.g(0.0));
  r.clamp_wy = std::abs(g1(0.0));
  r.anchor_phi = std::abs(lp.h(0.0));
  r.moment = std::abs(p.a1 * g2(p.l));
  r.shear = std::abs(p.a1 * g3(p.l) - d3);
  r.tension = std::abs(p.a2 * h1(p.l) - d4);
  return r;
}

double lifting_norm_sq(const PhysicalParams& p, double d3, double d4) {
  const double l = p.l;
  return d3 * d3 * l * l * l / (3.0 * p.a1) + d4 * d4 * l / p.a2;
}

double lifting_norm_sq_quadrature(const PhysicalParams& p, double d3,
                                  double d4) {
  const LiftedPair lp = boundary_lifting(p, d3, d4);
  const Polynomial g2 = lp.g.derivative().derivative();
  const Polynomial h1 = lp.h.derivative();
  QuadratureRule rule(p.l, 4, 8);
  const double gg = rule.integrate([&](double y) { return g2(y) * g2(y); });
  const double hh = rule.integrate([&](double y) { return h1(y) * h1(y); });
  return p.a1 * gg + p.a2 * hh;
}

double lifting_operator_norm(const PhysicalParams& p) {
  const double l = p.l;
  return std::sqrt(l * std::max(l * l / (3.0 * p.a1), 1.0 / p.a2));
}

double lifting_operator_norm_gridsearch(const PhysicalParams& p, int n) {
  if (n < 4) throw std::invalid_argument("lifting_operator_norm_gridsearch: n >= 4");
  const int m = (n / 4) * 4;  // keep both axes on the grid
  double best = 0.0;
  for (int i = 0; i < m; ++i) {
    const double th = 2.0 * 3.14159265358979323846 * i / m;
    best = std::max(best, lifting_norm_sq(p, std::cos(th), std::sin(th)));
  }
  return std::sqrt(best);
}

}  // namespace beamstring
