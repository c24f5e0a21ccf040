#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace beamstring {

/// Gauss–Legendre quadrature rule on [0, length], assembled from `panels`
/// equal subintervals with `points_per_panel` nodes each.
///
/// A composite rule with p points per panel integrates polynomials of degree
/// 2p−1 exactly on each panel; the default (16 points) is far beyond any
/// polynomial integrand in this project, and the panel count is scaled with
/// the mode count so transcendental integrands (products of beam modes)
/// resolve to ~1e−14 relative error.
class QuadratureRule {
 public:
  QuadratureRule(double length, int panels, int points_per_panel);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }
  double length() const { return length_; }

  /// ∫₀ᴸ f(y) dy with this rule.
  double integrate(const std::function<double(double)>& f) const;

 private:
  double length_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Nodes/weights of the n-point Gauss–Legendre rule on [-1, 1]
/// (Newton iteration on Legendre polynomials, accurate to round-off).
void gauss_legendre_reference(int n, std::vector<double>& nodes,
                              std::vector<double>& weights);

}  // namespace beamstring
