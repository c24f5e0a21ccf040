#include "beamstring/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace beamstring {

void gauss_legendre_reference(int n, std::vector<double>& nodes,
                              std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_reference: n < 1");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess for the i-th positive root of P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate P_n(x) and P'_n(x) by the three-term recurrence.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

QuadratureRule::QuadratureRule(double length, int panels, int points_per_panel)
    : length_(length) {
  if (!(length > 0.0))
    throw std::invalid_argument("QuadratureRule: length must be positive");
  if (panels < 1 || points_per_panel < 1)
    throw std::invalid_argument("QuadratureRule: need >= 1 panel and point");
  std::vector<double> xr, wr;
  gauss_legendre_reference(points_per_panel, xr, wr);
  const double h = length / panels;
  nodes_.reserve(static_cast<std::size_t>(panels) * xr.size());
  weights_.reserve(nodes_.capacity());
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (std::size_t q = 0; q < xr.size(); ++q) {
      nodes_.push_back(mid + 0.5 * h * xr[q]);
      weights_.push_back(0.5 * h * wr[q]);
    }
  }
}

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  double acc = 0.0;
  for (std::size_t q = 0; q < nodes_.size(); ++q) acc += weights_[q] * f(nodes_[q]);
  return acc;
}

}  // namespace beamstring
