#include <doctest.h>

#include <cmath>
#include <random>

#include "beamstring/lifting.hpp"
#include "beamstring/model.hpp"

using namespace beamstring;

TEST_CASE("lifted pair satisfies its defining identities to round-off") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coeff(0.2, 5.0);
  std::uniform_real_distribution<double> len(0.2, 2.5);
  std::uniform_real_distribution<double> input(-4.0, 4.0);
  for (int rep = 0; rep < 20; ++rep) {
    PhysicalParams p;
    p.a1 = coeff(rng);
    p.a2 = coeff(rng);
    p.l = len(rng);
    const double d3 = input(rng), d4 = input(rng);
    const LiftingResiduals r = check_lifting_identities(p, d3, d4);
    CHECK(r.max_residual() < 1e-12);
    CHECK(r.interior_beam < 1e-12);
    CHECK(r.interior_string < 1e-12);
    CHECK(r.shear < 1e-12);
    CHECK(r.tension < 1e-12);
  }
}

TEST_CASE("lifted elements take the expected closed forms") {
  PhysicalParams p;
  p.a1 = 2.0;
  p.a2 = 5.0;
  p.l = 1.5;
  const LiftedPair lp = boundary_lifting(p, 3.0, -2.0);
  // g solves a1 g'''' = 0 with g(0)=g'(0)=0, a1 g''(l)=0, (a1 g'')'(l)=d3:
  // a cubic with curvature vanishing at the tip.
  CHECK(lp.g(0.0) == doctest::Approx(0.0));
  CHECK(lp.g.derivative()(0.0) == doctest::Approx(0.0));
  const Polynomial gpp = lp.g.derivative().derivative();
  CHECK(p.a1 * gpp(p.l) == doctest::Approx(0.0));
  CHECK(p.a1 * gpp.derivative()(p.l) == doctest::Approx(3.0));
  // h is linear: a2 h'(y) = d4.
  CHECK(lp.h.degree() == 1);
  CHECK(p.a2 * lp.h.derivative()(0.7) == doctest::Approx(-2.0));
}

TEST_CASE("graph norm: closed form equals quadrature") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.3, 3.0);
  for (int rep = 0; rep < 10; ++rep) {
    PhysicalParams p;
    p.a1 = U(rng);
    p.a2 = U(rng);
    p.l = U(rng);
    const double d3 = U(rng) - 1.5, d4 = U(rng) - 1.5;
    const double closed = lifting_norm_sq(p, d3, d4);
    const double quad = lifting_norm_sq_quadrature(p, d3, d4);
    CHECK(closed == doctest::Approx(quad).epsilon(1e-12));
    CHECK(closed ==
          doctest::Approx(d3 * d3 * std::pow(p.l, 3.0) / (3.0 * p.a1) +
                          d4 * d4 * p.l / p.a2).epsilon(1e-14));
  }
}

TEST_CASE("operator norm: closed form, grid search, published value") {
  CHECK(lifting_operator_norm(section4_scenario().params) ==
        doctest::Approx(0.4472135954999579).epsilon(1e-15));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.3, 3.0);
  for (int rep = 0; rep < 8; ++rep) {
    PhysicalParams p;
    p.a1 = U(rng);
    p.a2 = U(rng);
    p.l = U(rng);
    const double closed = lifting_operator_norm(p);
    const double grid = lifting_operator_norm_gridsearch(p);
    CHECK(closed == doctest::Approx(grid).epsilon(1e-10));
    // Consistency: ||T(d)||² <= ||T||² |d|² on random inputs.
    for (int k = 0; k < 5; ++k) {
      const double d3 = U(rng) - 1.5, d4 = U(rng) - 1.5;
      CHECK(lifting_norm_sq(p, d3, d4) <=
            closed * closed * (d3 * d3 + d4 * d4) + 1e-12);
    }
  }
}
