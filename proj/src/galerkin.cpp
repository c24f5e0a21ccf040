#include "beamstring/galerkin.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace beamstring {

namespace {

// Roots of cos(x)·cosh(x) = −1 (clamped-free Euler–Bernoulli frequencies).
// Solved as f(x) = cos(x) + sech(x) = 0, which stays O(1) for large x.
double cantilever_root(int i) {
  double x = (i == 1) ? 1.875 : (2.0 * i - 1.0) * M_PI / 2.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double sech = 1.0 / std::cosh(x);
    const double f = std::cos(x) + sech;
    const double fp = -std::sin(x) - sech * std::tanh(x);
    const double dx = f / fp;
    x -= dx;
    if (std::abs(dx) < 1e-15 * x) break;
  }
  return x;
}

// σ_i and the cancellation-safe 1−σ_i = (sin x − cos x − e^{−x})/(sinh x + sin x).
void cantilever_sigma(double x, double& sigma, double& one_minus_sigma) {
  const double denom = std::sinh(x) + std::sin(x);
  one_minus_sigma = (std::sin(x) - std::cos(x) - std::exp(-x)) / denom;
  sigma = 1.0 - one_minus_sigma;
}

}  // namespace

double Basis::beam_value(int i, double y) const {
  if (beam_kind == BeamBasisKind::Polynomial)
    return std::pow(y / l, i + 2);  // i is 0-based: shapes (y/l)^2, (y/l)^3, ...
  const double b = beam_beta[static_cast<std::size_t>(i)];
  const double s = beam_sigma[static_cast<std::size_t>(i)];
  const double A = beam_A[static_cast<std::size_t>(i)], B = 0.5 * (1.0 + s);
  const double x = b * y;
  return beam_scale[static_cast<std::size_t>(i)] *
         (A * std::exp(x) + B * std::exp(-x) - std::cos(x) + s * std::sin(x));
}

double Basis::beam_d1(int i, double y) const {
  if (beam_kind == BeamBasisKind::Polynomial) {
    const int p = i + 2;
    return p * std::pow(y / l, p - 1) / l;
  }
  const double b = beam_beta[static_cast<std::size_t>(i)];
  const double s = beam_sigma[static_cast<std::size_t>(i)];
  const double A = beam_A[static_cast<std::size_t>(i)], B = 0.5 * (1.0 + s);
  const double x = b * y;
  return beam_scale[static_cast<std::size_t>(i)] * b *
         (A * std::exp(x) - B * std::exp(-x) + std::sin(x) + s * std::cos(x));
}

double Basis::beam_d2(int i, double y) const {
  if (beam_kind == BeamBasisKind::Polynomial) {
    const int p = i + 2;
    return p * (p - 1) * std::pow(y / l, p - 2) / (l * l);
  }
  const double b = beam_beta[static_cast<std::size_t>(i)];
  const double s = beam_sigma[static_cast<std::size_t>(i)];
  const double A = beam_A[static_cast<std::size_t>(i)], B = 0.5 * (1.0 + s);
  const double x = b * y;
  return beam_scale[static_cast<std::size_t>(i)] * b * b *
         (A * std::exp(x) + B * std::exp(-x) + std::cos(x) - s * std::sin(x));
}

double Basis::string_value(int j, double y) const {
  return std::sin((j + 0.5) * M_PI * y / l);  // j is 0-based: (j+1/2)π y/l
}

double Basis::string_d1(int j, double y) const {
  const double k = (j + 0.5) * M_PI / l;
  return k * std::cos(k * y);
}

Basis build_basis(int n_w, int n_phi, double l, BeamBasisKind kind, int sup_grid) {
  if (n_w < 1 || n_phi < 1)
    throw std::invalid_argument("build_basis: mode counts must be positive");
  if (!(l > 0.0)) throw std::invalid_argument("build_basis: length must be positive");
  if (sup_grid < 2) throw std::invalid_argument("build_basis: sup_grid must be >= 2");

  Basis b;
  b.n_w = n_w;
  b.n_phi = n_phi;
  b.l = l;
  b.beam_kind = kind;

  if (kind == BeamBasisKind::CantileverModes) {
    b.beam_beta.resize(static_cast<std::size_t>(n_w));
    b.beam_sigma.resize(static_cast<std::size_t>(n_w));
    b.beam_A.resize(static_cast<std::size_t>(n_w));
    b.beam_scale.assign(static_cast<std::size_t>(n_w), 1.0);
    for (int i = 0; i < n_w; ++i) {
      const double x = cantilever_root(i + 1);
      double sigma, oms;
      cantilever_sigma(x, sigma, oms);
      b.beam_beta[static_cast<std::size_t>(i)] = x / l;
      b.beam_sigma[static_cast<std::size_t>(i)] = sigma;
      b.beam_A[static_cast<std::size_t>(i)] = 0.5 * oms;
    }
  }

  // Quadrature grid: enough panels that products of the highest modes
  // (≈ 2·n oscillations) are resolved to round-off.
  const int panels = std::max(8, 2 * std::max(n_w, n_phi));
  const QuadratureRule quad(l, panels, 16);
  b.qy = quad.nodes();
  b.qw = quad.weights();
  const int nq = static_cast<int>(b.qy.size());

  // Normalize cantilever modes to unit L² norm before caching values.
  if (kind == BeamBasisKind::CantileverModes) {
    for (int i = 0; i < n_w; ++i) {
      double nrm2 = 0.0;
      for (int q = 0; q < nq; ++q) {
        const double v = b.beam_value(i, b.qy[static_cast<std::size_t>(q)]);
        nrm2 += b.qw[static_cast<std::size_t>(q)] * v * v;
      }
      b.beam_scale[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(nrm2);
    }
  }

  b.Vw_q.resize(nq, n_w);
  b.Vw2_q.resize(nq, n_w);
  Eigen::MatrixXd Vw1_q(nq, n_w);
  b.Vs_q.resize(nq, n_phi);
  Eigen::MatrixXd Vs1_q(nq, n_phi);
  for (int q = 0; q < nq; ++q) {
    const double y = b.qy[static_cast<std::size_t>(q)];
    for (int i = 0; i < n_w; ++i) {
      b.Vw_q(q, i) = b.beam_value(i, y);
      Vw1_q(q, i) = b.beam_d1(i, y);
      b.Vw2_q(q, i) = b.beam_d2(i, y);
    }
    for (int j = 0; j < n_phi; ++j) {
      b.Vs_q(q, j) = b.string_value(j, y);
      Vs1_q(q, j) = b.string_d1(j, y);
    }
  }

  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(b.qw.data(), nq);
  const auto gram = [&](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd G = A.transpose() * w.asDiagonal() * B;
    return G;
  };
  const auto symmetrize = [](Eigen::MatrixXd G) {
    return Eigen::MatrixXd(0.5 * (G + G.transpose()));
  };
  b.Mw = symmetrize(gram(b.Vw_q, b.Vw_q));
  b.G1w = symmetrize(gram(Vw1_q, Vw1_q));
  b.G2w = symmetrize(gram(b.Vw2_q, b.Vw2_q));
  b.Mphi = symmetrize(gram(b.Vs_q, b.Vs_q));
  b.G1phi = symmetrize(gram(Vs1_q, Vs1_q));
  b.Cwphi = gram(b.Vw_q, b.Vs_q);

  b.vw_l.resize(n_w);
  b.vw1_l.resize(n_w);
  for (int i = 0; i < n_w; ++i) {
    b.vw_l(i) = b.beam_value(i, l);
    b.vw1_l(i) = b.beam_d1(i, l);
  }
  b.psi_l.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) b.psi_l(j) = b.string_value(j, l);

  b.grid_y.resize(static_cast<std::size_t>(sup_grid));
  b.Vw_g.resize(sup_grid, n_w);
  b.Vw1_g.resize(sup_grid, n_w);
  b.Vs_g.resize(sup_grid, n_phi);
  for (int g = 0; g < sup_grid; ++g) {
    const double y = l * static_cast<double>(g) / (sup_grid - 1);
    b.grid_y[static_cast<std::size_t>(g)] = y;
    for (int i = 0; i < n_w; ++i) {
      b.Vw_g(g, i) = b.beam_value(i, y);
      b.Vw1_g(g, i) = b.beam_d1(i, y);
    }
    for (int j = 0; j < n_phi; ++j) b.Vs_g(g, j) = b.string_value(j, y);
  }
  return b;
}

DiscreteOperators assemble(const Basis& basis, const PhysicalParams& p) {
  if (std::abs(p.l - basis.l) > 1e-12 * std::max(1.0, basis.l))
    throw std::invalid_argument("assemble: params.l differs from basis.l");
  const int nw = basis.n_w, np = basis.n_phi, n = nw + np;
  DiscreteOperators ops;
  ops.params = p;
  ops.n_w = nw;
  ops.n_phi = np;
  ops.M = Eigen::MatrixXd::Zero(n, n);
  ops.K = Eigen::MatrixXd::Zero(n, n);
  ops.D = Eigen::MatrixXd::Zero(n, n);
  ops.Cpos = Eigen::MatrixXd::Zero(n, n);
  ops.Cvel = Eigen::MatrixXd::Zero(n, n);
  ops.M.topLeftCorner(nw, nw) = basis.Mw;
  ops.M.bottomRightCorner(np, np) = basis.Mphi;
  ops.K.topLeftCorner(nw, nw) = p.a1 * basis.G2w;
  ops.K.bottomRightCorner(np, np) = p.a2 * basis.G1phi;
  ops.D.topLeftCorner(nw, nw) = p.b1 * basis.G2w;
  ops.D.bottomRightCorner(np, np) = p.b2 * basis.G1phi;
  ops.Cpos.topRightCorner(nw, np) = -p.c1 * basis.Cwphi;
  ops.Cpos.bottomRightCorner(np, np) = -p.c2 * basis.Mphi;
  ops.Cvel.topLeftCorner(nw, nw) = -p.q1 * basis.Mw;
  ops.Cvel.topRightCorner(nw, np) = -p.p1 * basis.Cwphi;
  ops.Cvel.bottomLeftCorner(np, nw) = -p.q2 * basis.Cwphi.transpose();
  ops.Cvel.bottomRightCorner(np, np) = -p.p2 * basis.Mphi;
  // Boundary work terms: −d3(t) w_t(l) on the beam, +d4(t) φ_t(l) on the string.
  ops.L3 = Eigen::VectorXd::Zero(n);
  ops.L3.head(nw) = -basis.vw_l;
  ops.L4 = Eigen::VectorXd::Zero(n);
  ops.L4.tail(np) = basis.psi_l;
  return ops;
}

Eigen::VectorXd project_loads(const Basis& basis, const Field& d1, const Field& d2,
                              double t) {
  const int nw = basis.n_w, np = basis.n_phi;
  Eigen::VectorXd P = Eigen::VectorXd::Zero(nw + np);
  const int nq = static_cast<int>(basis.qy.size());
  if (!d1.is_zero()) {
    Eigen::VectorXd f(nq);
    for (int q = 0; q < nq; ++q)
      f(q) = basis.qw[static_cast<std::size_t>(q)] *
             d1(basis.qy[static_cast<std::size_t>(q)], t);
    P.head(nw) = basis.Vw_q.transpose() * f;
  }
  if (!d2.is_zero()) {
    Eigen::VectorXd f(nq);
    for (int q = 0; q < nq; ++q)
      f(q) = basis.qw[static_cast<std::size_t>(q)] *
             d2(basis.qy[static_cast<std::size_t>(q)], t);
    P.tail(np) = basis.Vs_q.transpose() * f;
  }
  return P;
}

namespace {

// L² projection of a scalar field onto one shape family: solve G c = rhs and
// report the reconstruction error via quadrature of the pointwise residual.
void project_component(const Basis& basis, const Eigen::MatrixXd& vals_q,
                       const Eigen::MatrixXd& gram,
                       const std::function<double(double)>& f, Eigen::VectorXd& coeff,
                       double& err) {
  const int n = static_cast<int>(gram.rows());
  coeff = Eigen::VectorXd::Zero(n);
  err = 0.0;
  if (!f) return;
  const int nq = static_cast<int>(basis.qy.size());
  Eigen::VectorXd fw(nq), fv(nq);
  for (int q = 0; q < nq; ++q) {
    fv(q) = f(basis.qy[static_cast<std::size_t>(q)]);
    fw(q) = basis.qw[static_cast<std::size_t>(q)] * fv(q);
  }
  coeff = gram.ldlt().solve(vals_q.transpose() * fw);
  double e2 = 0.0;
  const Eigen::VectorXd recon = vals_q * coeff;
  for (int q = 0; q < nq; ++q) {
    const double r = fv(q) - recon(q);
    e2 += basis.qw[static_cast<std::size_t>(q)] * r * r;
  }
  err = std::sqrt(std::max(0.0, e2));
}

}  // namespace

ProjectionResult project_ic(const Basis& basis, const InitialCondition& ic) {
  ProjectionResult r;
  r.state.t = 0.0;
  project_component(basis, basis.Vw_q, basis.Mw, ic.w0, r.state.qw, r.err_w0);
  project_component(basis, basis.Vw_q, basis.Mw, ic.w1, r.state.qw_dot, r.err_w1);
  project_component(basis, basis.Vs_q, basis.Mphi, ic.phi0, r.state.qphi, r.err_phi0);
  project_component(basis, basis.Vs_q, basis.Mphi, ic.phi1, r.state.qphi_dot,
                    r.err_phi1);
  return r;
}

namespace {
double quad_norm(const Eigen::MatrixXd& G, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, v.dot(G * v)));
}
}  // namespace

FieldNorms field_norms(const Basis& basis, const SemiDiscreteState& s) {
  FieldNorms n;
  n.wt_L2 = quad_norm(basis.Mw, s.qw_dot);
  n.wyy_L2 = quad_norm(basis.G2w, s.qw);
  n.phit_L2 = quad_norm(basis.Mphi, s.qphi_dot);
  n.phiy_L2 = quad_norm(basis.G1phi, s.qphi);
  n.wtyy_L2 = quad_norm(basis.G2w, s.qw_dot);
  n.phity_L2 = quad_norm(basis.G1phi, s.qphi_dot);
  n.wy_L2 = quad_norm(basis.G1w, s.qw);
  n.w_L2 = quad_norm(basis.Mw, s.qw);
  n.phi_L2 = quad_norm(basis.Mphi, s.qphi);
  n.w_l = basis.vw_l.dot(s.qw);
  n.wt_l = basis.vw_l.dot(s.qw_dot);
  n.phi_l = basis.psi_l.dot(s.qphi);
  n.phit_l = basis.psi_l.dot(s.qphi_dot);
  n.sup_w = (basis.Vw_g * s.qw).cwiseAbs().maxCoeff();
  n.sup_wy = (basis.Vw1_g * s.qw).cwiseAbs().maxCoeff();
  n.sup_phi = (basis.Vs_g * s.qphi).cwiseAbs().maxCoeff();
  return n;
}

double energy(const Basis& basis, const PhysicalParams& p, const SemiDiscreteState& s) {
  const double wt2 = s.qw_dot.dot(basis.Mw * s.qw_dot);
  const double wyy2 = s.qw.dot(basis.G2w * s.qw);
  const double pt2 = s.qphi_dot.dot(basis.Mphi * s.qphi_dot);
  const double py2 = s.qphi.dot(basis.G1phi * s.qphi);
  return 0.5 * (wt2 + p.a1 * wyy2 + pt2 + p.a2 * py2);
}

double inner_w_wt(const Basis& basis, const SemiDiscreteState& s) {
  return s.qw.dot(basis.Mw * s.qw_dot);
}

double inner_phi_phit(const Basis& basis, const SemiDiscreteState& s) {
  return s.qphi.dot(basis.Mphi * s.qphi_dot);
}

double augmented_energy(const Basis& basis, const PhysicalParams& p,
                        const SemiDiscreteState& s, double eps1, double eps2) {
  if (!(eps1 > 0.0 && eps1 < 1.0 && eps2 > 0.0 && eps2 < 1.0))
    throw std::invalid_argument("augmented_energy: eps1, eps2 must lie in (0, 1)");
  return energy(basis, p, s) + eps1 * inner_phi_phit(basis, s) +
         eps2 * inner_w_wt(basis, s);
}

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {
void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& A) {
  out << '[' << name << ' ' << A.rows() << ' ' << A.cols() << "]\n";
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(A(r, c));
    }
    out << '\n';
  }
}
}  // namespace

void export_operators(const DiscreteOperators& ops, std::ostream& out) {
  write_matrix(out, "M", ops.M);
  write_matrix(out, "K", ops.K);
  write_matrix(out, "D", ops.D);
  write_matrix(out, "Cpos", ops.Cpos);
  write_matrix(out, "Cvel", ops.Cvel);
  write_matrix(out, "L3", ops.L3);
  write_matrix(out, "L4", ops.L4);
}

}  // namespace beamstring
