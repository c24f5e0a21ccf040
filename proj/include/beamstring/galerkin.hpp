#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "beamstring/model.hpp"
#include "beamstring/polynomial.hpp"
#include "beamstring/quadrature.hpp"

namespace beamstring {

/// Shape-function family for the beam deflection.
enum class BeamBasisKind {
  CantileverModes,  ///< clamped-free Euler–Bernoulli eigenfunctions (unit L² norm)
  Polynomial,       ///< (y/l)^{i+1}, i = 1..n — exact-calculus fallback/cross-check
};

/// Immutable spatial discretization: beam shape functions v_i with
/// v(0) = v'(0) = 0, string shape functions ψ_j = sin((j−1/2)πy/l) with
/// ψ(0) = 0, their Gram matrices, boundary traces, and cached evaluations
/// on the quadrature and sup-norm grids. Build once, share freely.
class Basis {
 public:
  int n_w = 0, n_phi = 0;
  double l = 1.0;
  BeamBasisKind beam_kind = BeamBasisKind::CantileverModes;

  std::vector<double> beam_beta;   ///< cantilever wavenumbers β_i (empty for polynomial)
  std::vector<double> beam_sigma;  ///< mode shape constants σ_i
  std::vector<double> beam_A;      ///< (1−σ_i)/2 via a cancellation-safe formula
  std::vector<double> beam_scale;  ///< amplitudes normalizing ∫ v_i² = 1

  // Gram matrices (quadrature-assembled, symmetrized).
  Eigen::MatrixXd Mw;     ///< ∫ v_i v_k
  Eigen::MatrixXd G1w;    ///< ∫ v_i' v_k'
  Eigen::MatrixXd G2w;    ///< ∫ v_i'' v_k''
  Eigen::MatrixXd Mphi;   ///< ∫ ψ_j ψ_m
  Eigen::MatrixXd G1phi;  ///< ∫ ψ_j' ψ_m'
  Eigen::MatrixXd Cwphi;  ///< ∫ v_i ψ_j (cross mass)

  // Boundary traces at y = l.
  Eigen::VectorXd vw_l;    ///< v_i(l)
  Eigen::VectorXd vw1_l;   ///< v_i'(l)
  Eigen::VectorXd psi_l;   ///< ψ_j(l)

  // Quadrature grid and cached shape values (rows: nodes, cols: functions).
  std::vector<double> qy, qw;
  Eigen::MatrixXd Vw_q, Vw2_q;  ///< v_i, v_i'' at quadrature nodes
  Eigen::MatrixXd Vs_q;         ///< ψ_j at quadrature nodes

  // Uniform sup-norm grid (default 2049 points incl. endpoints) and values.
  std::vector<double> grid_y;
  Eigen::MatrixXd Vw_g, Vw1_g, Vs_g;  ///< v_i, v_i', ψ_j at grid points

  // Pointwise evaluation (stable exponential form for cantilever modes).
  double beam_value(int i, double y) const;
  double beam_d1(int i, double y) const;
  double beam_d2(int i, double y) const;
  double string_value(int j, double y) const;
  double string_d1(int j, double y) const;
};

/// Construct a basis with n_w beam and n_phi string shape functions on [0, l].
/// `sup_grid` sets the resolution of the cached sup-norm grid.
/// Throws std::invalid_argument for non-positive sizes or length.
Basis build_basis(int n_w, int n_phi, double l,
                  BeamBasisKind kind = BeamBasisKind::CantileverModes,
                  int sup_grid = 2049);

/// Dense matrices of the semi-discrete system
///   M q̈ + (D + Cvel) q̇ + (K + Cpos) q = L3 d3(t) + L4 d4(t) + P(t),
/// with q = [beam coefficients; string coefficients]. The coupling blocks
/// carry the right-hand-side terms c, p, q of the PDE moved to the left.
struct DiscreteOperators {
  Eigen::MatrixXd M;     ///< blockdiag(∫v v, ∫ψ ψ)
  Eigen::MatrixXd K;     ///< blockdiag(a1 ∫v'' v'', a2 ∫ψ' ψ')
  Eigen::MatrixXd D;     ///< blockdiag(b1 ∫v'' v'', b2 ∫ψ' ψ')   (Kelvin–Voigt)
  Eigen::MatrixXd Cpos;  ///< −[[0, c1 C],[0, c2 Mφ]]
  Eigen::MatrixXd Cvel;  ///< −[[q1 Mw, p1 C],[q2 Cᵀ, p2 Mφ]]
  Eigen::VectorXd L3;    ///< boundary shear direction  [−v(l); 0]
  Eigen::VectorXd L4;    ///< boundary tension direction [0; ψ(l)]
  PhysicalParams params;
  int n_w = 0, n_phi = 0;
};

/// Assemble the semi-discrete operators for given coefficients.
/// Throws std::invalid_argument if params.l differs from basis.l.
DiscreteOperators assemble(const Basis& basis, const PhysicalParams& p);

/// Distributed load vector P(t) = [∫d1(·,t)v_i ; ∫d2(·,t)ψ_j] by quadrature.
Eigen::VectorXd project_loads(const Basis& basis, const Field& d1, const Field& d2,
                              double t);

/// State of the semi-discrete system at one instant.
struct SemiDiscreteState {
  Eigen::VectorXd qw, qw_dot;      ///< beam coefficients and velocities
  Eigen::VectorXd qphi, qphi_dot;  ///< string coefficients and velocities
  double t = 0.0;
};

/// L²-project the four initial fields onto the basis; reports the L²
/// reconstruction error of each field (quadrature of the pointwise residual).
struct ProjectionResult {
  SemiDiscreteState state;
  double err_w0 = 0.0, err_w1 = 0.0, err_phi0 = 0.0, err_phi1 = 0.0;
};
ProjectionResult project_ic(const Basis& basis, const InitialCondition& ic);

/// Norms, traces and grid sups of the fields represented by a state.
struct FieldNorms {
  double wt_L2 = 0, wyy_L2 = 0, phit_L2 = 0, phiy_L2 = 0;
  double wtyy_L2 = 0, phity_L2 = 0;
  double wy_L2 = 0, w_L2 = 0, phi_L2 = 0;
  double w_l = 0, wt_l = 0, phi_l = 0, phit_l = 0;  ///< traces at y = l
  double sup_w = 0, sup_wy = 0, sup_phi = 0;        ///< grid sup-norms
};
FieldNorms field_norms(const Basis& basis, const SemiDiscreteState& s);

/// Physical energy E = ½(‖w_t‖² + a1‖w_yy‖² + ‖φ_t‖² + a2‖φ_y‖²).
double energy(const Basis& basis, const PhysicalParams& p, const SemiDiscreteState& s);

/// Cross inner products entering the augmented energy.
double inner_w_wt(const Basis& basis, const SemiDiscreteState& s);      ///< ⟨w, w_t⟩
double inner_phi_phit(const Basis& basis, const SemiDiscreteState& s);  ///< ⟨φ, φ_t⟩

/// Augmented energy 𝓔 = E + eps1⟨φ,φ_t⟩ + eps2⟨w,w_t⟩.
/// Throws std::invalid_argument unless 0 < eps1, eps2 < 1.
double augmented_energy(const Basis& basis, const PhysicalParams& p,
                        const SemiDiscreteState& s, double eps1, double eps2);

/// Write all operator blocks as a dense text format: one `[name rows cols]`
/// section per matrix, row-major, shortest round-trip (≤17 significant digits).
void export_operators(const DiscreteOperators& ops, std::ostream& out);

/// Shortest round-trip decimal representation of a double (std::to_chars).
std::string format_double(double v);

}  // namespace beamstring
