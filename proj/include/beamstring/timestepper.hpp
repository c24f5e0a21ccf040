#pragma once

#include <string>
#include <vector>

#include "beamstring/galerkin.hpp"
#include "beamstring/model.hpp"

namespace beamstring {

/// Implicit integration scheme.
enum class Scheme {
  NewmarkBeta,             ///< Newmark-β (β=1/4, γ=1/2), forcing at t_{n+1}
  TrapezoidalFirstOrder,   ///< trapezoidal rule on the first-order form (cross-check)
};

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 60.0;
  Scheme scheme = Scheme::NewmarkBeta;
  double beta = 0.25, gamma = 0.5;  ///< Newmark parameters
  int record_stride = 1;            ///< record every k-th step
};

/// One recorded sample: time, energies, norms, realized boundary inputs and
/// the running disturbance statistics up to this time.
struct TrajectorySample {
  double t = 0.0;
  double E = 0.0;
  double w_wt = 0.0;      ///< ⟨w, w_t⟩ (augmented energy = E + eps1·phi_phit + eps2·w_wt)
  double phi_phit = 0.0;  ///< ⟨φ, φ_t⟩
  FieldNorms norms;
  double d1_L2 = 0.0, d2_L2 = 0.0;  ///< ‖d1(·,t)‖, ‖d2(·,t)‖
  double d3 = 0.0, d4 = 0.0;        ///< realized boundary inputs (feedback-aware)
  RunningNorms running;
};

/// Metadata stamped into every trajectory (and serialized with it).
struct RunMetadata {
  std::string scenario;
  PhysicalParams params;
  int n_w = 0, n_phi = 0;
  std::string beam_basis;
  IntegratorConfig config;
  std::string boundary_mode;
  std::vector<std::string> notes;
  int declared_bound_violations = 0;  ///< samples where |d3| > M1 or |d4| > M2
  double worst_bound_violation = 0.0;
};

/// Simulation output: dense states (every step) plus recorded samples.
struct Trajectory {
  std::vector<double> step_times;            ///< t_n for every step (stride 1)
  std::vector<SemiDiscreteState> states;     ///< state at every step
  std::vector<TrajectorySample> samples;     ///< every record_stride-th step
  RunMetadata meta;
};

/// One-step integrator for M q̈ + (D+Cvel) q̇ + (K+Cpos) q = L3 d3 + L4 d4 + P(t).
/// Feedback boundary modes fold the rank-one trace terms into the damping and
/// stiffness blocks inside the factored implicit matrix.
class TimeStepper {
 public:
  TimeStepper(const Basis& basis, const DiscreteOperators& ops,
              const DisturbanceSet& dist, const BoundaryMode& mode,
              const IntegratorConfig& cfg);

  /// Initialize at state s (computes the consistent initial acceleration).
  void reset(const SemiDiscreteState& s);
  /// Advance one step of size cfg.dt. Throws std::runtime_error if the state
  /// leaves the representable range (non-finite entries), reporting the time.
  void step();

  const SemiDiscreteState& state() const { return state_; }
  double t() const { return state_.t; }
  /// Realized boundary inputs at the current state (feedback-aware).
  double realized_d3() const;
  double realized_d4() const;

 private:
  Eigen::VectorXd forcing(double t, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& v) const;

  const Basis& basis_;
  DiscreteOperators ops_;
  DisturbanceSet dist_;
  BoundaryMode mode_;
  IntegratorConfig cfg_;
  Eigen::MatrixXd Ceff_, Keff_;  ///< damping/stiffness incl. feedback rank-one terms
  Eigen::PartialPivLU<Eigen::MatrixXd> S_;   ///< factored implicit matrix
  Eigen::PartialPivLU<Eigen::MatrixXd> M_;   ///< factored mass (initial acceleration)
  SemiDiscreteState state_;
  Eigen::VectorXd x_, v_, a_;  ///< flat coefficient vectors
  bool use_boundary_signals_ = true;  ///< d3/d4 signals enter the forcing
  bool has_feedback_ = false;
  double k1_ = 0.0, k2_ = 0.0, fb_eps1_ = 0.0, fb_eps2_ = 0.0;
};

/// Run a full simulation from the scenario's initial condition.
/// `eps_for_check` has no effect on dynamics; samples always carry the cross
/// inner products so any augmented energy can be reconstructed afterwards.
Trajectory simulate(const Basis& basis, const Scenario& scenario,
                    const BoundaryMode& mode, const IntegratorConfig& cfg);

/// Centered-difference residuals of the semi-discrete power balances:
///   dE/dt   = −b1‖w_tyy‖² − b2‖φ_ty‖² − d3 w_t(l) + d4 φ_t(l) + ∫f1 w_t + ∫f2 φ_t
///   d⟨w,w_t⟩/dt = ‖w_t‖² − a1‖w_yy‖² − b1⟨w_yy,w_tyy⟩ − d3 w(l) + ∫f1 w
///   d⟨φ,φ_t⟩/dt = ‖φ_t‖² − a2‖φ_y‖² − b2⟨φ_y,φ_ty⟩ + d4 φ(l) + ∫f2 φ
/// evaluated at interior recorded steps (requires record capture of states,
/// i.e. the trajectory's dense state sequence). Residuals are O(dt²).
struct IdentityResiduals {
  double max_E = 0.0, rms_E = 0.0;
  double max_w = 0.0, rms_w = 0.0;
  double max_phi = 0.0, rms_phi = 0.0;
  double max_energy_seen = 0.0;  ///< max E over the trajectory (for scaling)
  std::vector<double> times;     ///< interior sample times
  std::vector<double> res_E;     ///< signed dE/dt residual series
};
/// `skip_initial` interior points are excluded (unresolved stiff transients).
IdentityResiduals energy_identity_residual(const Basis& basis, const Trajectory& traj,
                                           const DisturbanceSet& dist,
                                           const BoundaryMode& mode,
                                           int skip_initial = 0);

/// Write the recorded samples as CSV (LF line endings, shortest round-trip
/// doubles). The header row embeds tool version and the caller's config hash.
void write_trajectory_csv(const Trajectory& traj, const std::string& config_hash,
                          std::ostream& out);

}  // namespace beamstring
