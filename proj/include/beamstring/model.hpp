#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace beamstring {

/// Coefficients of the coupled beam–string system on y ∈ [0, l]:
///
///   w_tt + (a1 w_yy + b1 w_tyy)_yy = c1 φ + p1 φ_t + q1 w_t + d1(y,t)
///   φ_tt − (a2 φ_y  + b2 φ_ty )_y  = c2 φ + p2 φ_t + q2 w_t + d2(y,t)
///
/// with clamped/anchored left end, boundary inputs d3 (beam shear) and
/// d4 (string tension) at y = l, and a stress-free beam moment at y = l.
struct PhysicalParams {
  double a1 = 1.0;  ///< beam flexural rigidity  [> 0]
  double b1 = 1.0;  ///< beam Kelvin–Voigt damping  [> 0]
  double c1 = 0.0;  ///< beam load from string displacement  [sign convention: >= 0]
  double p1 = 0.0;  ///< beam load from string velocity  [>= 0]
  double q1 = 0.0;  ///< beam self velocity term  [<= 0]
  double a2 = 1.0;  ///< string tension  [> 0]
  double b2 = 1.0;  ///< string Kelvin–Voigt damping  [> 0]
  double c2 = 0.0;  ///< string self displacement term  [>= 0]
  double p2 = 0.0;  ///< string self velocity term  [<= 0]
  double q2 = 0.0;  ///< string load from beam velocity  [>= 0]
  double l = 1.0;   ///< domain length  [> 0]
};

/// One violated constraint found by validate_params.
struct ValidationIssue {
  std::string constraint;  ///< e.g. "a1 > 0" or "q1 <= 0"
  double value = 0.0;      ///< offending value
  bool hard = false;       ///< hard violations invalidate all analysis
};

/// Outcome of parameter validation. Hard violations (non-positive a, b, l,
/// non-finite entries) always fail; sign-convention violations fail only in
/// strict mode and are reported as warnings otherwise.
struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool hard_ok = true;
  bool signs_ok = true;
  bool pass(bool strict_signs) const { return hard_ok && (signs_ok || !strict_signs); }
};

ValidationReport validate_params(const PhysicalParams& p, bool strict_signs = false);

/// Scalar signal t ↦ d(t): a named closed form, a linearly interpolated
/// table (constant extrapolation), or identically zero.
class Signal {
 public:
  Signal() = default;
  static Signal zero();
  static Signal from_function(std::string name, std::function<double(double)> f);
  static Signal tabulated(std::vector<double> times, std::vector<double> values);

  double operator()(double t) const;
  bool is_zero() const { return !fn_ && times_.empty(); }
  const std::string& name() const { return name_; }

 private:
  std::string name_ = "zero";
  std::function<double(double)> fn_;
  std::vector<double> times_, values_;
};

/// Distributed signal (y, t) ↦ d(y, t): named closed form or identically zero.
class Field {
 public:
  Field() = default;
  static Field zero();
  static Field from_function(std::string name, std::function<double(double, double)> f);

  double operator()(double y, double t) const;
  bool is_zero() const { return !fn_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_ = "zero";
  std::function<double(double, double)> fn_;
};

/// The four disturbance channels plus optional declared sup bounds
/// M1 ≥ sup|d3|, M2 ≥ sup|d4| used by the feasibility conditions.
/// Declared bounds are checked against every evaluated sample during
/// simulation; violations are recorded in the run metadata.
struct DisturbanceSet {
  Field d1, d2;
  Signal d3, d4;
  std::optional<double> M1;  ///< declared sup bound for |d3|
  std::optional<double> M2;  ///< declared sup bound for |d4|
};

/// Look up a closed-form signal by registry name ("zero", "section4.d3",
/// "section4.d4", "certdemo.d3", "certdemo.d4"). Throws on unknown names.
Signal signal_registry(const std::string& name);
/// Same for fields ("zero", "section4.d1", "section4.d2", "certdemo.d1", "certdemo.d2").
Field field_registry(const std::string& name);
/// Names available in the two registries (for diagnostics).
std::vector<std::string> registry_names();

/// How the boundary at y = l is driven.
struct OpenLoop {};  ///< d3, d4 taken from the DisturbanceSet
struct Feedback {    ///< d3 = k1 (w_t(l) + eps2 w(l)),  d4 = −k2 (φ_t(l) + eps1 φ(l))
  double k1 = 0.0, k2 = 0.0;
  double eps1 = 0.0, eps2 = 0.0;
};
struct FeedbackPlusDisturbance {  ///< feedback law + the DisturbanceSet's d3, d4
  double k1 = 0.0, k2 = 0.0;
  double eps1 = 0.0, eps2 = 0.0;
};
using BoundaryMode = std::variant<OpenLoop, Feedback, FeedbackPlusDisturbance>;

/// Initial fields; each defaults to zero.
struct InitialCondition {
  std::string name = "zero";
  std::function<double(double)> w0, w1, phi0, phi1;  ///< null ⇒ identically zero
};

/// A fully specified experiment: coefficients, disturbances, initial data.
struct Scenario {
  std::string name;
  PhysicalParams params;
  DisturbanceSet disturbances;
  InitialCondition ic;
  std::vector<std::string> notes;  ///< e.g. unit conversions, scaling provenance
};

/// The published simulation study: a1=3, b1=0.3, c1=0.06, p1=q1=0.04,
/// a2=5, b2=0.5, c2=0.08, p2=q2=0.06, l=1, oscillatory decaying disturbances,
/// bent-beam / tilted-string initial state (string angle given in degrees,
/// converted to radians here). Violates the sign conventions (p2, q1 > 0),
/// so it validates only with strict_signs = false.
Scenario section4_scenario();

/// A certifiable companion scenario: l=0.35, a1=2, b1=2, a2=2.4, b2=3,
/// small sign-convention couplings, section4-shaped disturbances scaled to
/// M1=0.2, M2=0.1. Passes the feasibility conditions with real margins.
Scenario certified_demo_scenario();

/// Zero-disturbance variant of any scenario (keeps params + IC).
Scenario without_disturbances(Scenario s);

/// Running disturbance statistics over [0, t], accumulated on a uniform time
/// grid: running sups of |d3|, |d4|, ‖d1(·,s)‖_L², ‖d2(·,s)‖_L² and running
/// integrals ∫|d3|, ∫|d4|, ∫d3², ∫d4², ∫‖d1‖², ∫‖d2‖² (trapezoidal in time,
/// Gauss–Legendre in y). All entries are nondecreasing in t.
struct RunningNorms {
  double sup_d3 = 0.0, sup_d4 = 0.0;
  double sup_d1_L2 = 0.0, sup_d2_L2 = 0.0;
  double int_abs_d3 = 0.0, int_abs_d4 = 0.0;
  double int_d3_sq = 0.0, int_d4_sq = 0.0;
  double int_d1_L2_sq = 0.0, int_d2_L2_sq = 0.0;
};

/// Incremental accumulator behind running_norms; the time stepper feeds it
/// one sample per step so trajectories carry the running statistics.
class RunningNormAccumulator {
 public:
  RunningNormAccumulator() = default;
  /// Push the sample at time t (strictly increasing); integrals use the
  /// trapezoidal rule between consecutive samples.
  void push(double t, double d3, double d4, double d1_L2, double d2_L2);
  const RunningNorms& norms() const { return norms_; }

 private:
  bool have_prev_ = false;
  double prev_t_ = 0.0;
  double prev_abs_d3_ = 0.0, prev_abs_d4_ = 0.0;
  double prev_d3_sq_ = 0.0, prev_d4_sq_ = 0.0;
  double prev_d1_sq_ = 0.0, prev_d2_sq_ = 0.0;
  RunningNorms norms_;
};

/// Evaluate running norms of a disturbance set over [0, t] on a fresh grid
/// with `dt` spacing (L² in y over [0, l] with `ny` Gauss–Legendre points).
/// Throws std::invalid_argument for negative t or non-positive dt/ny/l.
RunningNorms running_norms(const DisturbanceSet& d, double t, double l,
                           double dt = 1e-3, int ny = 128);

}  // namespace beamstring
