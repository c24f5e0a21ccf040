#include "beamstring/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beamstring/quadrature.hpp"

namespace beamstring {

namespace {

bool finite(double v) { return std::isfinite(v); }

void check_hard(std::vector<ValidationIssue>& issues, bool& ok,
                const char* constraint, double value, bool satisfied) {
  if (!satisfied) {
    issues.push_back({constraint, value, /*hard=*/true});
    ok = false;
  }
}

void check_sign(std::vector<ValidationIssue>& issues, bool& ok,
                const char* constraint, double value, bool satisfied) {
  if (!satisfied) {
    issues.push_back({constraint, value, /*hard=*/false});
    ok = false;
  }
}

}  // namespace

ValidationReport validate_params(const PhysicalParams& p, bool strict_signs) {
  (void)strict_signs;  // strictness only affects pass(); the report lists everything
  ValidationReport r;
  const double all[] = {p.a1, p.b1, p.c1, p.p1, p.q1, p.a2, p.b2, p.c2, p.p2, p.q2, p.l};
  for (double v : all)
    if (!finite(v)) {
      r.issues.push_back({"all coefficients finite", v, true});
      r.hard_ok = false;
      break;
    }
  check_hard(r.issues, r.hard_ok, "a1 > 0", p.a1, p.a1 > 0.0);
  check_hard(r.issues, r.hard_ok, "b1 > 0", p.b1, p.b1 > 0.0);
  check_hard(r.issues, r.hard_ok, "a2 > 0", p.a2, p.a2 > 0.0);
  check_hard(r.issues, r.hard_ok, "b2 > 0", p.b2, p.b2 > 0.0);
  check_hard(r.issues, r.hard_ok, "l > 0", p.l, p.l > 0.0);
  check_sign(r.issues, r.signs_ok, "c1 >= 0", p.c1, p.c1 >= 0.0);
  check_sign(r.issues, r.signs_ok, "p1 >= 0", p.p1, p.p1 >= 0.0);
  check_sign(r.issues, r.signs_ok, "q1 <= 0", p.q1, p.q1 <= 0.0);
  check_sign(r.issues, r.signs_ok, "c2 >= 0", p.c2, p.c2 >= 0.0);
  check_sign(r.issues, r.signs_ok, "p2 <= 0", p.p2, p.p2 <= 0.0);
  check_sign(r.issues, r.signs_ok, "q2 >= 0", p.q2, p.q2 >= 0.0);
  return r;
}

Signal Signal::zero() { return Signal(); }

Signal Signal::from_function(std::string name, std::function<double(double)> f) {
  Signal s;
  s.name_ = std::move(name);
  s.fn_ = std::move(f);
  return s;
}

Signal Signal::tabulated(std::vector<double> times, std::vector<double> values) {
  if (times.size() != values.size() || times.size() < 2)
    throw std::invalid_argument("Signal::tabulated: need >= 2 matching samples");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("Signal::tabulated: times must increase strictly");
  Signal s;
  s.name_ = "tabulated";
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

double Signal::operator()(double t) const {
  if (fn_) return fn_(t);
  if (times_.empty()) return 0.0;
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  const double s = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return values_[lo] + s * (values_[hi] - values_[lo]);
}

Field Field::zero() { return Field(); }

Field Field::from_function(std::string name, std::function<double(double, double)> f) {
  Field d;
  d.name_ = std::move(name);
  d.fn_ = std::move(f);
  return d;
}

double Field::operator()(double y, double t) const { return fn_ ? fn_(y, t) : 0.0; }

namespace {

// Shared time envelope of the published disturbances.
double s4_envelope(double t) {
  return (1.0 + std::exp(-0.3 * t)) *
         (1.0 + std::sin(0.5 * M_PI * t) + 3.0 * std::sin(5.0 * M_PI * t));
}

double s4_d1(double y, double t) { return 2.0 * s4_envelope(t) * y; }
double s4_d2(double y, double t) { return -0.2 * s4_envelope(t) * y; }
double s4_d3(double t) {
  return (1.0 + 2.0 * std::exp(-0.2 * t)) * std::cos(0.2 * M_PI * t) *
         std::sin(3.0 * M_PI * t);
}
double s4_d4(double t) {
  return 0.5 * (1.0 + std::exp(-0.2 * t)) * std::sin(0.2 * M_PI * t) *
         std::cos(3.0 * M_PI * t);
}

constexpr double kCertdemoScale = 0.1;  // section4 boundary signals scaled into feasibility

}  // namespace

Signal signal_registry(const std::string& name) {
  if (name == "zero") return Signal::zero();
  if (name == "section4.d3") return Signal::from_function(name, s4_d3);
  if (name == "section4.d4") return Signal::from_function(name, s4_d4);
  if (name == "certdemo.d3")
    return Signal::from_function(name, [](double t) { return kCertdemoScale * s4_d3(t); });
  if (name == "certdemo.d4")
    return Signal::from_function(name, [](double t) { return kCertdemoScale * s4_d4(t); });
  throw std::invalid_argument("signal_registry: unknown signal '" + name + "'");
}

Field field_registry(const std::string& name) {
  if (name == "zero") return Field::zero();
  if (name == "section4.d1") return Field::from_function(name, s4_d1);
  if (name == "section4.d2") return Field::from_function(name, s4_d2);
  if (name == "certdemo.d1")
    return Field::from_function(
        name, [](double y, double t) { return kCertdemoScale * s4_d1(y, t); });
  if (name == "certdemo.d2")
    return Field::from_function(
        name, [](double y, double t) { return kCertdemoScale * s4_d2(y, t); });
  throw std::invalid_argument("field_registry: unknown field '" + name + "'");
}

std::vector<std::string> registry_names() {
  return {"zero",        "section4.d1", "section4.d2", "section4.d3", "section4.d4",
          "certdemo.d1", "certdemo.d2", "certdemo.d3", "certdemo.d4"};
}

Scenario section4_scenario() {
  Scenario s;
  s.name = "section4";
  s.params = {3.0, 0.3, 0.06, 0.04, 0.04, 5.0, 0.5, 0.08, 0.06, 0.06, 1.0};
  s.disturbances.d1 = field_registry("section4.d1");
  s.disturbances.d2 = field_registry("section4.d2");
  s.disturbances.d3 = signal_registry("section4.d3");
  s.disturbances.d4 = signal_registry("section4.d4");
  s.disturbances.M1 = 3.0;  // |d3| <= (1+2e^{-0.2t}) <= 3
  s.disturbances.M2 = 1.0;  // |d4| <= 0.5(1+e^{-0.2t}) <= 1
  const double l = s.params.l;
  s.ic.name = "section4";
  s.ic.w0 = [l](double y) { return 0.15 * y * y * (y - 3.0 * l) / (6.0 * l * l); };
  const double tilt = 8.0 * M_PI / 180.0;  // published value is 8 degrees
  s.ic.phi0 = [l, tilt](double y) { return tilt * (y / l) * (y / l); };
  s.notes = {"phi0_units: degrees->radians (8 deg = 0.13962634015954636 rad)",
             "initial velocities: zero (unstated in the source study)"};
  return s;
}

Scenario certified_demo_scenario() {
  Scenario s;
  s.name = "certdemo";
  s.params = {2.0, 2.0, 0.02, 0.01, -0.01, 2.4, 3.0, 0.02, -0.01, 0.01, 0.35};
  s.disturbances.d1 = field_registry("certdemo.d1");
  s.disturbances.d2 = field_registry("certdemo.d2");
  s.disturbances.d3 = signal_registry("certdemo.d3");
  s.disturbances.d4 = signal_registry("certdemo.d4");
  s.disturbances.M1 = 0.3;  // 0.1 * 3, declared with headroom
  s.disturbances.M2 = 0.1;
  const double l = s.params.l;
  s.ic.name = "certdemo";
  s.ic.w0 = [l](double y) { return 0.15 * y * y * (y - 3.0 * l) / (6.0 * l * l); };
  s.ic.phi0 = [l](double y) { return 0.14 * (y / l) * (y / l); };
  s.notes = {"disturbances: section4 signals scaled by 0.1 to meet the feasibility conditions"};
  return s;
}

Scenario without_disturbances(Scenario s) {
  s.disturbances = DisturbanceSet{};
  s.name += "+no_disturbance";
  return s;
}

void RunningNormAccumulator::push(double t, double d3, double d4, double d1_L2,
                                  double d2_L2) {
  const double a3 = std::abs(d3), a4 = std::abs(d4);
  const double s3 = d3 * d3, s4 = d4 * d4;
  const double s1 = d1_L2 * d1_L2, s2 = d2_L2 * d2_L2;
  norms_.sup_d3 = std::max(norms_.sup_d3, a3);
  norms_.sup_d4 = std::max(norms_.sup_d4, a4);
  norms_.sup_d1_L2 = std::max(norms_.sup_d1_L2, d1_L2);
  norms_.sup_d2_L2 = std::max(norms_.sup_d2_L2, d2_L2);
  if (have_prev_) {
    if (!(t > prev_t_))
      throw std::invalid_argument("RunningNormAccumulator: time must increase");
    const double h = 0.5 * (t - prev_t_);
    norms_.int_abs_d3 += h * (prev_abs_d3_ + a3);
    norms_.int_abs_d4 += h * (prev_abs_d4_ + a4);
    norms_.int_d3_sq += h * (prev_d3_sq_ + s3);
    norms_.int_d4_sq += h * (prev_d4_sq_ + s4);
    norms_.int_d1_L2_sq += h * (prev_d1_sq_ + s1);
    norms_.int_d2_L2_sq += h * (prev_d2_sq_ + s2);
  }
  have_prev_ = true;
  prev_t_ = t;
  prev_abs_d3_ = a3;
  prev_abs_d4_ = a4;
  prev_d3_sq_ = s3;
  prev_d4_sq_ = s4;
  prev_d1_sq_ = s1;
  prev_d2_sq_ = s2;
}

RunningNorms running_norms(const DisturbanceSet& d, double t, double l, double dt,
                           int ny) {
  if (t < 0.0) throw std::invalid_argument("running_norms: negative horizon");
  if (!(dt > 0.0)) throw std::invalid_argument("running_norms: dt must be positive");
  if (!(l > 0.0)) throw std::invalid_argument("running_norms: l must be positive");
  if (ny < 1) throw std::invalid_argument("running_norms: ny must be >= 1");
  const QuadratureRule quad(l, std::max(1, ny / 16), 16);
  const auto field_L2 = [&](const Field& f, double tt) {
    if (f.is_zero()) return 0.0;
    const double v = quad.integrate([&](double y) {
      const double u = f(y, tt);
      return u * u;
    });
    return std::sqrt(std::max(0.0, v));
  };
  RunningNormAccumulator acc;
  const long n = static_cast<long>(std::floor(t / dt + 1e-9));
  for (long k = 0; k <= n; ++k) {
    const double tk = static_cast<double>(k) * dt;
    acc.push(tk, d.d3(tk), d.d4(tk), field_L2(d.d1, tk), field_L2(d.d2, tk));
  }
  if (n >= 0 && static_cast<double>(n) * dt < t - 1e-12)
    acc.push(t, d.d3(t), d.d4(t), field_L2(d.d1, t), field_L2(d.d2, t));
  return acc.norms();
}

}  // namespace beamstring
