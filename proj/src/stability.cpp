#include "beamstring/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace beamstring {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

double min_relative(const std::vector<ConditionMargin>& conds) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : conds) m = std::min(m, c.relative());
  return m;
}

/// Fills the rate conditions, mu_m / mu_energy and the gain chain shared by
/// both certificate variants.  The four rate margins weight, in order,
/// ||w_t||^2, ||w_yy||^2, ||phi_t||^2, ||phi_y||^2.
void finish_rate_constants(RateConstants& rc, const PhysicalParams& p,
                           const FreeParameters& fp, double C1,
                           bool with_boundary_conditions) {
  const double l = p.l;
  const double l2 = l * l;
  const double l4 = l2 * l2;
  const double e1 = fp.eps1, e2 = fp.eps2;

  rc.conditions.clear();
  if (with_boundary_conditions) {
    rc.conditions.push_back({"string boundary coefficient", rc.Lam5, p.b2});
    rc.conditions.push_back({"beam boundary coefficient", rc.Lam6, p.b1});
  }
  rc.conditions.push_back(
      {"beam velocity rate", e2 + rc.Lam1 + (4.0 / l4) * rc.Lam6, (4.0 / l4) * p.b1});
  rc.conditions.push_back({"beam curvature rate", rc.Lam2, e2 * p.a1});
  rc.conditions.push_back(
      {"string velocity rate", e1 + rc.Lam3 + (2.0 / l2) * rc.Lam5, (2.0 / l2) * p.b2});
  rc.conditions.push_back({"string gradient rate", rc.Lam4, e1 * p.a2});

  const std::size_t base = rc.conditions.size() - 4;
  const double a1m = rc.conditions[base + 0].margin();
  const double a2m = rc.conditions[base + 1].margin();
  const double a3m = rc.conditions[base + 2].margin();
  const double a4m = rc.conditions[base + 3].margin();
  rc.mu_m = std::min(std::min(a1m, a2m), std::min(a3m, a4m));
  rc.mu_energy = std::min(std::min(2.0 * a1m, 2.0 * a2m / p.a1),
                          std::min(2.0 * a3m, 2.0 * a4m / p.a2));

  const double km = compute_km(p);
  const double ke = km * fp.eps_max();
  bool ok = rc.mu_m > 0.0 && ke < 1.0;
  for (const auto& c : rc.conditions) ok = ok && c.pass();
  rc.pass = ok;

  rc.C1 = C1;
  if (rc.pass) {
    const double ratio = (1.0 + ke) / (1.0 - ke);
    rc.C2 = 2.0 * rc.C1 / rc.mu_m;
    rc.C3 = std::max(ratio, rc.C2 / (1.0 - ke));
    rc.C5 = std::max(ratio, rc.C1 / (1.0 - ke));
    rc.C_eiss = std::sqrt(2.0 * rc.C3);
    rc.C_eiiss = std::sqrt(2.0 * rc.C5);
  } else {
    rc.C2 = rc.C3 = rc.C5 = rc.C_eiss = rc.C_eiiss = 0.0;
  }
}

}  // namespace

std::array<double, 4> km_candidates(const PhysicalParams& p) {
  const double l2 = p.l * p.l;
  return {1.0 / std::sqrt(p.a1), 1.0 / std::sqrt(p.a2),
          l2 / (2.0 * std::sqrt(p.a2)), l2 * l2 / (4.0 * std::sqrt(p.a1))};
}

double compute_km(const PhysicalParams& p) {
  const auto c = km_candidates(p);
  return *std::max_element(c.begin(), c.end());
}

Epsilon0Result compute_epsilon0(const PhysicalParams& p, double M2) {
  Epsilon0Result r;
  const double l = p.l;
  r.denominator = p.a2 - std::sqrt(2.0 * l) * M2 - 0.5 * l -
                  0.5 * l * l * (p.c2 - p.p2 + p.q2);
  r.feasible = r.denominator > 0.0;
  r.value = r.feasible ? 0.5 * (p.c1 + p.c2) * l * l / r.denominator : 0.0;
  return r;
}

StructuralReport check_structural_conditions(const PhysicalParams& p, double M1,
                                             double M2) {
  StructuralReport rep;
  const double l = p.l;
  const double s = std::sqrt(2.0 * l);
  const double l3 = l * l * l;
  rep.km = compute_km(p);
  rep.conditions[0] = {"beam boundary load vs rigidity", l * l * s * M1, 2.0 * p.a1};
  rep.conditions[1] = {"string couplings vs tension",
                       s * (1.0 + l * std::sqrt(l)) * (1.0 + rep.km) *
                           (1.0 + p.c1 + p.c2 - p.p2 + p.q2 + M2),
                       p.a2};
  rep.conditions[2] = {"beam couplings vs damping",
                       l * l * s * (1.0 + l3) * (p.c1 + p.p1 - p.q1 + p.q2 + M1),
                       2.0 * p.b1};
  rep.conditions[3] = {"string couplings vs damping",
                       s * (1.0 + l3) * (1.0 + p.p1 + p.c2 - p.p2 + p.q2 + M2),
                       p.b2};
  rep.pass = true;
  for (const auto& c : rep.conditions) rep.pass = rep.pass && c.pass();
  return rep;
}

LambdaConstants lambda_constants(const PhysicalParams& p,
                                 const FreeParameters& fp) {
  LambdaConstants lam;
  const auto& r = fp.r;
  const double e1 = fp.eps1, e2 = fp.eps2;
  const double l2 = p.l * p.l;
  const double l4 = l2 * l2;

  lam.l1 = 0.5 * (p.c1 * r[1] + p.p1 * r[2] - 2.0 * p.q1 + r[7] - e2 * p.q1 * r[5]);
  lam.l2 = (e2 * l4 / 8.0) * (p.c1 * r[3] + p.p1 * r[4] - p.q1 / r[5] + r[8]);
  lam.l3 = 0.5 * p.p1 * (1.0 / r[2] + e2 / r[4]);
  lam.l4 = 0.25 * p.c1 * l2 * (1.0 / r[1] + e2 / r[3]);
  lam.l5_coef = 0.5 * (1.0 / r[7] + e2 / r[8]);
  lam.l6 = 0.5 * p.q2 * (r[2] + e1 * r[1]);
  lam.l7 = 0.5 * (p.c2 * r[6] - 2.0 * p.p2 + p.q2 / r[2] + r[9] - e1 * p.p2 * r[6]);
  lam.l8 = 0.25 * l2 * (p.c2 / r[6] + 2.0 * e1 * p.c2 - e1 * p.p2 / r[6] +
                        e1 * p.q2 / r[1] + e1 * r[10]);
  lam.l9_coef = 0.5 * (1.0 / r[9] + e1 / r[10]);
  return lam;
}

RateConstants bounded_disturbance_constants(const PhysicalParams& p,
                                            const FreeParameters& fp, double M1,
                                            double M2) {
  RateConstants rc;
  rc.variant = "bounded";
  const double l = p.l;
  const double s = std::sqrt(2.0 * l);
  const auto lam = lambda_constants(p, fp);
  const auto& r = fp.r;
  const double e1 = fp.eps1, e2 = fp.eps2;

  rc.Lam1 = lam.l1 + lam.l6;
  rc.Lam2 = 0.5 * e2 / r[12] + lam.l2 + 0.5 * e2 * l * l * s * M1;
  rc.Lam3 = lam.l3 + lam.l7;
  rc.Lam4 = 0.5 * e1 / r[11] + lam.l4 + lam.l8 + e1 * s * M2;
  rc.Lam5 = 0.5 * e1 * r[11] + s * M2;
  rc.Lam6 = 0.5 * e2 * r[12] + 0.5 * l * l * s * M1;

  const double C1 = std::max({lam.l5_coef, lam.l9_coef, 2.0 * s});
  finish_rate_constants(rc, p, fp, C1, /*with_boundary_conditions=*/true);
  return rc;
}

RateConstants square_integrable_constants(const PhysicalParams& p,
                                          const FreeParameters& fp) {
  const auto& r = fp.r;
  if (!(r[13] > 0.0) || !(r[14] > 0.0))
    throw std::invalid_argument(
        "square_integrable_constants: r13 and r14 must be positive");

  RateConstants rc;
  rc.variant = "square-integrable";
  const double l = p.l;
  const double l3 = l * l * l;
  const auto lam = lambda_constants(p, fp);
  const double e1 = fp.eps1, e2 = fp.eps2;

  rc.Lam1 = lam.l1 + lam.l6;
  rc.Lam2 = 0.5 * e2 / r[12] + lam.l2 + 0.5 * e2 * e2 * l3 * r[13];
  rc.Lam3 = lam.l3 + lam.l7;
  rc.Lam4 = 0.5 * e1 / r[11] + lam.l4 + lam.l8 + l * r[14] * e1 * e1;
  rc.Lam5 = 0.5 * e1 * r[11] + l * r[14];
  rc.Lam6 = 0.5 * e2 * r[12] + 0.5 * l3 * r[13];

  const double C1 =
      std::max({lam.l5_coef, lam.l9_coef, 0.5 / r[13], 0.5 / r[14]});
  finish_rate_constants(rc, p, fp, C1, /*with_boundary_conditions=*/false);
  return rc;
}

double compute_mu_m(const PhysicalParams& p, const FreeParameters& fp,
                    double M1, double M2) {
  return bounded_disturbance_constants(p, fp, M1, M2).mu_m;
}

SelectionResult select_free_parameters(const PhysicalParams& p, double M1,
                                       double M2) {
  SelectionResult out;
  const auto vrep = validate_params(p, false);
  if (!vrep.hard_ok)
    throw std::invalid_argument(
        "select_free_parameters: physical parameters fail hard validation");
  if (!(M1 >= 0.0) || !(M2 >= 0.0) || !std::isfinite(M1) || !std::isfinite(M2))
    throw std::invalid_argument(
        "select_free_parameters: disturbance bounds must be finite and >= 0");

  const double l = p.l;
  const double s = std::sqrt(2.0 * l);
  const double l2 = l * l;
  const double l4 = l2 * l2;

  const auto st = check_structural_conditions(p, M1, M2);
  if (!st.pass) {
    for (const auto& c : st.conditions)
      out.trace.push_back("structural: " + c.name + " lhs=" + fmt(c.lhs) +
                          " rhs=" + fmt(c.rhs) +
                          (c.pass() ? " ok" : " VIOLATED"));
    out.trace.push_back("selection aborted: structural conditions fail");
    return out;
  }
  const double km = st.km;

  const auto e0 = compute_epsilon0(p, M2);
  if (!e0.feasible) {
    out.trace.push_back("selection aborted: eps0 denominator " +
                        fmt(e0.denominator) + " <= 0");
    return out;
  }

  // Upper cap on eps1: the embedding bound, the trace/Young interval bounds
  // from the derivation, and two affine-in-eps1 damping budgets.
  double cap = std::min({1.0 / km, l * std::sqrt(l), 1.0});
  const double A29 = 0.25 * l4 * (p.c1 + p.p1 - 4.0 * p.q1 + p.q2) +
                     2.0 * l2 * s * M1;
  const double B29 = 0.25 * l4 * p.q2;
  if (A29 >= 4.0 * p.b1) {
    out.trace.push_back("selection aborted: beam damping budget exhausted (" +
                        fmt(A29) + " >= " + fmt(4.0 * p.b1) + ")");
    return out;
  }
  if (B29 > 0.0) cap = std::min(cap, (4.0 * p.b1 - A29) / B29);
  const double A30 = l2 * (p.p1 + 0.25 * p.c2 - p.p2 + p.q2) + 2.0 * s * M2;
  const double B30 = l2 * (1.0 - 0.25 * p.p2) + 1.0 / l;
  if (A30 >= 2.0 * p.b2) {
    out.trace.push_back("selection aborted: string damping budget exhausted (" +
                        fmt(A30) + " >= " + fmt(2.0 * p.b2) + ")");
    return out;
  }
  cap = std::min(cap, (2.0 * p.b2 - A30) / B30);

  if (!(cap > e0.value)) {
    out.trace.push_back("selection aborted: empty eps1 interval (eps0=" +
                        fmt(e0.value) + ", cap=" + fmt(cap) + ")");
    return out;
  }
  out.trace.push_back("eps1 interval (" + fmt(e0.value) + ", " + fmt(cap) + ")");

  // Candidate eps1 values (preference order), and for each a ladder k that
  // shrinks eps2 and the curvature-side Young parameters geometrically.  All
  // six condition margins except the constant boundary coefficients improve
  // monotonically along the ladder, so the first k reaching the target gives
  // the smallest gain constants.
  const double target = 0.05;
  const double fracs[] = {0.25, 0.1, 0.05, 0.5, 0.02, 0.75, 0.01, 0.9};
  const double eps2_base = std::min(0.5 / km, 0.5);
  const int k_max = 45;

  FreeParameters best_fp;
  double best_rel = -std::numeric_limits<double>::infinity();
  bool accepted = false;

  for (double f : fracs) {
    const double eps1 = e0.value + f * (cap - e0.value);
    double cand_best = -std::numeric_limits<double>::infinity();
    int cand_k = -1;
    for (int k = 0; k <= k_max; ++k) {
      FreeParameters fp;
      fp.eps1 = eps1;
      fp.eps2 = eps2_base * std::pow(0.25, k);
      const double r_small = 0.5 * std::pow(0.5, k);
      const double r_large = 2.0 * std::pow(2.0, k);
      fp.r[1] = fp.r[2] = fp.r[6] = 0.5;
      fp.r[3] = fp.r[4] = fp.r[7] = fp.r[8] = fp.r[9] = fp.r[10] = r_small;
      fp.r[5] = fp.r[12] = r_large;
      fp.r[11] = 1.0 / l;
      fp.r[13] = M1 > 0.0 ? s * M1 / l : 1.0 / l;
      fp.r[14] = M2 > 0.0 ? s * M2 / l : 1.0 / l;

      const auto rc = bounded_disturbance_constants(p, fp, M1, M2);
      const double rel = min_relative(rc.conditions);
      if (rel > cand_best) {
        cand_best = rel;
        cand_k = k;
      }
      if (rel > best_rel) {
        best_rel = rel;
        best_fp = fp;
      }
      if (rel >= target) {
        out.trace.push_back("accepted eps1=" + fmt(eps1) + " (fraction " +
                            fmt(f) + "), ladder k=" + std::to_string(k) +
                            ", min relative margin " + fmt(rel));
        out.feasible = true;
        out.fp = fp;
        out.min_relative_margin = rel;
        accepted = true;
        break;
      }
    }
    if (accepted) break;
    out.trace.push_back("eps1=" + fmt(eps1) + " (fraction " + fmt(f) +
                        "): best min relative margin " + fmt(cand_best) +
                        " at k=" + std::to_string(cand_k));
  }

  if (!accepted) {
    if (best_rel > 0.0) {
      out.feasible = true;
      out.thin_margins = true;
      out.fp = best_fp;
      out.min_relative_margin = best_rel;
      out.trace.push_back("accepted with thin margins: min relative margin " +
                          fmt(best_rel) + " below target " + fmt(target));
    } else {
      out.trace.push_back("selection failed: best min relative margin " +
                          fmt(best_rel));
    }
  }
  return out;
}

Certificate make_certificate(const PhysicalParams& p, double M1, double M2) {
  const auto vrep = validate_params(p, false);
  if (!vrep.hard_ok)
    throw std::invalid_argument(
        "make_certificate: physical parameters fail hard validation");

  Certificate cert;
  cert.params = p;
  cert.M1 = M1;
  cert.M2 = M2;
  cert.Km = compute_km(p);
  cert.eps0 = compute_epsilon0(p, M2);
  cert.structural = check_structural_conditions(p, M1, M2);

  auto sel = select_free_parameters(p, M1, M2);
  cert.trace = std::move(sel.trace);
  cert.thin_margins = sel.thin_margins;
  if (!sel.feasible) return cert;

  cert.fp = sel.fp;
  cert.eps_m = sel.fp.eps_max();
  const double ke = cert.Km * cert.eps_m;
  cert.sandwich_lo = 1.0 / (1.0 + ke);
  cert.sandwich_hi = 1.0 / (1.0 - ke);
  cert.lambdas = lambda_constants(p, cert.fp);
  cert.bounded = bounded_disturbance_constants(p, cert.fp, M1, M2);
  cert.square_int = square_integrable_constants(p, cert.fp);
  cert.feasible = cert.bounded.pass;
  return cert;
}

const char* bound_kind_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::SupState: return "sup-state";
    case BoundKind::IntegralState: return "integral-state";
    case BoundKind::SupStateL2: return "sup-state-l2";
    case BoundKind::IntegralStateL2: return "integral-state-l2";
  }
  return "unknown";
}

BoundVerdict verify_iss_bound(const Trajectory& traj, const Certificate& cert,
                              BoundKind kind) {
  const bool l2_variant =
      kind == BoundKind::SupStateL2 || kind == BoundKind::IntegralStateL2;
  const RateConstants& rc = l2_variant ? cert.square_int : cert.bounded;
  if (!cert.feasible || !rc.pass)
    throw std::invalid_argument(
        std::string("verify_iss_bound: certificate infeasible for ") +
        bound_kind_name(kind));
  if (traj.samples.empty())
    throw std::invalid_argument("verify_iss_bound: trajectory has no samples");

  const bool sup_variant =
      kind == BoundKind::SupState || kind == BoundKind::SupStateL2;
  const double C = sup_variant ? rc.C_eiss : rc.C_eiiss;
  const double t0 = traj.samples.front().t;
  const double X0 = std::sqrt(2.0 * std::max(traj.samples.front().E, 0.0));

  BoundVerdict v;
  v.kind = kind;
  v.C_used = C;
  v.worst_margin = std::numeric_limits<double>::infinity();
  double cmin = 0.0;
  for (const auto& smp : traj.samples) {
    const double lhs = std::sqrt(2.0 * std::max(smp.E, 0.0));
    const double decay = std::exp(-rc.mu_m * (smp.t - t0) / 4.0) * X0;
    const auto& rn = smp.running;
    double gains = 0.0;
    switch (kind) {
      case BoundKind::SupState:
        gains = rn.sup_d1_L2 + rn.sup_d2_L2 + std::sqrt(rn.sup_d3) +
                std::sqrt(rn.sup_d4);
        break;
      case BoundKind::IntegralState:
        gains = std::sqrt(rn.int_d1_L2_sq) + std::sqrt(rn.int_d2_L2_sq) +
                std::sqrt(rn.int_abs_d3) + std::sqrt(rn.int_abs_d4);
        break;
      case BoundKind::SupStateL2:
        gains = rn.sup_d1_L2 + rn.sup_d2_L2 + rn.sup_d3 + rn.sup_d4;
        break;
      case BoundKind::IntegralStateL2:
        gains = std::sqrt(rn.int_d1_L2_sq) + std::sqrt(rn.int_d2_L2_sq) +
                std::sqrt(rn.int_d3_sq) + std::sqrt(rn.int_d4_sq);
        break;
    }
    const double denom = decay + gains;
    const double margin = C * denom - lhs;
    if (margin < v.worst_margin) {
      v.worst_margin = margin;
      v.worst_time = smp.t;
    }
    if (denom > 0.0)
      cmin = std::max(cmin, lhs / denom);
    else if (lhs > 0.0)
      cmin = std::numeric_limits<double>::infinity();
    ++v.checked;
  }
  v.C_min = cmin;
  v.pass = v.worst_margin >= 0.0;
  return v;
}

PointwiseVerdict verify_pointwise_bounds(const Trajectory& traj,
                                         const PhysicalParams& p) {
  if (traj.samples.empty())
    throw std::invalid_argument(
        "verify_pointwise_bounds: trajectory has no samples");
  PointwiseVerdict v;
  v.worst_margin = std::numeric_limits<double>::infinity();
  const double l = p.l;
  const double cphi = 4.0 * l / p.a2;
  const double cwy = 4.0 * l / p.a1;
  const double cw = 2.0 * l * l * l / p.a1;
  bool ok = true;
  for (const auto& smp : traj.samples) {
    const struct {
      const char* name;
      double margin;
      double scale;
    } checks[] = {
        {"phi", cphi * smp.E - smp.norms.sup_phi * smp.norms.sup_phi, cphi * smp.E},
        {"w_y", cwy * smp.E - smp.norms.sup_wy * smp.norms.sup_wy, cwy * smp.E},
        {"w", cw * smp.E - smp.norms.sup_w * smp.norms.sup_w, cw * smp.E},
    };
    for (const auto& c : checks) {
      if (c.margin < v.worst_margin) {
        v.worst_margin = c.margin;
        v.worst_time = smp.t;
        v.worst_bound = c.name;
      }
      // Grid sups under-estimate the true sup, so the margin is nonnegative
      // up to rounding; allow only rounding-level slack.
      if (c.margin < -1e-10 * std::max(1.0, c.scale)) ok = false;
    }
    ++v.checked;
  }
  v.pass = ok;
  return v;
}

SandwichVerdict verify_sandwich(const Trajectory& traj,
                                const Certificate& cert) {
  if (!cert.feasible)
    throw std::invalid_argument("verify_sandwich: certificate infeasible");
  SandwichVerdict v;
  double worst = -std::numeric_limits<double>::infinity();
  bool ok = true;
  for (const auto& smp : traj.samples) {
    const double V =
        smp.E + cert.fp.eps1 * smp.phi_phit + cert.fp.eps2 * smp.w_wt;
    const double viol =
        std::max(cert.sandwich_lo * V - smp.E, smp.E - cert.sandwich_hi * V);
    worst = std::max(worst, viol);
    if (viol > 1e-12 * std::max(1.0, smp.E)) ok = false;
    ++v.checked;
  }
  v.worst_violation = std::max(worst, 0.0);
  v.pass = ok;
  return v;
}

DissipationVerdict verify_dissipation(const Trajectory& traj,
                                      const Certificate& cert, double slack,
                                      std::size_t skip_initial) {
  if (!cert.feasible || !cert.bounded.pass)
    throw std::invalid_argument("verify_dissipation: certificate infeasible");
  if (traj.meta.config.record_stride != 1)
    throw std::invalid_argument(
        "verify_dissipation: requires record_stride == 1");
  const auto& smp = traj.samples;
  if (smp.size() < skip_initial + 3)
    throw std::invalid_argument("verify_dissipation: too few samples");

  const double e1 = cert.fp.eps1, e2 = cert.fp.eps2;
  const double mu = cert.bounded.mu_m;
  const double C1 = cert.bounded.C1;
  auto aug = [&](const TrajectorySample& s) {
    return s.E + e1 * s.phi_phit + e2 * s.w_wt;
  };

  DissipationVerdict v;
  v.slack = slack;
  v.worst_residual = -std::numeric_limits<double>::infinity();
  const std::size_t first = std::max<std::size_t>(skip_initial, 1);
  for (std::size_t n = first; n + 1 < smp.size(); ++n) {
    const double dVdt =
        (aug(smp[n + 1]) - aug(smp[n - 1])) / (smp[n + 1].t - smp[n - 1].t);
    const double g = smp[n].d1_L2 * smp[n].d1_L2 + smp[n].d2_L2 * smp[n].d2_L2 +
                     std::abs(smp[n].d3) + std::abs(smp[n].d4);
    const double resid = dVdt + 0.5 * mu * aug(smp[n]) - C1 * g;
    if (resid > v.worst_residual) {
      v.worst_residual = resid;
      v.worst_time = smp[n].t;
    }
    ++v.checked;
  }
  v.pass = v.worst_residual <= slack;
  return v;
}

double dissipation_slack(const Trajectory& traj, const Certificate& cert) {
  const auto& p = cert.params;
  double vmax = 1.0;
  for (const auto& s : traj.samples)
    vmax = std::max(vmax, std::abs(s.E + cert.fp.eps1 * s.phi_phit +
                                   cert.fp.eps2 * s.w_wt));
  const double kappa = 20.0 + p.a1 / p.b1 + p.a2 / p.b2;
  const double dt = traj.meta.config.dt;
  return 10.0 * (dt * dt / 6.0) * kappa * kappa * kappa * vmax +
         64.0 * 2.220446049250313e-16 * vmax / dt;
}

double fit_decay_rate(const Trajectory& traj, double window_start,
                      double floor_abs) {
  double st = 0, stt = 0, sy = 0, sty = 0;
  std::size_t n = 0;
  for (const auto& smp : traj.samples) {
    if (smp.t < window_start || smp.E <= floor_abs) continue;
    const double y = std::log(smp.E);
    st += smp.t;
    stt += smp.t * smp.t;
    sy += y;
    sty += smp.t * y;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * stt - st * st;
  if (denom <= 0.0) return 0.0;
  return -(n * sty - st * sy) / denom;
}

RandomCertifiableSet random_certifiable_set(std::mt19937_64& rng,
                                            int max_attempts) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    PhysicalParams p;
    p.l = 0.25 + 0.15 * U(rng);
    p.a1 = 1.2 + 1.8 * U(rng);
    p.a2 = 1.2 + 1.8 * U(rng);
    p.b1 = 1.0 + 5.0 * U(rng);
    p.b2 = 1.0 + 5.0 * U(rng);
    p.c1 = 0.05 * U(rng);
    p.p1 = 0.05 * U(rng);
    p.q1 = -0.05 * U(rng);
    p.c2 = 0.05 * U(rng);
    p.p2 = -0.05 * U(rng);
    p.q2 = 0.05 * U(rng);
    const double M1 = 0.25 * U(rng);
    const double M2 = 0.25 * U(rng);

    const auto st = check_structural_conditions(p, M1, M2);
    if (!st.pass) continue;
    double rel = std::numeric_limits<double>::infinity();
    for (const auto& c : st.conditions) rel = std::min(rel, c.relative());
    if (rel < 0.05) continue;  // leave the parameter search real headroom
    if (!compute_epsilon0(p, M2).feasible) continue;
    return {p, M1, M2};
  }
  throw std::runtime_error(
      "random_certifiable_set: no feasible draw within attempt budget");
}

Scenario make_random_scenario(const RandomCertifiableSet& set,
                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double l = set.params.l;
  const double f3 = 0.8 + 1.2 * U(rng);
  const double f4 = 0.6 + 1.0 * U(rng);
  const double ph3 = 6.283185307179586 * U(rng);
  const double ph4 = 6.283185307179586 * U(rng);
  const double amp1 = 0.4 * U(rng);
  const double amp2 = 0.4 * U(rng);
  const double f1 = 0.5 + 1.5 * U(rng);
  const double f2 = 0.5 + 1.5 * U(rng);
  const double aw = 0.02 + 0.08 * U(rng);
  const double ap = 0.02 + 0.08 * U(rng);

  Scenario sc;
  sc.name = "random-certifiable";
  sc.params = set.params;
  const double M1 = set.M1, M2 = set.M2;
  sc.disturbances.d3 = Signal::from_function(
      "random.d3", [M1, f3, ph3](double t) { return M1 * std::sin(f3 * t + ph3); });
  sc.disturbances.d4 = Signal::from_function(
      "random.d4", [M2, f4, ph4](double t) { return M2 * std::cos(f4 * t + ph4); });
  sc.disturbances.d1 = Field::from_function(
      "random.d1",
      [amp1, f1](double y, double t) { return amp1 * std::sin(f1 * t) * y; });
  sc.disturbances.d2 = Field::from_function(
      "random.d2",
      [amp2, f2](double y, double t) { return amp2 * std::cos(f2 * t) * y; });
  sc.disturbances.M1 = M1;
  sc.disturbances.M2 = M2;

  sc.ic.name = "random-smooth";
  sc.ic.w0 = [aw, l](double y) { return aw * y * y * (3.0 * l - y) / (2.0 * l * l * l); };
  sc.ic.phi0 = [ap, l](double y) { return ap * (y / l) * (y / l); };
  sc.notes.push_back("synthetic disturbances honour the declared sup bounds exactly");
  return sc;
}

}  // namespace beamstring
