#include "beamstring/timestepper.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "beamstring/version.hpp"

namespace beamstring {

namespace {

Eigen::VectorXd flatten(const SemiDiscreteState& s, bool velocity) {
  Eigen::VectorXd out(s.qw.size() + s.qphi.size());
  if (velocity) {
    out.head(s.qw.size()) = s.qw_dot;
    out.tail(s.qphi.size()) = s.qphi_dot;
  } else {
    out.head(s.qw.size()) = s.qw;
    out.tail(s.qphi.size()) = s.qphi;
  }
  return out;
}

void unflatten(const Eigen::VectorXd& x, const Eigen::VectorXd& v, int nw, int np,
               double t, SemiDiscreteState& s) {
  s.qw = x.head(nw);
  s.qphi = x.tail(np);
  s.qw_dot = v.head(nw);
  s.qphi_dot = v.tail(np);
  s.t = t;
}

}  // namespace

TimeStepper::TimeStepper(const Basis& basis, const DiscreteOperators& ops,
                         const DisturbanceSet& dist, const BoundaryMode& mode,
                         const IntegratorConfig& cfg)
    : basis_(basis), ops_(ops), dist_(dist), mode_(mode), cfg_(cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("TimeStepper: dt must be positive");
  Ceff_ = ops_.D + ops_.Cvel;
  Keff_ = ops_.K + ops_.Cpos;
  const int nw = ops_.n_w, np = ops_.n_phi;
  const auto add_feedback = [&](double k1, double k2, double e1, double e2) {
    has_feedback_ = true;
    k1_ = k1;
    k2_ = k2;
    fb_eps1_ = e1;
    fb_eps2_ = e2;
    // d3 = k1(w_t(l) + eps2 w(l)) enters as −L3 d3 → +k1 v(l)v(l)ᵀ on damping, etc.
    if (k1 != 0.0) {
      const Eigen::MatrixXd outer_w =
          basis_.vw_l * basis_.vw_l.transpose();  // nw×nw
      Ceff_.topLeftCorner(nw, nw) += k1 * outer_w;
      if (e2 != 0.0) Keff_.topLeftCorner(nw, nw) += k1 * e2 * outer_w;
    }
    if (k2 != 0.0) {
      const Eigen::MatrixXd outer_p = basis_.psi_l * basis_.psi_l.transpose();
      Ceff_.bottomRightCorner(np, np) += k2 * outer_p;
      if (e1 != 0.0) Keff_.bottomRightCorner(np, np) += k2 * e1 * outer_p;
    }
  };
  if (std::holds_alternative<Feedback>(mode_)) {
    const auto& fb = std::get<Feedback>(mode_);
    add_feedback(fb.k1, fb.k2, fb.eps1, fb.eps2);
    use_boundary_signals_ = false;
  } else if (std::holds_alternative<FeedbackPlusDisturbance>(mode_)) {
    const auto& fb = std::get<FeedbackPlusDisturbance>(mode_);
    add_feedback(fb.k1, fb.k2, fb.eps1, fb.eps2);
    use_boundary_signals_ = true;
  }
  const double dt = cfg_.dt;
  Eigen::MatrixXd S;
  if (cfg_.scheme == Scheme::NewmarkBeta) {
    S = ops_.M + cfg_.gamma * dt * Ceff_ + cfg_.beta * dt * dt * Keff_;
  } else {
    S = ops_.M + 0.5 * dt * Ceff_ + 0.25 * dt * dt * Keff_;
  }
  S_.compute(S);
  M_.compute(ops_.M);
}

Eigen::VectorXd TimeStepper::forcing(double t, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& v) const {
  (void)x;
  (void)v;
  Eigen::VectorXd F = project_loads(basis_, dist_.d1, dist_.d2, t);
  if (use_boundary_signals_) {
    const double d3 = dist_.d3(t), d4 = dist_.d4(t);
    if (d3 != 0.0) F += ops_.L3 * d3;
    if (d4 != 0.0) F += ops_.L4 * d4;
  }
  return F;
}

void TimeStepper::reset(const SemiDiscreteState& s) {
  state_ = s;
  x_ = flatten(s, false);
  v_ = flatten(s, true);
  a_ = M_.solve(forcing(s.t, x_, v_) - Ceff_ * v_ - Keff_ * x_);
}

void TimeStepper::step() {
  const double dt = cfg_.dt;
  const double t1 = state_.t + dt;
  if (cfg_.scheme == Scheme::NewmarkBeta) {
    const double beta = cfg_.beta, gamma = cfg_.gamma;
    const Eigen::VectorXd x_pred = x_ + dt * v_ + (0.5 - beta) * dt * dt * a_;
    const Eigen::VectorXd v_pred = v_ + (1.0 - gamma) * dt * a_;
    const Eigen::VectorXd a_new =
        S_.solve(forcing(t1, x_pred, v_pred) - Ceff_ * v_pred - Keff_ * x_pred);
    x_ = x_pred + beta * dt * dt * a_new;
    v_ = v_pred + gamma * dt * a_new;
    a_ = a_new;
  } else {
    // Trapezoidal rule on [x; v]: endpoint-averaged forcing.
    const Eigen::VectorXd Favg = 0.5 * (forcing(state_.t, x_, v_) + forcing(t1, x_, v_));
    const Eigen::VectorXd rhs = (ops_.M - 0.5 * dt * Ceff_) * v_ - dt * Keff_ * x_ -
                                0.25 * dt * dt * Keff_ * v_ + dt * Favg;
    const Eigen::VectorXd v_new = S_.solve(rhs);
    x_ = x_ + 0.5 * dt * (v_ + v_new);
    v_ = v_new;
  }
  if (!x_.allFinite() || !v_.allFinite())
    throw std::runtime_error("TimeStepper::step: state diverged at t = " +
                             format_double(t1));
  unflatten(x_, v_, ops_.n_w, ops_.n_phi, t1, state_);
}

double TimeStepper::realized_d3() const {
  double d3 = use_boundary_signals_ ? dist_.d3(state_.t) : 0.0;
  if (has_feedback_ && k1_ != 0.0) {
    const double wl = basis_.vw_l.dot(state_.qw);
    const double wtl = basis_.vw_l.dot(state_.qw_dot);
    d3 += k1_ * (wtl + fb_eps2_ * wl);
  }
  return d3;
}

double TimeStepper::realized_d4() const {
  double d4 = use_boundary_signals_ ? dist_.d4(state_.t) : 0.0;
  if (has_feedback_ && k2_ != 0.0) {
    const double pl = basis_.psi_l.dot(state_.qphi);
    const double ptl = basis_.psi_l.dot(state_.qphi_dot);
    d4 -= k2_ * (ptl + fb_eps1_ * pl);
  }
  return d4;
}

namespace {

const char* mode_name(const BoundaryMode& m) {
  if (std::holds_alternative<OpenLoop>(m)) return "open_loop";
  if (std::holds_alternative<Feedback>(m)) return "feedback";
  return "feedback_plus_disturbance";
}

double field_L2_at(const Basis& basis, const Field& f, double t) {
  if (f.is_zero()) return 0.0;
  double acc = 0.0;
  for (std::size_t q = 0; q < basis.qy.size(); ++q) {
    const double u = f(basis.qy[q], t);
    acc += basis.qw[q] * u * u;
  }
  return std::sqrt(std::max(0.0, acc));
}

}  // namespace

Trajectory simulate(const Basis& basis, const Scenario& scenario,
                    const BoundaryMode& mode, const IntegratorConfig& cfg) {
  if (cfg.record_stride < 1)
    throw std::invalid_argument("simulate: record_stride must be >= 1");
  const DiscreteOperators ops = assemble(basis, scenario.params);
  TimeStepper stepper(basis, ops, scenario.disturbances, mode, cfg);
  const ProjectionResult proj = project_ic(basis, scenario.ic);
  stepper.reset(proj.state);

  Trajectory traj;
  traj.meta.scenario = scenario.name;
  traj.meta.params = scenario.params;
  traj.meta.n_w = basis.n_w;
  traj.meta.n_phi = basis.n_phi;
  traj.meta.beam_basis =
      basis.beam_kind == BeamBasisKind::CantileverModes ? "cantilever" : "polynomial";
  traj.meta.config = cfg;
  traj.meta.boundary_mode = mode_name(mode);
  traj.meta.notes = scenario.notes;

  const long n_steps = static_cast<long>(std::floor(cfg.t_end / cfg.dt + 1e-9));
  traj.step_times.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);

  RunningNormAccumulator running;
  const auto check_declared = [&](double d3, double d4) {
    const double tol = 1e-12;
    if (scenario.disturbances.M1) {
      const double excess = std::abs(d3) - (*scenario.disturbances.M1 + tol);
      if (excess > 0.0) {
        ++traj.meta.declared_bound_violations;
        traj.meta.worst_bound_violation =
            std::max(traj.meta.worst_bound_violation, excess);
      }
    }
    if (scenario.disturbances.M2) {
      const double excess = std::abs(d4) - (*scenario.disturbances.M2 + tol);
      if (excess > 0.0) {
        ++traj.meta.declared_bound_violations;
        traj.meta.worst_bound_violation =
            std::max(traj.meta.worst_bound_violation, excess);
      }
    }
  };

  const auto record = [&](const SemiDiscreteState& s, double d3, double d4,
                          double d1n, double d2n) {
    TrajectorySample smp;
    smp.t = s.t;
    smp.E = energy(basis, scenario.params, s);
    smp.w_wt = inner_w_wt(basis, s);
    smp.phi_phit = inner_phi_phit(basis, s);
    smp.norms = field_norms(basis, s);
    smp.d1_L2 = d1n;
    smp.d2_L2 = d2n;
    smp.d3 = d3;
    smp.d4 = d4;
    smp.running = running.norms();
    traj.samples.push_back(std::move(smp));
  };

  for (long n = 0; n <= n_steps; ++n) {
    if (n > 0) stepper.step();
    const SemiDiscreteState& s = stepper.state();
    const double d3 = stepper.realized_d3();
    const double d4 = stepper.realized_d4();
    const double d1n = field_L2_at(basis, scenario.disturbances.d1, s.t);
    const double d2n = field_L2_at(basis, scenario.disturbances.d2, s.t);
    running.push(s.t, d3, d4, d1n, d2n);
    check_declared(d3, d4);
    traj.step_times.push_back(s.t);
    traj.states.push_back(s);
    if (n % cfg.record_stride == 0) record(s, d3, d4, d1n, d2n);
  }
  return traj;
}

IdentityResiduals energy_identity_residual(const Basis& basis, const Trajectory& traj,
                                           const DisturbanceSet& dist,
                                           const BoundaryMode& mode,
                                           int skip_initial) {
  if (traj.states.size() < 3)
    throw std::invalid_argument("energy_identity_residual: need >= 3 states");
  const PhysicalParams& p = traj.meta.params;
  const DiscreteOperators ops = assemble(basis, p);
  IdentityResiduals out;

  const bool fb = !std::holds_alternative<OpenLoop>(mode);
  double k1 = 0, k2 = 0, fe1 = 0, fe2 = 0;
  bool signals = true;
  if (std::holds_alternative<Feedback>(mode)) {
    const auto& m = std::get<Feedback>(mode);
    k1 = m.k1;
    k2 = m.k2;
    fe1 = m.eps1;
    fe2 = m.eps2;
    signals = false;
  } else if (std::holds_alternative<FeedbackPlusDisturbance>(mode)) {
    const auto& m = std::get<FeedbackPlusDisturbance>(mode);
    k1 = m.k1;
    k2 = m.k2;
    fe1 = m.eps1;
    fe2 = m.eps2;
  }

  const std::size_t N = traj.states.size();
  std::vector<double> E(N), ww(N), pp(N);
  for (std::size_t n = 0; n < N; ++n) {
    E[n] = energy(basis, p, traj.states[n]);
    ww[n] = inner_w_wt(basis, traj.states[n]);
    pp[n] = inner_phi_phit(basis, traj.states[n]);
    out.max_energy_seen = std::max(out.max_energy_seen, E[n]);
  }

  // Instantaneous right-hand sides of the three balance laws at every step.
  std::vector<double> rhsE(N), rhsW(N), rhsP(N);
  for (std::size_t n = 0; n < N; ++n) {
    const SemiDiscreteState& s = traj.states[n];
    const double t = s.t;

    double d3 = signals ? dist.d3(t) : 0.0;
    double d4 = signals ? dist.d4(t) : 0.0;
    const double wl = basis.vw_l.dot(s.qw), wtl = basis.vw_l.dot(s.qw_dot);
    const double pl = basis.psi_l.dot(s.qphi), ptl = basis.psi_l.dot(s.qphi_dot);
    if (fb) {
      d3 += k1 * (wtl + fe2 * wl);
      d4 -= k2 * (ptl + fe1 * pl);
    }

    const Eigen::VectorXd P = project_loads(basis, dist.d1, dist.d2, t);
    const Eigen::VectorXd P1 = P.head(basis.n_w);
    const Eigen::VectorXd P2 = P.tail(basis.n_phi);

    const double wt2 = s.qw_dot.dot(basis.Mw * s.qw_dot);
    const double wyy2 = s.qw.dot(basis.G2w * s.qw);
    const double wtyy2 = s.qw_dot.dot(basis.G2w * s.qw_dot);
    const double pt2 = s.qphi_dot.dot(basis.Mphi * s.qphi_dot);
    const double py2 = s.qphi.dot(basis.G1phi * s.qphi);
    const double pty2 = s.qphi_dot.dot(basis.G1phi * s.qphi_dot);
    const double wyy_wtyy = s.qw.dot(basis.G2w * s.qw_dot);
    const double py_pty = s.qphi.dot(basis.G1phi * s.qphi_dot);

    // ∫ f1 w_t, ∫ f1 w with f1 = c1 φ + p1 φ_t + q1 w_t + d1
    const Eigen::VectorXd Cw_phi = basis.Cwphi * s.qphi;       // ⟨v_i, φ⟩
    const Eigen::VectorXd Cw_phit = basis.Cwphi * s.qphi_dot;  // ⟨v_i, φ_t⟩
    const double f1_wt = p.c1 * s.qw_dot.dot(Cw_phi) + p.p1 * s.qw_dot.dot(Cw_phit) +
                         p.q1 * wt2 + s.qw_dot.dot(P1);
    const double f1_w = p.c1 * s.qw.dot(Cw_phi) + p.p1 * s.qw.dot(Cw_phit) +
                        p.q1 * s.qw.dot(basis.Mw * s.qw_dot) + s.qw.dot(P1);
    // ∫ f2 φ_t, ∫ f2 φ with f2 = c2 φ + p2 φ_t + q2 w_t + d2
    const Eigen::VectorXd Ct_wt = basis.Cwphi.transpose() * s.qw_dot;  // ⟨ψ_j, w_t⟩
    const double phi_phit_ = s.qphi.dot(basis.Mphi * s.qphi_dot);
    const double f2_pt = p.c2 * phi_phit_ + p.p2 * pt2 + p.q2 * s.qphi_dot.dot(Ct_wt) +
                         s.qphi_dot.dot(P2);
    const double f2_p = p.c2 * s.qphi.dot(basis.Mphi * s.qphi) + p.p2 * phi_phit_ +
                        p.q2 * s.qphi.dot(Ct_wt) + s.qphi.dot(P2);

    rhsE[n] = -p.b1 * wtyy2 - p.b2 * pty2 - d3 * wtl + d4 * ptl + f1_wt + f2_pt;
    rhsW[n] = wt2 - p.a1 * wyy2 - p.b1 * wyy_wtyy - d3 * wl + f1_w;
    rhsP[n] = pt2 - p.a2 * py2 - p.b2 * py_pty + d4 * pl + f2_p;
  }

  // Residual of each balance over one step [t_n, t_{n+1}], with trapezoidal
  // quadrature of the instantaneous right-hand side.
  double se = 0, sw = 0, sp = 0;
  std::size_t count = 0;
  for (std::size_t n = static_cast<std::size_t>(skip_initial); n + 1 < N; ++n) {
    const double dt = traj.step_times[n + 1] - traj.step_times[n];
    const double re = (E[n + 1] - E[n]) / dt - 0.5 * (rhsE[n] + rhsE[n + 1]);
    const double rw = (ww[n + 1] - ww[n]) / dt - 0.5 * (rhsW[n] + rhsW[n + 1]);
    const double rp = (pp[n + 1] - pp[n]) / dt - 0.5 * (rhsP[n] + rhsP[n + 1]);
    out.max_E = std::max(out.max_E, std::abs(re));
    out.max_w = std::max(out.max_w, std::abs(rw));
    out.max_phi = std::max(out.max_phi, std::abs(rp));
    se += re * re;
    sw += rw * rw;
    sp += rp * rp;
    ++count;
    out.times.push_back(traj.step_times[n]);
    out.res_E.push_back(re);
  }
  if (count > 0) {
    out.rms_E = std::sqrt(se / count);
    out.rms_w = std::sqrt(sw / count);
    out.rms_phi = std::sqrt(sp / count);
  }
  return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& config_hash,
                          std::ostream& out) {
  out << "# beamstring " << "version=" << kVersion << " config_hash=" << config_hash
      << " scenario=" << traj.meta.scenario << " mode=" << traj.meta.boundary_mode
      << "\n";
  out << "t,E,aug_proxy_w_wt,aug_proxy_phi_phit,wt_L2,wyy_L2,phit_L2,phiy_L2,"
         "wtyy_L2,phity_L2,wy_L2,w_L2,phi_L2,w_l,wt_l,phi_l,phit_l,sup_w,sup_wy,"
         "sup_phi,d1_L2,d2_L2,d3,d4\n";
  for (const TrajectorySample& s : traj.samples) {
    const FieldNorms& n = s.norms;
    const double vals[] = {s.t,       s.E,        s.w_wt,     s.phi_phit, n.wt_L2,
                           n.wyy_L2,  n.phit_L2,  n.phiy_L2,  n.wtyy_L2,  n.phity_L2,
                           n.wy_L2,   n.w_L2,     n.phi_L2,   n.w_l,      n.wt_l,
                           n.phi_l,   n.phit_l,   n.sup_w,    n.sup_wy,   n.sup_phi,
                           s.d1_L2,   s.d2_L2,    s.d3,       s.d4};
    bool first = true;
    for (double v : vals) {
      if (!first) out << ',';
      out << format_double(v);
      first = false;
    }
    out << '\n';
  }
}

}  // namespace beamstring
