#include "beamstring/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "beamstring/report.hpp"
#include "beamstring/stability.hpp"
#include "beamstring/version.hpp"

namespace beamstring {

namespace {

using nlohmann::json;

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known)
      throw UsageError("unknown key \"" + it.key() + "\" in " + where);
  }
}

Scenario named_scenario(const std::string& name) {
  if (name == "section4") return section4_scenario();
  if (name == "certdemo") return certified_demo_scenario();
  if (name == "custom") {
    Scenario s;
    s.name = "custom";
    return s;
  }
  throw UsageError("unknown scenario \"" + name +
                   "\" (expected section4, certdemo or custom)");
}

void merge_params(PhysicalParams& p, const json& j) {
  require_keys(j, {"a1", "b1", "c1", "p1", "q1", "a2", "b2", "c2", "p2", "q2", "l"},
               "params");
  p.a1 = j.value("a1", p.a1);
  p.b1 = j.value("b1", p.b1);
  p.c1 = j.value("c1", p.c1);
  p.p1 = j.value("p1", p.p1);
  p.q1 = j.value("q1", p.q1);
  p.a2 = j.value("a2", p.a2);
  p.b2 = j.value("b2", p.b2);
  p.c2 = j.value("c2", p.c2);
  p.p2 = j.value("p2", p.p2);
  p.q2 = j.value("q2", p.q2);
  p.l = j.value("l", p.l);
}

void merge_disturbances(DisturbanceSet& d, const json& j) {
  require_keys(j, {"d1", "d2", "d3", "d4", "M1", "M2"}, "disturbances");
  try {
    if (j.contains("d1")) d.d1 = field_registry(j.at("d1").get<std::string>());
    if (j.contains("d2")) d.d2 = field_registry(j.at("d2").get<std::string>());
    if (j.contains("d3")) d.d3 = signal_registry(j.at("d3").get<std::string>());
    if (j.contains("d4")) d.d4 = signal_registry(j.at("d4").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (j.contains("M1")) d.M1 = j.at("M1").get<double>();
  if (j.contains("M2")) d.M2 = j.at("M2").get<double>();
}

BoundaryMode parse_mode(const json& j) {
  require_keys(j, {"type", "k1", "k2", "eps1", "eps2"}, "boundary_mode");
  const std::string type = j.value("type", "open-loop");
  if (type == "open-loop") return OpenLoop{};
  const double k1 = j.value("k1", 0.0);
  const double k2 = j.value("k2", 0.0);
  const double e1 = j.value("eps1", 0.0);
  const double e2 = j.value("eps2", 0.0);
  if (type == "feedback") return Feedback{k1, k2, e1, e2};
  if (type == "feedback-plus-disturbance")
    return FeedbackPlusDisturbance{k1, k2, e1, e2};
  throw UsageError("unknown boundary_mode.type \"" + type + "\"");
}

std::string mode_name(const BoundaryMode& m) {
  if (std::holds_alternative<OpenLoop>(m)) return "open-loop";
  if (std::holds_alternative<Feedback>(m)) return "feedback";
  return "feedback-plus-disturbance";
}

const std::vector<std::string>& known_verify_names() {
  static const std::vector<std::string> v = {
      "sup-state",    "integral-state", "sup-state-l2", "integral-state-l2",
      "pointwise",    "sandwich",       "dissipation"};
  return v;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open output file " + path.string());
  return out;
}

struct VerifySummary {
  json verdicts = json::array();
  bool all_pass = true;
};

void log_verdict(std::ostream& log, const std::string& name, bool pass,
                 const std::string& detail) {
  log << "  [" << (pass ? "pass" : "FAIL") << "] " << name;
  if (!detail.empty()) log << " (" << detail << ")";
  log << "\n";
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw UsageError("configuration must be a JSON object");
  require_keys(j,
               {"scenario", "params", "disturbances", "initial_condition",
                "modes", "beam_basis", "integrator", "boundary_mode", "verify",
                "strict_signs", "output_dir", "seed", "dump_operators", "sweep"},
               "configuration");

  RunConfig cfg;
  cfg.raw = j;
  cfg.scenario = named_scenario(j.value("scenario", std::string("custom")));
  if (j.contains("params")) merge_params(cfg.scenario.params, j.at("params"));
  if (j.contains("disturbances"))
    merge_disturbances(cfg.scenario.disturbances, j.at("disturbances"));
  if (j.contains("initial_condition")) {
    const std::string ic = j.at("initial_condition").get<std::string>();
    if (ic == "zero")
      cfg.scenario.ic = InitialCondition{};
    else if (ic != "scenario")
      throw UsageError("initial_condition must be \"scenario\" or \"zero\"");
  }
  if (j.contains("modes")) {
    const auto& m = j.at("modes");
    if (!m.is_array() || m.size() != 2)
      throw UsageError("modes must be [n_w, n_phi]");
    cfg.n_w = m[0].get<int>();
    cfg.n_phi = m[1].get<int>();
  }
  if (j.contains("beam_basis")) {
    const std::string b = j.at("beam_basis").get<std::string>();
    if (b == "cantilever")
      cfg.beam_basis = BeamBasisKind::CantileverModes;
    else if (b == "polynomial")
      cfg.beam_basis = BeamBasisKind::Polynomial;
    else
      throw UsageError("beam_basis must be \"cantilever\" or \"polynomial\"");
  }
  if (j.contains("integrator")) {
    const auto& ji = j.at("integrator");
    require_keys(ji, {"dt", "t_end", "scheme", "record_stride"}, "integrator");
    cfg.integrator.dt = ji.value("dt", cfg.integrator.dt);
    cfg.integrator.t_end = ji.value("t_end", cfg.integrator.t_end);
    cfg.integrator.record_stride =
        ji.value("record_stride", cfg.integrator.record_stride);
    const std::string sch = ji.value("scheme", std::string("newmark-beta"));
    if (sch == "newmark-beta")
      cfg.integrator.scheme = Scheme::NewmarkBeta;
    else if (sch == "trapezoidal")
      cfg.integrator.scheme = Scheme::TrapezoidalFirstOrder;
    else
      throw UsageError("integrator.scheme must be newmark-beta or trapezoidal");
    if (!(cfg.integrator.dt > 0) || !(cfg.integrator.t_end > 0) ||
        cfg.integrator.record_stride < 1)
      throw UsageError("integrator requires dt > 0, t_end > 0, record_stride >= 1");
  }
  if (j.contains("boundary_mode")) cfg.mode = parse_mode(j.at("boundary_mode"));
  if (j.contains("verify")) {
    for (const auto& v : j.at("verify")) {
      const std::string name = v.get<std::string>();
      const auto& known = known_verify_names();
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw UsageError("unknown verify entry \"" + name + "\"");
      cfg.verify.push_back(name);
    }
  }
  cfg.strict_signs = j.value("strict_signs", false);
  cfg.output_dir = j.value("output_dir", std::string("out"));
  cfg.seed = j.value("seed", std::uint64_t{1});
  cfg.dump_operators = j.value("dump_operators", false);
  if (j.contains("sweep")) {
    const auto& js = j.at("sweep");
    require_keys(js, {"modes", "dts"}, "sweep");
    if (js.contains("modes"))
      for (const auto& m : js.at("modes")) {
        if (!m.is_array() || m.size() != 2)
          throw UsageError("sweep.modes entries must be [n_w, n_phi]");
        cfg.sweep_modes.push_back({m[0].get<int>(), m[1].get<int>()});
      }
    if (js.contains("dts"))
      for (const auto& d : js.at("dts")) cfg.sweep_dts.push_back(d.get<double>());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read configuration file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("invalid JSON in " + path + ": " + e.what());
  }
  return parse_run_config(j);
}

namespace {

/// Shared front half of simulate/verify: validation, basis, integration.
struct SimOutcome {
  Basis basis;
  Trajectory traj;
};

SimOutcome run_simulation(const RunConfig& cfg, std::ostream& log) {
  const auto vrep = validate_params(cfg.scenario.params, cfg.strict_signs);
  if (!vrep.pass(cfg.strict_signs)) {
    std::string msg = "parameter validation failed:";
    for (const auto& issue : vrep.issues)
      msg += " [" + issue.constraint + " violated by " +
             format_double(issue.value) + "]";
    throw UsageError(msg);
  }
  for (const auto& issue : vrep.issues)
    log << "note: sign convention " << issue.constraint
        << " violated (value " << format_double(issue.value) << ")\n";

  SimOutcome out{build_basis(cfg.n_w, cfg.n_phi, cfg.scenario.params.l,
                             cfg.beam_basis),
                 {}};
  out.traj = simulate(out.basis, cfg.scenario, cfg.mode, cfg.integrator);
  return out;
}

json summary_json(const Trajectory& traj) {
  double max_E = 0.0;
  for (const auto& s : traj.samples) max_E = std::max(max_E, s.E);
  return json{{"steps", traj.step_times.size() - 1},
              {"samples", traj.samples.size()},
              {"E_initial", traj.samples.front().E},
              {"E_final", traj.samples.back().E},
              {"E_max", max_E}};
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  auto sim = run_simulation(cfg, log);
  const std::string hash = config_hash(cfg.raw);

  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  {
    auto out = open_output(dir / "trajectory.csv");
    write_trajectory_csv(sim.traj, hash, out);
  }
  if (cfg.dump_operators) {
    const auto ops = assemble(sim.basis, cfg.scenario.params);
    auto out = open_output(dir / "operators.txt");
    export_operators(ops, out);
  }
  json run{{"tool_version", kVersion},
           {"config", cfg.raw},
           {"config_hash", hash},
           {"meta", to_json(sim.traj.meta)},
           {"summary", summary_json(sim.traj)}};
  {
    auto out = open_output(dir / "run.json");
    out << run.dump(2) << "\n";
  }

  double max_E = 0.0;
  for (const auto& smp : sim.traj.samples) max_E = std::max(max_E, smp.E);
  log << "simulated " << cfg.scenario.name << " (" << mode_name(cfg.mode)
      << ", " << cfg.n_w << "+" << cfg.n_phi << " modes, dt="
      << format_double(cfg.integrator.dt) << ")\n";
  log << "  steps " << sim.traj.step_times.size() - 1 << ", E0 "
      << format_double(sim.traj.samples.front().E) << ", E_end "
      << format_double(sim.traj.samples.back().E) << ", E_max "
      << format_double(max_E) << "\n";
  if (sim.traj.meta.declared_bound_violations > 0)
    log << "  WARNING: " << sim.traj.meta.declared_bound_violations
        << " samples exceed the declared boundary disturbance bounds\n";
  log << "  wrote " << (dir / "trajectory.csv").string() << "\n";
  return 0;
}

int cmd_certify(const RunConfig& cfg, std::ostream& log) {
  const auto& d = cfg.scenario.disturbances;
  // Declared sup bounds when provided; otherwise empirical grid suprema over
  // the integration horizon.
  double M1 = d.M1.value_or(0.0);
  double M2 = d.M2.value_or(0.0);
  if ((!d.M1 && !d.d3.is_zero()) || (!d.M2 && !d.d4.is_zero())) {
    const RunningNorms rn = running_norms(d, cfg.integrator.t_end,
                                          cfg.scenario.params.l);
    if (!d.M1) M1 = rn.sup_d3;
    if (!d.M2) M2 = rn.sup_d4;
    log << "note: undeclared boundary disturbance bounds; using empirical "
           "suprema M1="
        << format_double(M1) << ", M2=" << format_double(M2) << "\n";
  }
  Certificate cert;
  try {
    cert = make_certificate(cfg.scenario.params, M1, M2);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  {
    auto out = open_output(dir / "certificate.json");
    json doc{{"tool_version", kVersion},
             {"config_hash", config_hash(cfg.raw)},
             {"certificate", to_json(cert)}};
    out << doc.dump(2) << "\n";
  }
  {
    auto out = open_output(dir / "margins.csv");
    write_margins_csv(cert, out);
  }

  log << "certificate for " << cfg.scenario.name << " (M1="
      << format_double(M1) << ", M2=" << format_double(M2) << ")\n";
  log << "  structural conditions: "
      << (cert.structural.pass ? "pass" : "FAIL") << "\n";
  if (!cert.feasible) {
    for (const auto& line : cert.trace) log << "  " << line << "\n";
    log << "  infeasible\n";
    return 1;
  }
  log << "  eps1 " << format_double(cert.fp.eps1) << ", eps2 "
      << format_double(cert.fp.eps2) << ", Km " << format_double(cert.Km)
      << "\n";
  log << "  decay rate mu_m " << format_double(cert.bounded.mu_m)
      << " (norm-weighted " << format_double(cert.bounded.mu_energy)
      << "), gain C1 " << format_double(cert.bounded.C1) << "\n";
  log << "  state bound prefactors: sup variant "
      << format_double(cert.bounded.C_eiss) << ", integral variant "
      << format_double(cert.bounded.C_eiiss) << "\n";
  log << "  square-integrable variant: "
      << (cert.square_int.pass ? "pass" : "FAIL") << " (mu_m "
      << format_double(cert.square_int.mu_m) << ")\n";
  if (cert.thin_margins) log << "  note: margins below the 5% target\n";
  log << "  wrote " << (dir / "certificate.json").string() << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  const int rc_cert = cmd_certify(cfg, log);
  if (rc_cert != 0) return rc_cert;

  const auto& d = cfg.scenario.disturbances;
  const Certificate cert = make_certificate(
      cfg.scenario.params, d.M1.value_or(0.0), d.M2.value_or(0.0));

  auto sim = run_simulation(cfg, log);
  const auto& traj = sim.traj;

  std::vector<std::string> checks = cfg.verify;
  if (checks.empty()) {
    checks = {"sandwich", "pointwise", "sup-state", "integral-state"};
    if (cert.square_int.pass) {
      checks.push_back("sup-state-l2");
      checks.push_back("integral-state-l2");
    }
    if (cfg.integrator.record_stride == 1) checks.push_back("dissipation");
  }

  VerifySummary sum;
  for (const auto& name : checks) {
    json v;
    bool pass = false;
    std::string detail;
    if (name == "sandwich") {
      const auto r = verify_sandwich(traj, cert);
      v = to_json(r);
      pass = r.pass;
      detail = "worst violation " + format_double(r.worst_violation);
    } else if (name == "pointwise") {
      const auto r = verify_pointwise_bounds(traj, cfg.scenario.params);
      v = to_json(r);
      pass = r.pass;
      detail = "worst margin " + format_double(r.worst_margin);
    } else if (name == "dissipation") {
      if (cfg.integrator.record_stride != 1)
        throw UsageError("dissipation check requires record_stride = 1");
      const auto r =
          verify_dissipation(traj, cert, dissipation_slack(traj, cert));
      v = to_json(r);
      pass = r.pass;
      detail = "worst residual " + format_double(r.worst_residual) +
               " vs slack " + format_double(r.slack);
    } else {
      BoundKind kind = BoundKind::SupState;
      if (name == "integral-state") kind = BoundKind::IntegralState;
      if (name == "sup-state-l2") kind = BoundKind::SupStateL2;
      if (name == "integral-state-l2") kind = BoundKind::IntegralStateL2;
      if ((kind == BoundKind::SupStateL2 ||
           kind == BoundKind::IntegralStateL2) &&
          !cert.square_int.pass)
        throw UsageError("square-integrable bounds requested but that "
                         "certificate variant is infeasible");
      const auto r = verify_iss_bound(traj, cert, kind);
      v = to_json(r);
      pass = r.pass;
      detail = "C " + format_double(r.C_used) + ", minimal C " +
               format_double(r.C_min);
    }
    v["name"] = name;
    sum.verdicts.push_back(v);
    sum.all_pass = sum.all_pass && pass;
    log_verdict(log, name, pass, detail);
  }

  const std::filesystem::path dir(cfg.output_dir);
  {
    auto out = open_output(dir / "verdicts.json");
    json doc{{"tool_version", kVersion},
             {"config_hash", config_hash(cfg.raw)},
             {"mode", mode_name(cfg.mode)},
             {"verdicts", sum.verdicts},
             {"all_pass", sum.all_pass}};
    out << doc.dump(2) << "\n";
  }
  log << (sum.all_pass ? "all bounds hold\n" : "BOUND VIOLATION detected\n");
  return sum.all_pass ? 0 : 1;
}

int cmd_sweep(const RunConfig& cfg, int threads, std::ostream& log) {
  std::vector<std::array<int, 2>> modes = cfg.sweep_modes;
  if (modes.empty()) modes.push_back({cfg.n_w, cfg.n_phi});
  std::vector<double> dts = cfg.sweep_dts;
  if (dts.empty()) dts.push_back(cfg.integrator.dt);

  struct Row {
    int n_w, n_phi;
    double dt;
    std::size_t steps = 0;
    double E0 = 0, E_end = 0, E_max = 0, res_rms = 0;
    int violations = 0;
  };
  std::vector<Row> rows;
  for (const auto& m : modes)
    for (double dt : dts) rows.push_back({m[0], m[1], dt});

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(rows.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      try {
        Row& r = rows[i];
        IntegratorConfig ic = cfg.integrator;
        ic.dt = r.dt;
        const Basis basis =
            build_basis(r.n_w, r.n_phi, cfg.scenario.params.l, cfg.beam_basis);
        const Trajectory traj = simulate(basis, cfg.scenario, cfg.mode, ic);
        r.steps = traj.step_times.size() - 1;
        r.E0 = traj.samples.front().E;
        r.E_end = traj.samples.back().E;
        for (const auto& s : traj.samples) r.E_max = std::max(r.E_max, s.E);
        const auto res = energy_identity_residual(
            basis, traj, cfg.scenario.disturbances, cfg.mode, 10);
        r.res_rms = res.rms_E;
        r.violations = traj.meta.declared_bound_violations;
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  {
    auto out = open_output(dir / "sweep.csv");
    out << "# beamstring version=" << kVersion
        << " config_hash=" << config_hash(cfg.raw) << "\n";
    out << "n_w,n_phi,dt,steps,E_initial,E_final,E_max,energy_identity_rms,"
           "declared_bound_violations\n";
    for (const auto& r : rows)
      out << r.n_w << ',' << r.n_phi << ',' << format_double(r.dt) << ','
          << r.steps << ',' << format_double(r.E0) << ','
          << format_double(r.E_end) << ',' << format_double(r.E_max) << ','
          << format_double(r.res_rms) << ',' << r.violations << '\n';
  }
  log << "sweep over " << rows.size() << " runs (" << threads << " threads)\n";
  for (const auto& r : rows)
    log << "  " << r.n_w << "+" << r.n_phi << " dt=" << format_double(r.dt)
        << ": E_end " << format_double(r.E_end) << ", E_max "
        << format_double(r.E_max) << ", identity rms "
        << format_double(r.res_rms) << "\n";
  log << "  wrote " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_selftest(std::uint64_t seed, int n_sets, std::ostream& log) {
  if (n_sets < 1) throw UsageError("selftest requires at least one set");
  std::mt19937_64 rng(seed);
  bool all = true;
  log << "selftest: " << n_sets << " random feasible parameter sets (seed "
      << seed << ")\n";
  for (int i = 0; i < n_sets; ++i) {
    const auto set = random_certifiable_set(rng);
    const auto cert = make_certificate(set.params, set.M1, set.M2);
    if (!cert.feasible) {
      log << "  set " << i << ": certificate search FAILED\n";
      all = false;
      continue;
    }
    const Scenario sc = make_random_scenario(set, rng);
    const Basis basis = build_basis(6, 6, set.params.l);
    IntegratorConfig ic;
    ic.dt = 1e-3;
    ic.t_end = 1.5;
    const Trajectory traj = simulate(basis, sc, OpenLoop{}, ic);

    const auto sw = verify_sandwich(traj, cert);
    const auto pw = verify_pointwise_bounds(traj, set.params);
    const auto ds = verify_dissipation(traj, cert, dissipation_slack(traj, cert));
    const auto sup = verify_iss_bound(traj, cert, BoundKind::SupState);
    const bool ok = sw.pass && pw.pass && ds.pass && sup.pass;
    all = all && ok;
    log << "  set " << i << ": l=" << format_double(set.params.l) << " mu_m="
        << format_double(cert.bounded.mu_m)
        << (cert.thin_margins ? " (thin)" : "") << " sandwich="
        << (sw.pass ? "ok" : "FAIL") << " pointwise="
        << (pw.pass ? "ok" : "FAIL") << " dissipation="
        << (ds.pass ? "ok" : "FAIL") << " sup-bound="
        << (sup.pass ? "ok" : "FAIL") << "\n";
  }
  log << (all ? "selftest passed\n" : "selftest FAILED\n");
  return all ? 0 : 1;
}

}  // namespace beamstring
