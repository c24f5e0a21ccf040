#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "beamstring/runner.hpp"
#include "beamstring/version.hpp"

namespace {

using nlohmann::json;

struct CommonFlags {
  std::string config_path;
  std::string scenario;
  std::vector<int> modes;
  double dt = 0.0;
  double t_end = 0.0;
  std::string output_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool strict_signs = false;
  std::string beam_basis;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "JSON configuration file");
  cmd->add_option("-s,--scenario", f.scenario,
                  "scenario name (section4, certdemo, custom)");
  cmd->add_option("-m,--modes", f.modes, "basis sizes: n_w n_phi")
      ->expected(2);
  cmd->add_option("--dt", f.dt, "time step");
  cmd->add_option("--t-end", f.t_end, "final time");
  cmd->add_option("-o,--out", f.output_dir, "output directory");
  cmd->add_option("--seed", f.seed, "random seed")
      ->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_flag("--strict-signs", f.strict_signs,
                "fail validation on sign-convention violations");
  cmd->add_option("--beam-basis", f.beam_basis,
                  "beam shape family (cantilever, polynomial)");
}

/// Loads the config file (if any) and overlays the command-line flags, so the
/// effective configuration is a single JSON document (which also gets hashed
/// into every output file).
beamstring::RunConfig effective_config(const CommonFlags& f) {
  json j = json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in)
      throw beamstring::UsageError("cannot read configuration file " +
                                   f.config_path);
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw beamstring::UsageError("invalid JSON in " + f.config_path + ": " +
                                   e.what());
    }
  }
  if (!f.scenario.empty()) j["scenario"] = f.scenario;
  if (!f.modes.empty()) j["modes"] = f.modes;
  if (f.dt > 0.0) j["integrator"]["dt"] = f.dt;
  if (f.t_end > 0.0) j["integrator"]["t_end"] = f.t_end;
  if (!f.output_dir.empty()) j["output_dir"] = f.output_dir;
  if (f.seed_set) j["seed"] = f.seed;
  if (f.strict_signs) j["strict_signs"] = true;
  if (!f.beam_basis.empty())
    j["beam_basis"] = f.beam_basis == "cantilever" || f.beam_basis == "polynomial"
                          ? f.beam_basis
                          : throw beamstring::UsageError(
                                "--beam-basis must be cantilever or polynomial");
  return beamstring::parse_run_config(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled beam-string simulation and decay-certificate toolkit"};
  app.set_version_flag("--version", std::string(beamstring::kVersion));
  app.require_subcommand(1);

  CommonFlags sim_f, cert_f, ver_f, sweep_f;
  int sweep_threads = 0;
  std::uint64_t selftest_seed = 20240801;
  int selftest_sets = 8;

  auto* sim = app.add_subcommand("simulate", "integrate a scenario and write the trajectory");
  add_common(sim, sim_f);
  auto* cert = app.add_subcommand("certify", "compute the decay certificate and its margins");
  add_common(cert, cert_f);
  auto* ver = app.add_subcommand("verify", "certify, simulate, and check the certified bounds");
  add_common(ver, ver_f);
  auto* sweep = app.add_subcommand("sweep", "repeat a simulation over basis sizes and time steps");
  add_common(sweep, sweep_f);
  sweep->add_option("-j,--threads", sweep_threads, "worker threads (0 = hardware)");
  auto* self = app.add_subcommand("selftest", "randomized end-to-end property check");
  self->add_option("--seed", selftest_seed, "random seed");
  self->add_option("-n,--sets", selftest_sets, "number of random parameter sets");

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return beamstring::cmd_simulate(effective_config(sim_f), std::cout);
    if (cert->parsed()) return beamstring::cmd_certify(effective_config(cert_f), std::cout);
    if (ver->parsed()) return beamstring::cmd_verify(effective_config(ver_f), std::cout);
    if (sweep->parsed())
      return beamstring::cmd_sweep(effective_config(sweep_f), sweep_threads, std::cout);
    if (self->parsed())
      return beamstring::cmd_selftest(selftest_seed, selftest_sets, std::cout);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const beamstring::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
