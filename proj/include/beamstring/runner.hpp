#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "beamstring/galerkin.hpp"
#include "beamstring/model.hpp"
#include "beamstring/timestepper.hpp"

namespace beamstring {

/// Malformed configuration or unknown registry name; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One fully resolved tool invocation.  Built from a JSON document (see
/// parse_run_config for the schema) plus command-line overrides.
struct RunConfig {
  Scenario scenario;
  int n_w = 12, n_phi = 12;
  BeamBasisKind beam_basis = BeamBasisKind::CantileverModes;
  IntegratorConfig integrator;
  BoundaryMode mode = OpenLoop{};
  std::vector<std::string> verify;  ///< empty = default set for the run
  bool strict_signs = false;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  bool dump_operators = false;
  std::vector<std::array<int, 2>> sweep_modes;  ///< sweep grid (empty = config modes)
  std::vector<double> sweep_dts;                ///< sweep grid (empty = config dt)
  nlohmann::json raw;  ///< effective configuration (hashed into outputs)
};

/// Accepted keys: scenario, params, disturbances, initial_condition, modes,
/// beam_basis, integrator, boundary_mode, verify, strict_signs, output_dir,
/// seed, dump_operators, sweep.  Unknown keys raise UsageError.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// Commands return the process exit code: 0 success / feasible / all bounds
/// hold, 1 infeasible or a verified bound fails.  Usage problems throw
/// UsageError (exit 2); numerical failures throw std::runtime_error (exit 3).
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_certify(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, int threads, std::ostream& log);
int cmd_selftest(std::uint64_t seed, int n_sets, std::ostream& log);

}  // namespace beamstring
