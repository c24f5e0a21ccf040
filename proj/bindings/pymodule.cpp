#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamstring/galerkin.hpp"
#include "beamstring/lifting.hpp"
#include "beamstring/model.hpp"
#include "beamstring/report.hpp"
#include "beamstring/stability.hpp"
#include "beamstring/timestepper.hpp"
#include "beamstring/version.hpp"

namespace py = pybind11;
using namespace beamstring;

namespace {

/// Route nlohmann documents through json.loads so every report type arrives
/// as plain dicts/lists on the python side.
py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(py::str(j.dump()));
}

Scenario scenario_by_name(const std::string& name) {
  if (name == "section4") return section4_scenario();
  if (name == "certdemo") return certified_demo_scenario();
  throw std::invalid_argument("unknown scenario '" + name +
                              "' (expected section4 or certdemo)");
}

BeamBasisKind basis_by_name(const std::string& name) {
  if (name == "cantilever") return BeamBasisKind::CantileverModes;
  if (name == "polynomial") return BeamBasisKind::Polynomial;
  throw std::invalid_argument("unknown beam basis '" + name +
                              "' (expected cantilever or polynomial)");
}

Trajectory run_scenario(const Scenario& sc, int n_w, int n_phi, double dt,
                        double t_end, int stride, const std::string& beam_basis) {
  const ValidationReport vr = validate_params(sc.params, /*strict_signs=*/false);
  if (!vr.hard_ok) throw std::invalid_argument("invalid physical parameters");
  const Basis basis = build_basis(n_w, n_phi, sc.params.l, basis_by_name(beam_basis));
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.record_stride = stride;
  return simulate(basis, sc, OpenLoop{}, cfg);
}

py::dict trajectory_to_py(const Trajectory& traj) {
  std::vector<double> t, E, sup_w, sup_wy, sup_phi, d3, d4;
  t.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    t.push_back(s.t);
    E.push_back(s.E);
    sup_w.push_back(s.norms.sup_w);
    sup_wy.push_back(s.norms.sup_wy);
    sup_phi.push_back(s.norms.sup_phi);
    d3.push_back(s.d3);
    d4.push_back(s.d4);
  }
  py::dict out;
  out["t"] = t;
  out["E"] = E;
  out["sup_w"] = sup_w;
  out["sup_wy"] = sup_wy;
  out["sup_phi"] = sup_phi;
  out["d3"] = d3;
  out["d4"] = d4;
  out["meta"] = json_to_py(to_json(traj.meta));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coupled beam-string simulation and decay-certificate toolkit";
  m.attr("__version__") = kVersion;

  py::class_<PhysicalParams>(m, "PhysicalParams")
      .def(py::init<>())
      .def_readwrite("a1", &PhysicalParams::a1)
      .def_readwrite("b1", &PhysicalParams::b1)
      .def_readwrite("c1", &PhysicalParams::c1)
      .def_readwrite("p1", &PhysicalParams::p1)
      .def_readwrite("q1", &PhysicalParams::q1)
      .def_readwrite("a2", &PhysicalParams::a2)
      .def_readwrite("b2", &PhysicalParams::b2)
      .def_readwrite("c2", &PhysicalParams::c2)
      .def_readwrite("p2", &PhysicalParams::p2)
      .def_readwrite("q2", &PhysicalParams::q2)
      .def_readwrite("l", &PhysicalParams::l)
      .def("__repr__", [](const PhysicalParams& p) {
        std::ostringstream os;
        os << "PhysicalParams(a1=" << p.a1 << ", b1=" << p.b1 << ", c1=" << p.c1
           << ", p1=" << p.p1 << ", q1=" << p.q1 << ", a2=" << p.a2
           << ", b2=" << p.b2 << ", c2=" << p.c2 << ", p2=" << p.p2
           << ", q2=" << p.q2 << ", l=" << p.l << ")";
        return os.str();
      });

  m.def("scenario_params",
        [](const std::string& name) { return scenario_by_name(name).params; },
        py::arg("name"),
        "Physical parameters of a named built-in scenario (section4, certdemo).");

  m.def("validate",
        [](const PhysicalParams& p, bool strict_signs) {
          const ValidationReport r = validate_params(p, strict_signs);
          nlohmann::json j;
          j["hard_ok"] = r.hard_ok;
          j["signs_ok"] = r.signs_ok;
          j["pass"] = r.pass(strict_signs);
          j["issues"] = nlohmann::json::array();
          for (const auto& is : r.issues)
            j["issues"].push_back({{"constraint", is.constraint},
                                   {"value", is.value},
                                   {"hard", is.hard}});
          return json_to_py(j);
        },
        py::arg("params"), py::arg("strict_signs") = false,
        "Check positivity and sign conventions of the coefficients.");

  m.def("km", &compute_km, py::arg("params"),
        "Embedding constant K_m used by the energy/functional sandwich.");

  m.def("epsilon0",
        [](const PhysicalParams& p, double M2) {
          const Epsilon0Result r = compute_epsilon0(p, M2);
          nlohmann::json j{{"value", r.value},
                           {"denominator", r.denominator},
                           {"feasible", r.feasible}};
          return json_to_py(j);
        },
        py::arg("params"), py::arg("M2") = 0.0,
        "Lower admissibility threshold for the string cross-term weight.");

  m.def("structural_conditions",
        [](const PhysicalParams& p, double M1, double M2) {
          return json_to_py(to_json(check_structural_conditions(p, M1, M2)));
        },
        py::arg("params"), py::arg("M1") = 0.0, py::arg("M2") = 0.0,
        "Evaluate the four structural feasibility inequalities.");

  m.def("certify",
        [](const PhysicalParams& p, double M1, double M2) {
          return json_to_py(to_json(make_certificate(p, M1, M2)));
        },
        py::arg("params"), py::arg("M1") = 0.0, py::arg("M2") = 0.0,
        "Run the full certificate pipeline: feasibility, free-parameter "
        "selection, rate and gain constants.");

  m.def("certify_scenario",
        [](const std::string& name) {
          const Scenario sc = scenario_by_name(name);
          const double M1 = sc.disturbances.M1.value_or(0.0);
          const double M2 = sc.disturbances.M2.value_or(0.0);
          return json_to_py(to_json(make_certificate(sc.params, M1, M2)));
        },
        py::arg("name"),
        "Certificate for a named scenario using its declared disturbance bounds.");

  m.def("simulate",
        [](const std::string& scenario, int n_w, int n_phi, double dt,
           double t_end, int stride, const std::string& beam_basis) {
          const Trajectory traj = run_scenario(scenario_by_name(scenario), n_w,
                                               n_phi, dt, t_end, stride, beam_basis);
          return trajectory_to_py(traj);
        },
        py::arg("scenario"), py::arg("n_w") = 8, py::arg("n_phi") = 8,
        py::arg("dt") = 1e-3, py::arg("t_end") = 2.0, py::arg("stride") = 1,
        py::arg("beam_basis") = "cantilever",
        "Integrate a named scenario and return sampled energies, sup-norms and "
        "realized boundary inputs.");

  m.def("energy0",
        [](const std::string& scenario, int n_w, int n_phi) {
          const Scenario sc = scenario_by_name(scenario);
          const Basis basis = build_basis(n_w, n_phi, sc.params.l);
          const ProjectionResult pr = project_ic(basis, sc.ic);
          return energy(basis, sc.params, pr.state);
        },
        py::arg("scenario"), py::arg("n_w") = 12, py::arg("n_phi") = 12,
        "Energy of the projected initial state of a named scenario.");

  m.def("verify",
        [](const std::string& scenario, int n_w, int n_phi, double dt,
           double t_end) {
          const Scenario sc = scenario_by_name(scenario);
          const double M1 = sc.disturbances.M1.value_or(0.0);
          const double M2 = sc.disturbances.M2.value_or(0.0);
          const Certificate cert = make_certificate(sc.params, M1, M2);
          nlohmann::json out;
          out["certificate"] = to_json(cert);
          out["feasible"] = cert.feasible;
          if (!cert.feasible) return json_to_py(out);
          const Trajectory traj =
              run_scenario(sc, n_w, n_phi, dt, t_end, /*stride=*/1, "cantilever");
          nlohmann::json checks;
          bool all_pass = true;
          const auto add = [&](const std::string& name, const nlohmann::json& v,
                               bool pass) {
            checks[name] = v;
            all_pass = all_pass && pass;
          };
          const SandwichVerdict sw = verify_sandwich(traj, cert);
          add("sandwich", to_json(sw), sw.pass);
          const PointwiseVerdict pw = verify_pointwise_bounds(traj, sc.params);
          add("pointwise", to_json(pw), pw.pass);
          const BoundVerdict sup = verify_iss_bound(traj, cert, BoundKind::SupState);
          add("sup_state", to_json(sup), sup.pass);
          const BoundVerdict isb =
              verify_iss_bound(traj, cert, BoundKind::IntegralState);
          add("integral_state", to_json(isb), isb.pass);
          if (cert.square_int.pass) {
            const BoundVerdict s2 =
                verify_iss_bound(traj, cert, BoundKind::SupStateL2);
            add("sup_state_l2", to_json(s2), s2.pass);
            const BoundVerdict i2 =
                verify_iss_bound(traj, cert, BoundKind::IntegralStateL2);
            add("integral_state_l2", to_json(i2), i2.pass);
          }
          const DissipationVerdict dv =
              verify_dissipation(traj, cert, dissipation_slack(traj, cert));
          add("dissipation", to_json(dv), dv.pass);
          out["checks"] = checks;
          out["all_pass"] = all_pass;
          return json_to_py(out);
        },
        py::arg("scenario"), py::arg("n_w") = 8, py::arg("n_phi") = 8,
        py::arg("dt") = 1e-3, py::arg("t_end") = 5.0,
        "Certify a named scenario, simulate it, and check every applicable "
        "bound against the trajectory.");

  m.def("lifting_norm_sq",
        [](const PhysicalParams& p, double d3, double d4) {
          return lifting_norm_sq(p, d3, d4);
        },
        py::arg("params"), py::arg("d3"), py::arg("d4"),
        "Squared graph norm of the boundary lifting pair for inputs (d3, d4).");

  m.def("lifting_operator_norm", &lifting_operator_norm, py::arg("params"),
        "Operator norm of the boundary-to-interior lifting map.");

  m.def("lifting_residuals",
        [](const PhysicalParams& p, double d3, double d4) {
          const LiftingResiduals r = check_lifting_identities(p, d3, d4);
          nlohmann::json j{{"interior_beam", r.interior_beam},
                           {"interior_string", r.interior_string},
                           {"clamp_w", r.clamp_w},
                           {"clamp_wy", r.clamp_wy},
                           {"anchor_phi", r.anchor_phi},
                           {"moment", r.moment},
                           {"shear", r.shear},
                           {"tension", r.tension},
                           {"max_residual", r.max_residual()}};
          return json_to_py(j);
        },
        py::arg("params"), py::arg("d3"), py::arg("d4"),
        "Residuals of the defining interior/boundary identities of the "
        "lifting pair (all should vanish to machine precision).");
}
