#include "beamstring/report.hpp"

#include <cstdint>
#include <ostream>

#include "beamstring/galerkin.hpp"

namespace beamstring {

using nlohmann::json;

json to_json(const PhysicalParams& p) {
  return json{{"a1", p.a1}, {"b1", p.b1}, {"c1", p.c1}, {"p1", p.p1},
              {"q1", p.q1}, {"a2", p.a2}, {"b2", p.b2}, {"c2", p.c2},
              {"p2", p.p2}, {"q2", p.q2}, {"l", p.l}};
}

PhysicalParams params_from_json(const json& j) {
  PhysicalParams p;
  p.a1 = j.at("a1").get<double>();
  p.b1 = j.at("b1").get<double>();
  p.c1 = j.value("c1", 0.0);
  p.p1 = j.value("p1", 0.0);
  p.q1 = j.value("q1", 0.0);
  p.a2 = j.at("a2").get<double>();
  p.b2 = j.at("b2").get<double>();
  p.c2 = j.value("c2", 0.0);
  p.p2 = j.value("p2", 0.0);
  p.q2 = j.value("q2", 0.0);
  p.l = j.at("l").get<double>();
  return p;
}

json to_json(const IntegratorConfig& cfg) {
  return json{{"dt", cfg.dt},
              {"t_end", cfg.t_end},
              {"scheme", cfg.scheme == Scheme::NewmarkBeta ? "newmark-beta"
                                                           : "trapezoidal"},
              {"beta", cfg.beta},
              {"gamma", cfg.gamma},
              {"record_stride", cfg.record_stride}};
}

json to_json(const ConditionMargin& c) {
  return json{{"name", c.name},
              {"lhs", c.lhs},
              {"rhs", c.rhs},
              {"margin", c.margin()},
              {"relative", c.relative()},
              {"pass", c.pass()}};
}

json to_json(const StructuralReport& rep) {
  json conds = json::array();
  for (const auto& c : rep.conditions) conds.push_back(to_json(c));
  return json{{"conditions", conds}, {"km", rep.km}, {"pass", rep.pass}};
}

json to_json(const FreeParameters& fp) {
  json r = json::object();
  for (int i = 1; i <= 14; ++i) r["r" + std::to_string(i)] = fp.r[i];
  return json{{"eps1", fp.eps1}, {"eps2", fp.eps2}, {"r", r}};
}

json to_json(const LambdaConstants& lam) {
  return json{{"l1", lam.l1}, {"l2", lam.l2}, {"l3", lam.l3},
              {"l4", lam.l4}, {"l6", lam.l6}, {"l7", lam.l7},
              {"l8", lam.l8}, {"l5_coef", lam.l5_coef}, {"l9_coef", lam.l9_coef}};
}

json to_json(const RateConstants& rc) {
  json conds = json::array();
  for (const auto& c : rc.conditions) conds.push_back(to_json(c));
  return json{{"variant", rc.variant},
              {"Lam1", rc.Lam1},
              {"Lam2", rc.Lam2},
              {"Lam3", rc.Lam3},
              {"Lam4", rc.Lam4},
              {"Lam5", rc.Lam5},
              {"Lam6", rc.Lam6},
              {"conditions", conds},
              {"mu_m", rc.mu_m},
              {"mu_energy", rc.mu_energy},
              {"C1", rc.C1},
              {"C2", rc.C2},
              {"C3", rc.C3},
              {"C5", rc.C5},
              {"C_eiss", rc.C_eiss},
              {"C_eiiss", rc.C_eiiss},
              {"pass", rc.pass}};
}

json to_json(const Certificate& cert) {
  return json{{"params", to_json(cert.params)},
              {"M1", cert.M1},
              {"M2", cert.M2},
              {"Km", cert.Km},
              {"eps_m", cert.eps_m},
              {"sandwich_lo", cert.sandwich_lo},
              {"sandwich_hi", cert.sandwich_hi},
              {"eps0", json{{"value", cert.eps0.value},
                            {"denominator", cert.eps0.denominator},
                            {"feasible", cert.eps0.feasible}}},
              {"structural", to_json(cert.structural)},
              {"free_parameters", to_json(cert.fp)},
              {"lambdas", to_json(cert.lambdas)},
              {"bounded", to_json(cert.bounded)},
              {"square_integrable", to_json(cert.square_int)},
              {"feasible", cert.feasible},
              {"thin_margins", cert.thin_margins},
              {"trace", cert.trace}};
}

json to_json(const BoundVerdict& v) {
  return json{{"bound", bound_kind_name(v.kind)},
              {"pass", v.pass},
              {"C_used", v.C_used},
              {"C_min", v.C_min},
              {"worst_margin", v.worst_margin},
              {"worst_time", v.worst_time},
              {"checked", v.checked}};
}

json to_json(const PointwiseVerdict& v) {
  return json{{"pass", v.pass},
              {"worst_margin", v.worst_margin},
              {"worst_time", v.worst_time},
              {"worst_bound", v.worst_bound},
              {"checked", v.checked}};
}

json to_json(const SandwichVerdict& v) {
  return json{{"pass", v.pass},
              {"worst_violation", v.worst_violation},
              {"checked", v.checked}};
}

json to_json(const DissipationVerdict& v) {
  return json{{"pass", v.pass},
              {"worst_residual", v.worst_residual},
              {"worst_time", v.worst_time},
              {"slack", v.slack},
              {"checked", v.checked}};
}

json to_json(const RunMetadata& m) {
  return json{{"scenario", m.scenario},
              {"params", to_json(m.params)},
              {"n_w", m.n_w},
              {"n_phi", m.n_phi},
              {"beam_basis", m.beam_basis},
              {"config", to_json(m.config)},
              {"boundary_mode", m.boundary_mode},
              {"notes", m.notes},
              {"declared_bound_violations", m.declared_bound_violations},
              {"worst_bound_violation", m.worst_bound_violation}};
}

std::string canonical_dump(const json& j) { return j.dump(); }

std::string config_hash(const json& j) {
  const std::string s = canonical_dump(j);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64-bit
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

void write_margins_csv(const Certificate& cert, std::ostream& out) {
  out << "group,name,lhs,rhs,margin,relative,pass\n";
  auto row = [&](const std::string& group, const ConditionMargin& c) {
    out << group << ',' << c.name << ',' << format_double(c.lhs) << ','
        << format_double(c.rhs) << ',' << format_double(c.margin()) << ','
        << format_double(c.relative()) << ',' << (c.pass() ? 1 : 0) << '\n';
  };
  for (const auto& c : cert.structural.conditions) row("structural", c);
  for (const auto& c : cert.bounded.conditions) row("bounded", c);
  for (const auto& c : cert.square_int.conditions) row("square-integrable", c);
}

}  // namespace beamstring
