#include "cdg/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace cdg {

using nlohmann::json;

ConservedState FreestreamConfig::state(const GasModel& gas) const {
  if (mach < 0.0) throw ConfigError("freestream: Mach number must be >= 0");
  if (density <= 0.0 || pressure <= 0.0)
    throw ConfigError("freestream: density and pressure must be positive");
  const double speed = mach * std::sqrt(gas.gamma * pressure / density);
  const double alpha = alpha_deg * M_PI / 180.0;
  const Vec3 v{speed * std::cos(alpha), 0.0, speed * std::sin(alpha)};
  ConservedState u;
  u.rho = density;
  u.mom = density * v;
  u.rhoE = pressure / (gas.gamma - 1.0) + 0.5 * density * dot(v, v);
  return u;
}

BcMap CaseConfig::bc_map() const {
  BcMap map;
  for (const auto& [tag, kind] : boundary_kinds)
    map.emplace_back(tag, bc_kind_from_string(kind));
  return map;
}

namespace {

Vec3 vec3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(std::string("config: ") + what + " must be a 3-array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_to(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

CaseConfig parse_case_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }

  CaseConfig c;
  c.mesh_path = j.value("mesh", "");
  c.curved_mesh_path = j.value("curved_mesh", "");
  if (j.contains("gas")) c.gas.gamma = j["gas"].value("gamma", 1.4);

  if (j.contains("freestream")) {
    const auto& f = j["freestream"];
    c.freestream.mach = f.value("mach", 0.0);
    c.freestream.alpha_deg = f.value("alpha_deg", 0.0);
    c.freestream.density = f.value("density", 1.0);
    c.freestream.pressure = f.value("pressure", 1.0);
  }

  if (j.contains("boundaries")) {
    for (const auto& [tag, kind] : j["boundaries"].items())
      c.boundary_kinds.emplace_back(tag, kind.get<std::string>());
  }

  auto& r = c.run;
  r.riemann = j.value("riemann", "llf");
  r.gas = c.gas;
  r.cfl = j.value("cfl", 0.5);
  r.dt_override = j.value("dt", 0.0);
  if (j.contains("p_schedule")) r.p_schedule = j["p_schedule"].get<std::vector<int>>();
  if (j.contains("tolerances")) {
    r.final_tolerance = j["tolerances"].value("final", 1e-9);
    r.intermediate_tolerance = j["tolerances"].value("intermediate", 1e-4);
  }
  r.max_iterations_per_level = j.value("max_iterations_per_level", 20000);
  if (j.contains("fixed_iterations"))
    r.fixed_iterations = j["fixed_iterations"].get<std::vector<int>>();
  r.check_interval = j.value("residual_check_interval", 1000);
  r.residual_norm = j.value("residual_norm", "inf");
  r.padded = j.value("padded_layout", true);

  if (j.contains("viscosity")) {
    const auto& v = j["viscosity"];
    r.viscosity.enabled = v.value("enabled", false);
    r.viscosity.eps0 = v.value("eps0", 0.3);
    r.viscosity.kappa = v.value("kappa", 4.0);
    r.viscosity.s0_offset = v.value("s0_offset", 0.0);
    const std::string comp = v.value("indicator_component", "density");
    if (comp == "density") r.viscosity.indicator_component = 0;
    else if (comp == "energy") r.viscosity.indicator_component = 4;
    else throw ConfigError("config: unknown indicator_component '" + comp + "'");
    r.viscosity.jacobian_weighted = v.value("jacobian_weighted", false);
  }

  if (j.contains("curving")) {
    const auto& cv = j["curving"];
    auto& k = c.curving;
    if (cv.contains("surface")) {
      const auto& s = cv["surface"];
      k.surface_type = s.value("type", "sphere");
      if (k.surface_type == "sphere") {
        if (s.contains("center")) k.sphere_center = vec3_from(s["center"], "surface.center");
        k.sphere_radius = s.value("radius", 1.0);
      } else if (k.surface_type == "nurbs") {
        k.nurbs_path = s.value("path", "");
      } else {
        throw ConfigError("config: surface.type must be 'sphere' or 'nurbs'");
      }
    }
    k.surface_tag = cv.value("surface_tag", "sphere");
    if (cv.contains("symmetry_tags"))
      k.symmetry_tags = cv["symmetry_tags"].get<std::vector<std::string>>();
    if (cv.contains("box")) {
      k.box_min = vec3_from(cv["box"]["min"], "box.min");
      k.box_max = vec3_from(cv["box"]["max"], "box.max");
    }
    if (cv.contains("material")) {
      k.youngs_modulus = cv["material"].value("youngs_modulus", 1.0);
      k.poisson_ratio = cv["material"].value("poisson_ratio", 0.45);
    }
    k.fem_degree = cv.value("fem_degree", 0);
    k.dg_degree = cv.value("dg_degree", 4);
  }

  if (j.contains("output")) {
    c.output_state = j["output"].value("state", c.output_state);
    c.output_log = j["output"].value("log", c.output_log);
  }
  return c;
}

CaseConfig load_case_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_case_config(ss.str());
}

std::string serialize_case_config(const CaseConfig& c) {
  json j;
  j["mesh"] = c.mesh_path;
  if (!c.curved_mesh_path.empty()) j["curved_mesh"] = c.curved_mesh_path;
  j["gas"] = {{"gamma", c.gas.gamma}};
  j["freestream"] = {{"mach", c.freestream.mach},
                     {"alpha_deg", c.freestream.alpha_deg},
                     {"density", c.freestream.density},
                     {"pressure", c.freestream.pressure}};
  json b = json::object();
  for (const auto& [tag, kind] : c.boundary_kinds) b[tag] = kind;
  j["boundaries"] = b;
  j["riemann"] = c.run.riemann;
  j["cfl"] = c.run.cfl;
  if (c.run.dt_override > 0.0) j["dt"] = c.run.dt_override;
  j["p_schedule"] = c.run.p_schedule;
  j["tolerances"] = {{"final", c.run.final_tolerance},
                     {"intermediate", c.run.intermediate_tolerance}};
  j["max_iterations_per_level"] = c.run.max_iterations_per_level;
  if (!c.run.fixed_iterations.empty()) j["fixed_iterations"] = c.run.fixed_iterations;
  j["residual_check_interval"] = c.run.check_interval;
  j["residual_norm"] = c.run.residual_norm;
  j["padded_layout"] = c.run.padded;
  j["viscosity"] = {
      {"enabled", c.run.viscosity.enabled},
      {"eps0", c.run.viscosity.eps0},
      {"kappa", c.run.viscosity.kappa},
      {"s0_offset", c.run.viscosity.s0_offset},
      {"indicator_component",
       c.run.viscosity.indicator_component == 0 ? "density" : "energy"},
      {"jacobian_weighted", c.run.viscosity.jacobian_weighted}};
  json cv;
  if (c.curving.surface_type == "sphere") {
    cv["surface"] = {{"type", "sphere"},
                     {"center", vec3_to(c.curving.sphere_center)},
                     {"radius", c.curving.sphere_radius}};
  } else {
    cv["surface"] = {{"type", "nurbs"}, {"path", c.curving.nurbs_path}};
  }
  cv["surface_tag"] = c.curving.surface_tag;
  cv["symmetry_tags"] = c.curving.symmetry_tags;
  cv["box"] = {{"min", vec3_to(c.curving.box_min)}, {"max", vec3_to(c.curving.box_max)}};
  cv["material"] = {{"youngs_modulus", c.curving.youngs_modulus},
                    {"poisson_ratio", c.curving.poisson_ratio}};
  cv["fem_degree"] = c.curving.fem_degree;
  cv["dg_degree"] = c.curving.dg_degree;
  j["curving"] = cv;
  j["output"] = {{"state", c.output_state}, {"log", c.output_log}};
  return j.dump(2);
}

}  // namespace cdg
