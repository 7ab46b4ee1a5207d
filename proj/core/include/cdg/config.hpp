#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdg/euler.hpp"
#include "cdg/solver.hpp"
#include "cdg/types.hpp"

namespace cdg {

/// Freestream definition: velocity magnitude from the Mach number, direction
/// pitched by alpha in the x-z plane.
struct FreestreamConfig {
  double mach = 0.0;
  double alpha_deg = 0.0;
  double density = 1.0;
  double pressure = 1.0;

  ConservedState state(const GasModel& gas) const;
};

/// Curving-stage parameters.
struct CurvingConfig {
  // surface: "sphere" (center/radius) or "nurbs" (path)
  std::string surface_type = "sphere";
  Vec3 sphere_center{0, 0, 0};
  double sphere_radius = 1.0;
  std::string nurbs_path;

  std::string surface_tag = "sphere";
  std::vector<std::string> symmetry_tags;
  Vec3 box_min{}, box_max{};
  double youngs_modulus = 1.0;
  double poisson_ratio = 0.45;
  int fem_degree = 0;  // 0: follow dg_degree
  int dg_degree = 4;
};

/// One case file: everything the curve/solve/export subcommands need.
struct CaseConfig {
  std::string mesh_path;
  std::string curved_mesh_path;  // optional
  GasModel gas;
  FreestreamConfig freestream;
  std::vector<std::pair<std::string, std::string>> boundary_kinds;  // tag -> kind
  RunConfig run;
  CurvingConfig curving;
  std::string output_state = "state.cds";
  std::string output_log = "convergence.csv";

  BcMap bc_map() const;
};

CaseConfig parse_case_config(const std::string& json_text);
CaseConfig load_case_config(const std::string& path);
std::string serialize_case_config(const CaseConfig& config);

}  // namespace cdg
