#include "cdg/cli_ops.hpp"

#include <filesystem>
#include <fstream>

#include "cdg/elasticity.hpp"
#include "cdg/gmsh_io.hpp"
#include "cdg/nurbs.hpp"
#include "cdg/sidecar.hpp"
#include "cdg/solver.hpp"
#include "cdg/state_io.hpp"
#include "cdg/vtk.hpp"

namespace cdg {

CurveReport cmd_curve(const CaseConfig& config, std::ostream& log) {
  const Mesh mesh = read_gmsh_file(config.mesh_path);
  const auto& cv = config.curving;

  const Box box{cv.box_min, cv.box_max};
  const SubMesh sub = extract_submesh(mesh, box, cv.surface_tag, cv.symmetry_tags);
  log << "sub-mesh: " << sub.n_elements() << " of " << mesh.n_elements()
      << " elements inside the curving box\n";

  std::function<Vec3(const Vec3&)> g;
  NurbsSurface surface;
  if (cv.surface_type == "sphere") {
    const Vec3 center = cv.sphere_center;
    const double radius = cv.sphere_radius;
    g = [center, radius](const Vec3& x) { return sphere_displacement(center, radius, x); };
  } else {
    surface = read_nurbs_file(cv.nurbs_path);
    g = [&surface](const Vec3& x) { return boundary_displacement(surface, x); };
  }

  const auto material = ElasticMaterial::from_E_nu(cv.youngs_modulus, cv.poisson_ratio);
  const int p_fem = cv.fem_degree > 0 ? cv.fem_degree : cv.dg_degree;
  const DeformationField field = solve_elasticity(sub, material, g, p_fem);
  log << "elasticity: degree " << p_fem << ", " << field.n_nodes() << " FEM nodes\n";

  auto re = get_reference_element(cv.dg_degree);
  const CurvedMesh cmesh = curve_mesh(mesh, sub, field, *re);

  CurveReport report;
  report.n_elements = mesh.n_elements();
  report.n_curved = cmesh.n_curved();

  // quality gate with the quadrature the solver will use on curved elements
  const auto re_solver = get_reference_element(
      cv.dg_degree, curved_volume_strength(cv.dg_degree),
      curved_face_strength(cv.dg_degree));
  double min_jac = 1e300;
  double max_defect = 0.0;
  const SharedOperators shared = make_shared_operators(*re_solver);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    if (!cmesh.is_curved(e)) continue;
    const ElementGeometry geom = compute_mapping(cmesh.curved_nodes(e), *re_solver, e);
    for (double j : geom.cub_jac) min_jac = std::min(min_jac, j);
    const ElementOperators ops = build_operators(geom, *re_solver, shared);
    max_defect = std::max(max_defect, discrete_divergence_check(geom, ops, *re_solver));
  }
  report.min_jacobian = min_jac;
  report.max_divergence_defect = max_defect;

  const std::string out = config.curved_mesh_path.empty() ? "curved.cdg"
                                                          : config.curved_mesh_path;
  write_curved_mesh(cmesh, out);
  report.sidecar_path = out;

  log << "curved " << report.n_curved << " elements at degree " << cv.dg_degree
      << "; min mapping Jacobian " << report.min_jacobian
      << "; max constant-field divergence defect " << report.max_divergence_defect
      << "\n";
  log << "sidecar written to " << out << "\n";
  return report;
}

namespace {

void validate_boundary_tags(const CaseConfig& config, const Mesh& mesh) {
  for (const auto& [tag, kind] : config.boundary_kinds) {
    (void)kind;
    bool found = false;
    for (const auto& bf : mesh.boundary_faces) found = found || bf.tag == tag;
    if (!found)
      throw ConfigError("config references boundary tag '" + tag +
                        "' which is not present in the mesh");
  }
}

}  // namespace

SolveReport cmd_solve(const CaseConfig& config, std::ostream& log) {
  const Mesh mesh = read_gmsh_file(config.mesh_path);
  validate_boundary_tags(config, mesh);

  CurvedMesh cmesh;
  if (!config.curved_mesh_path.empty() &&
      std::filesystem::exists(config.curved_mesh_path)) {
    cmesh = read_curved_mesh(mesh, config.curved_mesh_path);
    log << "curved sidecar: " << cmesh.n_curved() << " curved elements at degree "
        << cmesh.degree() << "\n";
  } else {
    if (!config.curved_mesh_path.empty())
      log << "curved sidecar '" << config.curved_mesh_path
          << "' not found; running on the straight mesh\n";
    cmesh = CurvedMesh(mesh, config.run.p_schedule.back());
  }

  const ConservedState u_inf = config.freestream.state(config.gas);

  std::ofstream csv(config.output_log);
  if (!csv) throw ConfigError("cannot open '" + config.output_log + "' for writing");
  csv << "level,iteration,dt,residual_inf,wall_seconds\n";
  csv.precision(17);

  SolveReport report;
  const SteadyResult result =
      run_steady(cmesh, config.bc_map(), config.run, u_inf, [&](const ConvergenceRow& r) {
        csv << r.level << "," << r.iteration << "," << r.dt << "," << r.residual << ","
            << r.wall_seconds << "\n";
        csv.flush();
        log << "p=" << r.level << " iter=" << r.iteration << " dt=" << r.dt
            << " residual=" << r.residual << "\n";
      });

  report.converged = result.converged;
  report.final_degree = result.final_degree;
  for (const auto& row : result.log) report.total_iterations = std::max(
      report.total_iterations, row.level == result.final_degree ? row.iteration : 0L);
  if (!result.log.empty()) report.final_residual = result.log.back().residual;

  StateFile state;
  state.degree = result.final_degree;
  state.gamma = config.gas.gamma;
  state.store = result.solution;
  write_state(state, mesh, config.output_state);
  report.state_path = config.output_state;
  report.log_path = config.output_log;
  log << "final state written to " << config.output_state << "\n";
  return report;
}

void cmd_export(const CaseConfig& config, const std::string& state_path,
                const std::string& out_path, std::ostream& log) {
  const Mesh mesh = read_gmsh_file(config.mesh_path);
  const StateFile state = read_state(mesh, state_path);

  CurvedMesh cmesh;
  if (!config.curved_mesh_path.empty() &&
      std::filesystem::exists(config.curved_mesh_path)) {
    cmesh = read_curved_mesh(mesh, config.curved_mesh_path);
  } else {
    cmesh = CurvedMesh(mesh, state.degree);
  }

  auto re = get_reference_element(state.degree);
  GasModel gas{state.gamma};

  std::vector<double> eps(mesh.n_elements(), 0.0);
  if (config.run.viscosity.enabled) {
    for (int e = 0; e < mesh.n_elements(); ++e) {
      Eigen::VectorXd nodal(re->n_basis());
      const double* rho = state.store.field(e, config.run.viscosity.indicator_component);
      for (int i = 0; i < re->n_basis(); ++i) nodal(i) = rho[i];
      eps[e] = viscosity_amount(smoothness_indicator(nodal, *re), state.degree,
                                config.run.viscosity);
    }
  }

  export_vtk_file(cmesh, *re, state.store, gas, eps, out_path);
  log << "VTK written to " << out_path << "\n";
}

}  // namespace cdg
