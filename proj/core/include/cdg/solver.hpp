#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cdg/curved_mesh.hpp"
#include "cdg/euler.hpp"
#include "cdg/operators.hpp"
#include "cdg/rk.hpp"
#include "cdg/solution_store.hpp"
#include "cdg/viscosity.hpp"

namespace cdg {

/// Solver-facing run parameters (a subset of the full case config).
struct RunConfig {
  std::string riemann = "llf";  // "llf" or "hllc"
  GasModel gas;
  double cfl = 0.5;
  double dt_override = 0.0;  // > 0 replaces the CFL formula
  ViscosityModel viscosity;
  std::vector<int> p_schedule = {2, 3, 4};
  double final_tolerance = 1e-9;
  double intermediate_tolerance = 1e-4;
  int max_iterations_per_level = 20000;
  std::vector<int> fixed_iterations;  // per level; when set, overrides tolerances
  int check_interval = 1000;
  std::string residual_norm = "inf";  // or "l2"
  bool deterministic = true;          // fixed-order reductions (always honored)
  bool padded = true;
  // raise quadrature strengths on meshes with curved elements so the
  // isoparametric metric terms integrate exactly (free-stream preservation)
  bool curved_quadrature = true;
};

/// Boundary condition map: mesh tag -> kind.
using BcMap = std::vector<std::pair<std::string, BcKind>>;

/// One side of a face as the surface kernel sees it: interior faces carry the
/// neighbor and the quadrature-node pairing permutation, boundary faces the
/// BC kind.
struct FaceCoupling {
  int neighbor = -1;          // -1 for boundary faces
  int neighbor_face = -1;
  std::vector<int> node_map;  // my g -> neighbor-local face node index
  BcKind bc = BcKind::Farfield;
};

/// Everything the kernels need for one polynomial level on one mesh.
class DgLevel {
 public:
  DgLevel(const CurvedMesh& cmesh, std::shared_ptr<const ReferenceElement> re,
          const BcMap& bc_map, bool padded = true);

  const Mesh& mesh() const { return *mesh_; }
  const ReferenceElement& refelem() const { return *re_; }
  int n_elements() const { return static_cast<int>(ops_.size()); }
  const ElementOperators& ops(int e) const { return ops_[e]; }
  const ElementGeometry& geom(int e) const { return geom_[e]; }
  const FaceCoupling& coupling(int e, int f) const { return coupling_[e][f]; }
  bool padded() const { return padded_; }

  SolutionStore make_store() const;
  SolutionStore make_trace_store() const;

  /// Worst-case discrete divergence of a constant field over all elements.
  double max_divergence_defect() const;

 private:
  const Mesh* mesh_ = nullptr;
  std::shared_ptr<const ReferenceElement> re_;
  SharedOperators shared_;
  std::vector<ElementGeometry> geom_;
  std::vector<ElementOperators> ops_;
  std::vector<std::array<FaceCoupling, 4>> coupling_;
  bool padded_ = true;
};

/// Workspace reused across RHS evaluations (per-thread scratch, trace
/// stores, viscous auxiliaries).
struct RhsWorkspace;
std::shared_ptr<RhsWorkspace> make_workspace(const DgLevel& level);

/// Traces U^g = I_g U per element field. Padding slots stay zero.
void interpolate_to_faces(const DgLevel& level, const SolutionStore& u,
                          SolutionStore& traces);

/// Semidiscrete right-hand side of the curved-element DG scheme, with the
/// artificial-viscosity extension when cfg.viscosity.enabled and any element
/// indicator fires. Throws NumericsError naming element and node on
/// inadmissible states.
void compute_rhs(const DgLevel& level, const SolutionStore& u, const RunConfig& cfg,
                 const ConservedState& freestream, SolutionStore& rhs,
                 RhsWorkspace& ws);

/// Per-element artificial viscosity values from the current solution
/// (populated by compute_rhs when the model is enabled).
const std::vector<double>& current_viscosity(const RhsWorkspace& ws);

/// Auxiliary gradient q_m (nodal) from the last viscous RHS evaluation.
const SolutionStore& aux_gradient(const RhsWorkspace& ws, int direction);

/// One low-storage RK step: res = a_i res + dt RHS(u); u += b_i res.
/// `res` must persist across steps (two-register scheme).
void rk_step(const DgLevel& level, SolutionStore& u, SolutionStore& res,
             const RunConfig& cfg, const ConservedState& freestream, double dt,
             const RKScheme& scheme, RhsWorkspace& ws);

/// CFL time step: cfl * min_k h_k / (lambda_max,k (p+1)^2). When per-element
/// viscosities are supplied, the explicit diffusion limit
/// h^2 / (eps (p+1)^4) is applied as well.
double compute_timestep(const DgLevel& level, const SolutionStore& u,
                        const RunConfig& cfg,
                        const std::vector<double>* element_viscosity = nullptr);

/// Embeds nodal data from degree p1 into degree p2 >= p1 by zero-extending
/// the hierarchical modal coefficients (p2 = p1 is the identity).
SolutionStore p_refine_embed(const SolutionStore& u, const ReferenceElement& re_from,
                             const ReferenceElement& re_to, bool padded = true);

struct ConvergenceRow {
  int level = 0;
  long iteration = 0;
  double dt = 0.0;
  double residual = 0.0;
  double wall_seconds = 0.0;
};

struct SteadyResult {
  SolutionStore solution;
  int final_degree = 0;
  std::vector<ConvergenceRow> log;
  bool converged = false;
};

/// Uniform freestream initial state for a level.
SolutionStore freestream_store(const DgLevel& level, const ConservedState& u_inf);

/// Reference element a solver level should use: default strengths on straight
/// meshes, curved strengths when the mesh carries curved elements (and the
/// config keeps curved_quadrature on).
std::shared_ptr<const ReferenceElement> level_reference_element(const CurvedMesh& cmesh,
                                                                int p,
                                                                const RunConfig& cfg);

/// p-refinement pseudo-time march over cfg.p_schedule. Builds one DgLevel per
/// degree, embeds the solution upward between levels, checks the residual
/// norm every cfg.check_interval iterations, and aborts on divergence
/// (residual above 1e6 x initial).
SteadyResult run_steady(const CurvedMesh& cmesh, const BcMap& bc_map,
                        const RunConfig& cfg, const ConservedState& freestream,
                        const std::function<void(const ConvergenceRow&)>& on_row = {});

}  // namespace cdg
