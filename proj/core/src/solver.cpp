#include "cdg/solver.hpp"

#include <omp.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <mutex>

namespace cdg {

namespace {

enum class Riemann { Llf, Hllc };

Riemann riemann_from_string(const std::string& name) {
  if (name == "llf") return Riemann::Llf;
  if (name == "hllc") return Riemann::Hllc;
  throw ConfigError("unknown Riemann solver '" + name + "' (llf|hllc)");
}

struct Scratch {
  std::vector<double> ucub;   // kNumFields x ncub
  std::vector<double> flux;   // 3 x kNumFields x ncub
  std::vector<double> fstar;  // kNumFields x nface
  std::vector<double> vol;    // kNumFields x np
  std::vector<double> tmp;    // np
  std::vector<double> qcub;   // 3 x kNumFields x ncub (viscous)

  void size_for(int np, int ncub, int nface) {
    ucub.assign(static_cast<size_t>(kNumFields) * ncub, 0.0);
    flux.assign(static_cast<size_t>(3) * kNumFields * ncub, 0.0);
    fstar.assign(static_cast<size_t>(kNumFields) * nface, 0.0);
    vol.assign(static_cast<size_t>(kNumFields) * np, 0.0);
    tmp.assign(np, 0.0);
    qcub.assign(static_cast<size_t>(3) * kNumFields * ncub, 0.0);
  }
};

}  // namespace

struct RhsWorkspace {
  const DgLevel* level = nullptr;
  SolutionStore traces;
  SolutionStore rhs_buffer;
  std::array<SolutionStore, 3> q_nodal;
  std::array<SolutionStore, 3> q_traces;
  std::vector<double> eps, sqrt_eps;
  bool viscous_active = false;
  std::vector<Scratch> scratch;
  std::atomic<long> hllc_fallbacks{0};

  std::atomic<bool> failed{false};
  std::string error_msg;
  std::mutex error_mutex;

  void record_error(const std::string& msg) {
    if (!failed.exchange(true)) {
      std::lock_guard<std::mutex> lock(error_mutex);
      error_msg = msg;
    }
  }
  void rethrow_if_failed() {
    if (failed.load()) {
      failed.store(false);
      throw NumericsError(error_msg);
    }
  }
};

std::shared_ptr<RhsWorkspace> make_workspace(const DgLevel& level) {
  auto ws = std::make_shared<RhsWorkspace>();
  ws->level = &level;
  ws->traces = level.make_trace_store();
  ws->rhs_buffer = level.make_store();
  const int np = level.refelem().n_basis();
  const int ncub = level.refelem().n_cub();
  const int nface = 4 * level.refelem().n_face_quad();
  ws->scratch.resize(omp_get_max_threads());
  for (auto& s : ws->scratch) s.size_for(np, ncub, nface);
  ws->eps.assign(level.n_elements(), 0.0);
  ws->sqrt_eps.assign(level.n_elements(), 0.0);
  return ws;
}

const std::vector<double>& current_viscosity(const RhsWorkspace& ws) { return ws.eps; }

const SolutionStore& aux_gradient(const RhsWorkspace& ws, int direction) {
  return ws.q_nodal[direction];
}

// ---------------------------------------------------------------------------
// DgLevel construction
// ---------------------------------------------------------------------------

DgLevel::DgLevel(const CurvedMesh& cmesh, std::shared_ptr<const ReferenceElement> re,
                 const BcMap& bc_map, bool padded)
    : mesh_(&cmesh.mesh()), re_(std::move(re)), padded_(padded) {
  const int ne = mesh_->n_elements();
  shared_ = make_shared_operators(*re_, padded_);

  std::shared_ptr<const ReferenceElement> re_stored;
  if (cmesh.n_curved() > 0) re_stored = get_reference_element(cmesh.degree());

  geom_.resize(ne);
  ops_.resize(ne);
  std::atomic<bool> failed{false};
  std::string error_msg;
  std::mutex error_mutex;

#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    if (failed.load()) continue;
    try {
      const auto nodes = re_stored ? cmesh.element_nodes_for_degree(e, *re_, *re_stored)
                                   : CurvedMesh::straight_nodes(*mesh_, e, *re_);
      geom_[e] = compute_mapping(nodes, *re_, e);
      ops_[e] = build_operators(geom_[e], *re_, shared_, padded_);
    } catch (const std::exception& ex) {
      if (!failed.exchange(true)) {
        std::lock_guard<std::mutex> lock(error_mutex);
        error_msg = ex.what();
      }
    }
  }
  if (failed.load()) throw NumericsError(error_msg);

  // Face coupling: quadrature-node pairing by physical position.
  std::vector<std::string> tag_names;
  std::vector<BcKind> tag_kinds;
  for (const auto& [tag, kind] : bc_map) {
    tag_names.push_back(tag);
    tag_kinds.push_back(kind);
  }
  auto kind_for_tag = [&](const std::string& tag) {
    for (size_t i = 0; i < tag_names.size(); ++i)
      if (tag_names[i] == tag) return tag_kinds[i];
    throw ConfigError("no boundary condition configured for mesh tag '" + tag + "'");
  };

  const int ng = re_->n_face_quad();
  coupling_.resize(ne);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    for (int f = 0; f < 4; ++f) {
      FaceCoupling fc;
      if (mesh_->links[e][f]) {
        const auto& link = *mesh_->links[e][f];
        fc.neighbor = link.other.element;
        fc.neighbor_face = link.other.local_face;
        fc.node_map.resize(ng);
        const double scale = std::cbrt(std::abs(mesh_->signed_volume(e))) + 1e-30;
        for (int g = 0; g < ng; ++g) {
          const Vec3 mine = geom_[e].face_phys[f * ng + g];
          int match = -1;
          double best = 1e300;
          for (int h = 0; h < ng; ++h) {
            const Vec3 theirs = geom_[fc.neighbor].face_phys[fc.neighbor_face * ng + h];
            const double d = norm(mine - theirs);
            if (d < best) {
              best = d;
              match = h;
            }
          }
          if (best > 1e-8 * scale) {
            throw NumericsError("face quadrature pairing failed between elements " +
                                std::to_string(e) + " and " + std::to_string(fc.neighbor) +
                                " (mismatch " + std::to_string(best) + ")");
          }
          fc.node_map[g] = match;
        }
      } else {
        fc.bc = kind_for_tag(mesh_->boundary_faces[mesh_->boundary_index[e][f]].tag);
      }
      coupling_[e][f] = fc;
    }
  }
}

SolutionStore DgLevel::make_store() const {
  return SolutionStore(n_elements(), re_->n_basis(), padded_);
}

SolutionStore DgLevel::make_trace_store() const {
  return SolutionStore(n_elements(), 4 * re_->n_face_quad(), padded_);
}

double DgLevel::max_divergence_defect() const {
  double worst = 0.0;
  for (int e = 0; e < n_elements(); ++e)
    worst = std::max(worst, discrete_divergence_check(geom_[e], ops_[e], *re_));
  return worst;
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

void interpolate_to_faces(const DgLevel& level, const SolutionStore& u,
                          SolutionStore& traces) {
  const int ne = level.n_elements();
#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    const auto& ig = *level.ops(e).interp_face;
    for (int c = 0; c < kNumFields; ++c) gemv(ig, u.field(e, c), traces.field(e, c));
  }
}

namespace {

inline ConservedState load_state(const double* const* fields, int idx) {
  ConservedState s;
  s.rho = fields[0][idx];
  s.mom = {fields[1][idx], fields[2][idx], fields[3][idx]};
  s.rhoE = fields[4][idx];
  return s;
}

// Gathers the two trace states at face-node g of (e, f); up is the ghost
// state on boundary faces. Returns the neighbor element id (or e itself).
inline int gather_pair(const DgLevel& level, const SolutionStore& traces, int e, int f,
                       int g, int ng, const ConservedState& freestream, const Vec3& n,
                       ConservedState& um, ConservedState& up) {
  const double* mine[kNumFields];
  for (int c = 0; c < kNumFields; ++c) mine[c] = traces.field(e, c);
  um = load_state(mine, f * ng + g);
  const auto& fc = level.coupling(e, f);
  if (fc.neighbor >= 0) {
    const double* theirs[kNumFields];
    for (int c = 0; c < kNumFields; ++c) theirs[c] = traces.field(fc.neighbor, c);
    up = load_state(theirs, fc.neighbor_face * ng + fc.node_map[g]);
    return fc.neighbor;
  }
  up = boundary_state(um, n, fc.bc, freestream);
  return e;
}

void compute_element_viscosities(const DgLevel& level, const SolutionStore& u,
                                 const RunConfig& cfg, RhsWorkspace& ws) {
  const auto& re = level.refelem();
  const int ne = level.n_elements();
  const int np = re.n_basis();
  const int comp = cfg.viscosity.indicator_component;
#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    Eigen::VectorXd nodal(np);
    const double* field = u.field(e, comp);
    for (int i = 0; i < np; ++i) nodal(i) = field[i];
    const double sk =
        cfg.viscosity.jacobian_weighted
            ? smoothness_indicator(nodal, re, &level.geom(e).cub_jac)
            : smoothness_indicator(nodal, re);
    ws.eps[e] = viscosity_amount(sk, re.degree(), cfg.viscosity);
    ws.sqrt_eps[e] = std::sqrt(ws.eps[e]);
  }
  double max_eps = 0.0;
  for (double v : ws.eps) max_eps = std::max(max_eps, v);
  ws.viscous_active = max_eps > 0.0;
}

// Auxiliary first-order system: q_m = M^-1 [ -sqrt(eps) S_m U_cub
//   + M_dOmega ((sqrt(eps) U)*_m) ], central traces with per-side sqrt(eps).
void compute_aux_gradient(const DgLevel& level, const SolutionStore& u,
                          const ConservedState& freestream, RhsWorkspace& ws) {
  const auto& re = level.refelem();
  const int ne = level.n_elements();
  const int np = re.n_basis();
  const int ng = re.n_face_quad();
  const int nface = 4 * ng;

#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    if (ws.failed.load()) continue;
    Scratch& s = ws.scratch[omp_get_thread_num()];
    const auto& ops = level.ops(e);
    const auto& geom = level.geom(e);
    const double se = ws.sqrt_eps[e];

    for (int c = 0; c < kNumFields; ++c)
      gemv(*ops.interp_cub, u.field(e, c), s.ucub.data() + c * ops.n_cub);

    for (int m = 0; m < 3; ++m) {
      for (int c = 0; c < kNumFields; ++c) {
        double* vol = s.vol.data() + c * np;
        std::fill(vol, vol + np, 0.0);
        gemv_sub(ops.s[m], s.ucub.data() + c * ops.n_cub, vol);
        for (int i = 0; i < np; ++i) vol[i] *= se;
      }
      // central trace (sqrt(eps) U)* projected on n_m
      for (int f = 0; f < 4; ++f) {
        const auto& fc = level.coupling(e, f);
        for (int g = 0; g < ng; ++g) {
          const int q = f * ng + g;
          const Vec3& n = geom.face_normal[q];
          ConservedState um, up;
          const int nb = gather_pair(level, ws.traces, e, f, g, ng, freestream, n, um, up);
          const double snb = ws.sqrt_eps[nb];
          (void)fc;
          for (int c = 0; c < kNumFields; ++c)
            s.fstar[c * nface + q] = 0.5 * (se * um[c] + snb * up[c]) * n[m];
        }
      }
      for (int c = 0; c < kNumFields; ++c) {
        gemv_acc(ops.face_mass, s.fstar.data() + c * nface, s.vol.data() + c * np);
        ops.mass_solve(s.vol.data() + c * np, s.tmp.data());
        double* out = ws.q_nodal[m].field(e, c);
        for (int i = 0; i < np; ++i) out[i] = s.tmp[i];
      }
    }
  }
  ws.rethrow_if_failed();

#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    const auto& ig = *level.ops(e).interp_face;
    for (int m = 0; m < 3; ++m)
      for (int c = 0; c < kNumFields; ++c)
        gemv(ig, ws.q_nodal[m].field(e, c), ws.q_traces[m].field(e, c));
  }
}

}  // namespace

void compute_rhs(const DgLevel& level, const SolutionStore& u, const RunConfig& cfg,
                 const ConservedState& freestream, SolutionStore& rhs,
                 RhsWorkspace& ws) {
  const auto& re = level.refelem();
  const int ne = level.n_elements();
  const int np = re.n_basis();
  const int ncub = re.n_cub();
  const int ng = re.n_face_quad();
  const int nface = 4 * ng;
  const Riemann riemann = riemann_from_string(cfg.riemann);
  const GasModel gas = cfg.gas;

  bool viscous = false;
  if (cfg.viscosity.enabled) {
    compute_element_viscosities(level, u, cfg, ws);
    viscous = ws.viscous_active;
    if (viscous && ws.q_nodal[0].n_elements() == 0) {
      for (int m = 0; m < 3; ++m) {
        ws.q_nodal[m] = level.make_store();
        ws.q_traces[m] = level.make_trace_store();
      }
    }
  }

  // Phase 1: all traces, then (viscous only) the auxiliary gradient.
  interpolate_to_faces(level, u, ws.traces);
  if (viscous) compute_aux_gradient(level, u, freestream, ws);

  // Phase 2: volume + surface + mass solve, element-parallel.
#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    if (ws.failed.load()) continue;
    Scratch& s = ws.scratch[omp_get_thread_num()];
    const auto& ops = level.ops(e);
    const auto& geom = level.geom(e);
    const double se = viscous ? ws.sqrt_eps[e] : 0.0;

    for (int c = 0; c < kNumFields; ++c)
      gemv(*ops.interp_cub, u.field(e, c), s.ucub.data() + c * ncub);
    if (viscous && ws.sqrt_eps[e] > 0.0) {
      for (int m = 0; m < 3; ++m)
        for (int c = 0; c < kNumFields; ++c)
          gemv(*ops.interp_cub, ws.q_nodal[m].field(e, c),
               s.qcub.data() + (m * kNumFields + c) * ncub);
    }

    // Pointwise flux at cubature nodes.
    const double* uc[kNumFields];
    for (int c = 0; c < kNumFields; ++c) uc[c] = s.ucub.data() + c * ncub;
    for (int q = 0; q < ncub; ++q) {
      const ConservedState state = load_state(uc, q);
      if (!admissible(state, gas)) {
        ws.record_error("inadmissible state in element " + std::to_string(e) +
                        " at cubature node " + std::to_string(q) +
                        " (rho=" + std::to_string(state.rho) + ")");
        break;
      }
      const double p = (gas.gamma - 1.0) * (state.rhoE - dot(state.mom, state.mom) /
                                                              (2.0 * state.rho));
      const Vec3 v = state.mom / state.rho;
      for (int d = 0; d < 3; ++d) {
        double* fd = s.flux.data() + (d * kNumFields) * ncub;
        const double vd = v[d];
        fd[0 * ncub + q] = state.mom[d];
        fd[1 * ncub + q] = state.mom.x * vd;
        fd[2 * ncub + q] = state.mom.y * vd;
        fd[3 * ncub + q] = state.mom.z * vd;
        fd[(1 + d) * ncub + q] += p;
        fd[4 * ncub + q] = vd * (state.rhoE + p);
      }
    }
    if (ws.failed.load()) continue;

    if (viscous && ws.sqrt_eps[e] > 0.0) {
      // F_m <- F_m - sqrt(eps) q_m at the cubature nodes
      for (int m = 0; m < 3; ++m)
        for (int c = 0; c < kNumFields; ++c) {
          double* fd = s.flux.data() + (m * kNumFields + c) * ncub;
          const double* qc = s.qcub.data() + (m * kNumFields + c) * ncub;
          for (int q = 0; q < ncub; ++q) fd[q] -= se * qc[q];
        }
    }

    for (int c = 0; c < kNumFields; ++c) {
      double* vol = s.vol.data() + c * np;
      std::fill(vol, vol + np, 0.0);
      for (int m = 0; m < 3; ++m)
        gemv_acc(ops.s[m], s.flux.data() + (m * kNumFields + c) * ncub, vol);
    }

    // Surface kernel.
    bool bad = false;
    for (int f = 0; f < 4 && !bad; ++f) {
      const auto& fc = level.coupling(e, f);
      for (int g = 0; g < ng; ++g) {
        const int q = f * ng + g;
        const Vec3& n = geom.face_normal[q];
        ConservedState um, up;
        const int nb = gather_pair(level, ws.traces, e, f, g, ng, freestream, n, um, up);
        if (!admissible(um, gas) || !admissible(up, gas)) {
          ws.record_error("inadmissible trace state in element " + std::to_string(e) +
                          " face " + std::to_string(f) + " node " + std::to_string(g));
          bad = true;
          break;
        }
        Flux5 fs;
        if (riemann == Riemann::Llf) {
          fs = llf_flux(um, up, n, gas);
        } else {
          long fb = 0;
          fs = hllc_flux(um, up, n, gas, &fb);
          if (fb) ws.hllc_fallbacks.fetch_add(fb, std::memory_order_relaxed);
        }
        if (viscous) {
          const double snb = ws.sqrt_eps[nb];
          for (int c = 0; c < kNumFields; ++c) {
            double visc = 0.0;
            for (int m = 0; m < 3; ++m) {
              const double qm_self = ws.q_traces[m].field(e, c)[f * ng + g];
              const double qm_nb =
                  fc.neighbor >= 0
                      ? ws.q_traces[m].field(fc.neighbor, c)[fc.neighbor_face * ng +
                                                             fc.node_map[g]]
                      : qm_self;
              visc += 0.5 * (se * qm_self + snb * qm_nb) * n[m];
            }
            fs[c] -= visc;
          }
        }
        for (int c = 0; c < kNumFields; ++c) s.fstar[c * nface + q] = fs[c];
      }
    }
    if (bad) continue;

    for (int c = 0; c < kNumFields; ++c) {
      gemv_sub(ops.face_mass, s.fstar.data() + c * nface, s.vol.data() + c * np);
      ops.mass_solve(s.vol.data() + c * np, s.tmp.data());
      double* out = rhs.field(e, c);
      for (int i = 0; i < np; ++i) out[i] = s.tmp[i];
    }
  }
  ws.rethrow_if_failed();
}

void rk_step(const DgLevel& level, SolutionStore& u, SolutionStore& res,
             const RunConfig& cfg, const ConservedState& freestream, double dt,
             const RKScheme& scheme, RhsWorkspace& ws) {
  SolutionStore& rhs = ws.rhs_buffer;
  const size_t n = u.raw().size();
  for (int stage = 0; stage < 5; ++stage) {
    compute_rhs(level, u, cfg, freestream, rhs, ws);
    const double a = scheme.a[stage], b = scheme.b[stage];
    double* pres = res.raw().data();
    double* pu = u.raw().data();
    const double* prhs = rhs.raw().data();
    const int ne = level.n_elements();
    const size_t chunk = n / std::max(1, ne);
#pragma omp parallel for schedule(static)
    for (int e = 0; e < ne; ++e) {
      const size_t begin = e * chunk;
      const size_t end = (e + 1 == ne) ? n : begin + chunk;
      for (size_t i = begin; i < end; ++i) {
        pres[i] = a * pres[i] + dt * prhs[i];
        pu[i] += b * pres[i];
      }
    }
  }
}

double compute_timestep(const DgLevel& level, const SolutionStore& u,
                        const RunConfig& cfg,
                        const std::vector<double>* element_viscosity) {
  if (cfg.cfl <= 0.0) throw ConfigError("compute_timestep: CFL must be positive");
  const auto& re = level.refelem();
  const int p = re.degree();
  const int np = re.n_basis();
  const double pfac = (p + 1.0) * (p + 1.0);

  double dt = 1e300;
  for (int e = 0; e < level.n_elements(); ++e) {
    const double* f[kNumFields];
    for (int c = 0; c < kNumFields; ++c) f[c] = u.field(e, c);
    double lambda = 0.0;
    for (int i = 0; i < np; ++i) {
      const ConservedState s = load_state(f, i);
      require_admissible(s, cfg.gas, "compute_timestep");
      const double pres = (cfg.gas.gamma - 1.0) *
                          (s.rhoE - dot(s.mom, s.mom) / (2.0 * s.rho));
      const double c = std::sqrt(cfg.gas.gamma * pres / s.rho);
      lambda = std::max(lambda, norm(s.mom) / s.rho + c);
    }
    const double h = level.geom(e).h();
    if (h <= 0.0 || lambda <= 0.0)
      throw NumericsError("compute_timestep: degenerate h or wavespeed in element " +
                          std::to_string(e));
    double dte = h / (lambda * pfac);
    if (element_viscosity && (*element_viscosity)[e] > 0.0)
      dte = std::min(dte, h * h / ((*element_viscosity)[e] * pfac * pfac));
    dt = std::min(dt, dte);
  }
  return cfg.cfl * dt;
}

SolutionStore p_refine_embed(const SolutionStore& u, const ReferenceElement& re_from,
                             const ReferenceElement& re_to, bool padded) {
  if (re_to.degree() < re_from.degree())
    throw ConfigError("p_refine_embed: target degree must not decrease");
  const int np1 = re_from.n_basis();
  const int np2 = re_to.n_basis();
  const Eigen::MatrixXd embed =
      re_to.vandermonde().leftCols(np1) * re_from.vandermonde_inv();

  SolutionStore out(u.n_elements(), np2, padded);
  Eigen::VectorXd in(np1), res(np2);
  for (int e = 0; e < u.n_elements(); ++e) {
    for (int c = 0; c < kNumFields; ++c) {
      const double* src = u.field(e, c);
      for (int i = 0; i < np1; ++i) in(i) = src[i];
      res = embed * in;
      double* dst = out.field(e, c);
      for (int i = 0; i < np2; ++i) dst[i] = res(i);
    }
  }
  return out;
}

std::shared_ptr<const ReferenceElement> level_reference_element(const CurvedMesh& cmesh,
                                                                int p,
                                                                const RunConfig& cfg) {
  if (cfg.curved_quadrature && cmesh.n_curved() > 0)
    return get_reference_element(p, curved_volume_strength(p), curved_face_strength(p));
  return get_reference_element(p);
}

SolutionStore freestream_store(const DgLevel& level, const ConservedState& u_inf) {
  SolutionStore store = level.make_store();
  const int np = level.refelem().n_basis();
  for (int e = 0; e < level.n_elements(); ++e)
    for (int c = 0; c < kNumFields; ++c) {
      double* f = store.field(e, c);
      for (int i = 0; i < np; ++i) f[i] = u_inf[c];
    }
  return store;
}

namespace {

double residual_norm(const SolutionStore& now, const SolutionStore& before, double dt,
                     const std::string& kind) {
  // fixed element order keeps the reduction deterministic for any thread count
  if (kind == "l2") {
    double sum = 0.0;
    const auto& a = now.raw();
    const auto& b = before.raw();
    for (size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      sum += d * d;
    }
    return std::sqrt(sum) / dt;
  }
  double worst = 0.0;
  const auto& a = now.raw();
  const auto& b = before.raw();
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst / dt;
}

}  // namespace

SteadyResult run_steady(const CurvedMesh& cmesh, const BcMap& bc_map,
                        const RunConfig& cfg, const ConservedState& freestream,
                        const std::function<void(const ConvergenceRow&)>& on_row) {
  if (cfg.p_schedule.empty()) throw ConfigError("run_steady: empty p-schedule");
  for (size_t i = 1; i < cfg.p_schedule.size(); ++i)
    if (cfg.p_schedule[i] <= cfg.p_schedule[i - 1])
      throw ConfigError("run_steady: p-schedule must be strictly increasing");

  SteadyResult result;
  const auto wall_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
        .count();
  };

  SolutionStore u;
  std::shared_ptr<const ReferenceElement> re_prev;

  for (size_t li = 0; li < cfg.p_schedule.size(); ++li) {
    const int p = cfg.p_schedule[li];
    auto re = level_reference_element(cmesh, p, cfg);
    DgLevel level(cmesh, re, bc_map, cfg.padded);

    if (li == 0) {
      u = freestream_store(level, freestream);
    } else {
      u = p_refine_embed(u, *re_prev, *re, cfg.padded);
    }
    re_prev = re;

    auto ws = make_workspace(level);
    SolutionStore res = level.make_store();
    const RKScheme scheme = RKScheme::low_storage_rk4();

    const bool last_level = li + 1 == cfg.p_schedule.size();
    const double tol = last_level ? cfg.final_tolerance : cfg.intermediate_tolerance;
    const long fixed = li < cfg.fixed_iterations.size() ? cfg.fixed_iterations[li] : -1;

    double dt = cfg.dt_override > 0.0 ? cfg.dt_override : compute_timestep(level, u, cfg);
    double initial_residual = -1.0;
    bool level_done = false;
    SolutionStore before = u;

    for (long iter = 1; iter <= cfg.max_iterations_per_level && !level_done; ++iter) {
      const bool check = (iter % cfg.check_interval == 0) ||
                         iter == cfg.max_iterations_per_level ||
                         (fixed > 0 && iter == fixed);
      if (check) before = u;
      rk_step(level, u, res, cfg, freestream, dt, scheme, *ws);
      if (!check) continue;

      const double r = residual_norm(u, before, dt, cfg.residual_norm);
      ConvergenceRow row{p, iter, dt, r, elapsed()};
      result.log.push_back(row);
      if (on_row) on_row(row);

      if (initial_residual < 0.0) initial_residual = std::max(r, 1e-300);
      if (r > 1e6 * initial_residual && r > 1e-12)
        throw NumericsError("run_steady: divergence detected at p=" + std::to_string(p) +
                            " iteration " + std::to_string(iter) + " (residual " +
                            std::to_string(r) + ")");

      if (fixed > 0) {
        if (iter >= fixed) level_done = true;
      } else if (r < tol) {
        level_done = true;
        if (last_level) result.converged = true;
      }
      if (!level_done && cfg.dt_override <= 0.0) {
        // wavespeeds (and the viscosity field) drift during the run
        const std::vector<double>* eps =
            cfg.viscosity.enabled ? &current_viscosity(*ws) : nullptr;
        dt = compute_timestep(level, u, cfg, eps);
      }
    }
    if (last_level && fixed > 0 && !result.log.empty())
      result.converged = result.log.back().residual < cfg.final_tolerance;

    result.final_degree = p;
    if (last_level) result.solution = std::move(u);
  }
  return result;
}

}  // namespace cdg
