#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>

#include "cdg/cli_ops.hpp"
#include "cdg/meshgen.hpp"
#include "cdg/solver.hpp"

namespace cdg {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.empty() ? 0.0 : v[v.size() / 2];
}

SolutionStore random_admissible_store(const DgLevel& level, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  SolutionStore store = level.make_store();
  const int np = level.refelem().n_basis();
  for (int e = 0; e < level.n_elements(); ++e) {
    for (int i = 0; i < np; ++i) {
      const double rho = 1.0 + jitter(gen);
      const Vec3 v{0.3 + jitter(gen), jitter(gen), jitter(gen)};
      const double p = 1.0 + jitter(gen);
      store.field(e, 0)[i] = rho;
      store.field(e, 1)[i] = rho * v.x;
      store.field(e, 2)[i] = rho * v.y;
      store.field(e, 3)[i] = rho * v.z;
      store.field(e, 4)[i] = p / 0.4 + 0.5 * rho * dot(v, v);
    }
  }
  return store;
}

using Clock = std::chrono::steady_clock;

double time_once(const std::function<void()>& fn) {
  const auto t0 = Clock::now();
  fn();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Volume part only: interpolate to cubature, pointwise flux, stiffness
// products, mass solve.
void volume_kernel(const DgLevel& level, const SolutionStore& u, const GasModel& gas,
                   SolutionStore& rhs) {
  const auto& re = level.refelem();
  const int np = re.n_basis();
  const int ncub = re.n_cub();
#pragma omp parallel
  {
    std::vector<double> ucub(kNumFields * ncub), flux(3 * kNumFields * ncub);
    std::vector<double> vol(np), out(np);
#pragma omp for schedule(static)
    for (int e = 0; e < level.n_elements(); ++e) {
      const auto& ops = level.ops(e);
      for (int c = 0; c < kNumFields; ++c)
        gemv(*ops.interp_cub, u.field(e, c), ucub.data() + c * ncub);
      for (int q = 0; q < ncub; ++q) {
        const double rho = ucub[q];
        const Vec3 m{ucub[ncub + q], ucub[2 * ncub + q], ucub[3 * ncub + q]};
        const double rhoE = ucub[4 * ncub + q];
        const double p = (gas.gamma - 1.0) * (rhoE - dot(m, m) / (2.0 * rho));
        const Vec3 v = m / rho;
        for (int d = 0; d < 3; ++d) {
          double* fd = flux.data() + (d * kNumFields) * ncub;
          fd[q] = m[d];
          fd[ncub + q] = m.x * v[d];
          fd[2 * ncub + q] = m.y * v[d];
          fd[3 * ncub + q] = m.z * v[d];
          fd[(1 + d) * ncub + q] += p;
          fd[4 * ncub + q] = v[d] * (rhoE + p);
        }
      }
      for (int c = 0; c < kNumFields; ++c) {
        std::fill(vol.begin(), vol.end(), 0.0);
        for (int m = 0; m < 3; ++m)
          gemv_acc(ops.s[m], flux.data() + (m * kNumFields + c) * ncub, vol.data());
        ops.mass_solve(vol.data(), out.data());
        double* dst = rhs.field(e, c);
        for (int i = 0; i < np; ++i) dst[i] = out[i];
      }
    }
  }
}

// Surface part only: trace gather, Riemann flux, face-mass product.
void surface_kernel(const DgLevel& level, const SolutionStore& traces,
                    const GasModel& gas, const ConservedState& u_inf,
                    SolutionStore& rhs) {
  const auto& re = level.refelem();
  const int np = re.n_basis();
  const int ng = re.n_face_quad();
  const int nface = 4 * ng;
#pragma omp parallel
  {
    std::vector<double> fstar(kNumFields * nface), surf(np), out(np);
#pragma omp for schedule(static)
    for (int e = 0; e < level.n_elements(); ++e) {
      const auto& ops = level.ops(e);
      const auto& geom = level.geom(e);
      for (int f = 0; f < 4; ++f) {
        const auto& fc = level.coupling(e, f);
        for (int g = 0; g < ng; ++g) {
          const int q = f * ng + g;
          const Vec3& n = geom.face_normal[q];
          ConservedState um, up;
          um.rho = traces.field(e, 0)[q];
          um.mom = {traces.field(e, 1)[q], traces.field(e, 2)[q],
                    traces.field(e, 3)[q]};
          um.rhoE = traces.field(e, 4)[q];
          if (fc.neighbor >= 0) {
            const int idx = fc.neighbor_face * ng + fc.node_map[g];
            up.rho = traces.field(fc.neighbor, 0)[idx];
            up.mom = {traces.field(fc.neighbor, 1)[idx],
                      traces.field(fc.neighbor, 2)[idx],
                      traces.field(fc.neighbor, 3)[idx]};
            up.rhoE = traces.field(fc.neighbor, 4)[idx];
          } else {
            up = boundary_state(um, n, fc.bc, u_inf);
          }
          const Flux5 fs = llf_flux(um, up, n, gas);
          for (int c = 0; c < kNumFields; ++c) fstar[c * nface + q] = fs[c];
        }
      }
      for (int c = 0; c < kNumFields; ++c) {
        gemv(ops.face_mass, fstar.data() + c * nface, surf.data());
        ops.mass_solve(surf.data(), out.data());
        double* dst = rhs.field(e, c);
        for (int i = 0; i < np; ++i) dst[i] = out[i];
      }
    }
  }
}

}  // namespace

void cmd_bench(const BenchConfig& config, std::ostream& csv) {
  csv << "kernel,layout,threads,p,elements,repetitions,median_seconds\n";
  if (config.repetitions <= 0) return;

  const int n =
      std::max(1, static_cast<int>(std::lround(std::cbrt(config.elements / 6.0))));
  const Mesh mesh = make_cube_mesh(n, "wall");
  const int max_threads = config.threads > 0 ? config.threads : omp_get_max_threads();

  const GasModel gas;
  const ConservedState u_inf = FreestreamConfig{0.3, 0.0, 1.0, 1.0}.state(gas);
  const BcMap bcs = {{"wall", BcKind::SlipWall}};
  const RKScheme scheme = RKScheme::low_storage_rk4();

  std::vector<int> thread_counts = {1};
  if (max_threads > 1) thread_counts.push_back(max_threads);

  for (const bool padded : {true, false}) {
    CurvedMesh cmesh(mesh, config.p);
    DgLevel level(cmesh, get_reference_element(config.p), bcs, padded);
    const SolutionStore u = random_admissible_store(level, 42);

    for (const int threads : thread_counts) {
      omp_set_num_threads(threads);
      SolutionStore traces = level.make_trace_store();
      SolutionStore rhs = level.make_store();
      SolutionStore res = level.make_store();
      SolutionStore work = u;
      interpolate_to_faces(level, work, traces);

      std::vector<double> t_vol, t_surf, t_rk;
      for (int rep = 0; rep < config.repetitions; ++rep) {
        t_vol.push_back(time_once([&] { volume_kernel(level, work, gas, rhs); }));
        t_surf.push_back(
            time_once([&] { surface_kernel(level, traces, gas, u_inf, rhs); }));
        t_rk.push_back(time_once([&] {
          double* pres = res.raw().data();
          double* pu = work.raw().data();
          const double* prhs = rhs.raw().data();
          const long long count = static_cast<long long>(work.raw().size());
#pragma omp parallel for schedule(static)
          for (long long i = 0; i < count; ++i) {
            pres[i] = scheme.a[1] * pres[i] + 1e-9 * prhs[i];
            pu[i] += scheme.b[1] * pres[i];
          }
        }));
      }

      const char* layout = padded ? "padded" : "unpadded";
      auto row = [&](const char* kernel, double t) {
        csv << kernel << "," << layout << "," << threads << "," << config.p << ","
            << mesh.n_elements() << "," << config.repetitions << "," << t << "\n";
      };
      row("volume", median(t_vol));
      row("surface", median(t_surf));
      row("rk_update", median(t_rk));
    }
  }
  omp_set_num_threads(max_threads);
}

}  // namespace cdg
