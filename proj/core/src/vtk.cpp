#include "cdg/vtk.hpp"

#include <cmath>
#include <fstream>
#include <map>

namespace cdg {

std::vector<std::array<int, 4>> lattice_subtets(int p) {
  // index of lattice site (i,j,k) in the collocation enumeration order
  std::map<std::array<int, 3>, int> idx;
  int count = 0;
  for (int n = 0; n <= p; ++n)
    for (int m = 0; m <= p - n; ++m)
      for (int q = 0; q <= p - n - m; ++q) idx[{q, m, n}] = count++;

  auto at = [&](int i, int j, int k) { return idx.at({i, j, k}); };

  std::vector<std::array<int, 4>> tets;
  tets.reserve(p * p * p);
  for (int k = 0; k < p; ++k) {
    for (int j = 0; j < p - k; ++j) {
      for (int i = 0; i < p - k - j; ++i) {
        const int sum = i + j + k;
        // corner tet
        tets.push_back({at(i, j, k), at(i + 1, j, k), at(i, j + 1, k), at(i, j, k + 1)});
        if (sum <= p - 2) {
          // octahedron around diagonal A-F
          const int a = at(i + 1, j, k), b = at(i, j + 1, k), c = at(i, j, k + 1);
          const int d = at(i + 1, j + 1, k), e = at(i + 1, j, k + 1),
                    f = at(i, j + 1, k + 1);
          tets.push_back({a, f, b, c});
          tets.push_back({a, f, c, e});
          tets.push_back({a, f, e, d});
          tets.push_back({a, f, d, b});
        }
        if (sum <= p - 3) {
          tets.push_back({at(i + 1, j + 1, k), at(i, j + 1, k + 1), at(i + 1, j, k + 1),
                          at(i + 1, j + 1, k + 1)});
        }
      }
    }
  }
  return tets;
}

void export_vtk(const CurvedMesh& cmesh, const ReferenceElement& re,
                const SolutionStore& store, const GasModel& gas,
                const std::vector<double>& element_viscosity, std::ostream& out) {
  const int p = re.degree();
  const int np = re.n_basis();
  if (store.values_per_field() != np)
    throw ParseError("export_vtk: state degree does not match the reference element");
  const int ne = cmesh.mesh().n_elements();
  if (store.n_elements() != ne)
    throw ParseError("export_vtk: state element count does not match the mesh");

  const auto subtets = lattice_subtets(p);
  const long n_points = static_cast<long>(ne) * np;
  const long n_cells = static_cast<long>(ne) * subtets.size();

  out << "# vtk DataFile Version 3.0\n";
  out << "curveddg solution export\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out.precision(17);

  out << "POINTS " << n_points << " double\n";
  for (int e = 0; e < ne; ++e) {
    const auto nodes = cmesh.element_nodes(e, re);
    for (const auto& x : nodes) out << x.x << " " << x.y << " " << x.z << "\n";
  }

  out << "CELLS " << n_cells << " " << n_cells * 5 << "\n";
  for (int e = 0; e < ne; ++e) {
    const long base = static_cast<long>(e) * np;
    for (const auto& t : subtets)
      out << "4 " << base + t[0] << " " << base + t[1] << " " << base + t[2] << " "
          << base + t[3] << "\n";
  }
  out << "CELL_TYPES " << n_cells << "\n";
  for (long i = 0; i < n_cells; ++i) out << "10\n";

  out << "POINT_DATA " << n_points << "\n";
  out << "SCALARS density double 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < ne; ++e) {
    const double* rho = store.field(e, 0);
    for (int i = 0; i < np; ++i) out << rho[i] << "\n";
  }
  out << "VECTORS velocity double\n";
  for (int e = 0; e < ne; ++e) {
    const double* rho = store.field(e, 0);
    const double* mx = store.field(e, 1);
    const double* my = store.field(e, 2);
    const double* mz = store.field(e, 3);
    for (int i = 0; i < np; ++i)
      out << mx[i] / rho[i] << " " << my[i] / rho[i] << " " << mz[i] / rho[i] << "\n";
  }
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  std::vector<double> pressures(static_cast<size_t>(ne) * np);
  {
    size_t k = 0;
    for (int e = 0; e < ne; ++e) {
      const double* f[kNumFields];
      for (int c = 0; c < kNumFields; ++c) f[c] = store.field(e, c);
      for (int i = 0; i < np; ++i) {
        const double rho = f[0][i];
        const double m2 = f[1][i] * f[1][i] + f[2][i] * f[2][i] + f[3][i] * f[3][i];
        pressures[k++] = (gas.gamma - 1.0) * (f[4][i] - m2 / (2.0 * rho));
      }
    }
  }
  for (double v : pressures) out << v << "\n";
  out << "SCALARS mach double 1\nLOOKUP_TABLE default\n";
  {
    size_t k = 0;
    for (int e = 0; e < ne; ++e) {
      const double* f[kNumFields];
      for (int c = 0; c < kNumFields; ++c) f[c] = store.field(e, c);
      for (int i = 0; i < np; ++i) {
        const double rho = f[0][i];
        const double speed =
            std::sqrt(f[1][i] * f[1][i] + f[2][i] * f[2][i] + f[3][i] * f[3][i]) / rho;
        const double c = std::sqrt(gas.gamma * pressures[k++] / rho);
        out << speed / c << "\n";
      }
    }
  }

  out << "CELL_DATA " << n_cells << "\n";
  out << "SCALARS artificial_viscosity double 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < ne; ++e) {
    const double eps = element_viscosity.empty() ? 0.0 : element_viscosity[e];
    for (size_t t = 0; t < subtets.size(); ++t) out << eps << "\n";
  }
}

void export_vtk_file(const CurvedMesh& cmesh, const ReferenceElement& re,
                     const SolutionStore& store, const GasModel& gas,
                     const std::vector<double>& element_viscosity,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  export_vtk(cmesh, re, store, gas, element_viscosity, out);
}

}  // namespace cdg
