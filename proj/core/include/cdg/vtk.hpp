#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cdg/curved_mesh.hpp"
#include "cdg/euler.hpp"
#include "cdg/solution_store.hpp"

namespace cdg {

/// Legacy VTK unstructured-grid ASCII export: each element is emitted as its
/// p^3 sub-tetrahedra over the collocation lattice, with DG-style duplicated
/// points. Point data: density, velocity, pressure, Mach; cell data: the
/// per-element artificial viscosity (zeros when the model is off).
void export_vtk(const CurvedMesh& cmesh, const ReferenceElement& re,
                const SolutionStore& store, const GasModel& gas,
                const std::vector<double>& element_viscosity, std::ostream& out);

void export_vtk_file(const CurvedMesh& cmesh, const ReferenceElement& re,
                     const SolutionStore& store, const GasModel& gas,
                     const std::vector<double>& element_viscosity,
                     const std::string& path);

/// Sub-tetrahedra of the degree-p collocation lattice, as index quadruples
/// into the collocation node list. Exactly p^3 entries.
std::vector<std::array<int, 4>> lattice_subtets(int p);

}  // namespace cdg
