#pragma once

#include <string>

#include "cdg/mesh.hpp"
#include "cdg/solution_store.hpp"

namespace cdg {

/// Final-state dump: binary little-endian, magic "CDS1" (layout in
/// docs/FORMATS.md). Carries the DG degree, gas gamma and a mesh fingerprint
/// so the export stage can validate consistency.
struct StateFile {
  int degree = 0;
  double gamma = 1.4;
  SolutionStore store;
};

/// Fingerprint of mesh topology and coordinates (CRC32).
uint32_t mesh_fingerprint(const Mesh& mesh);

void write_state(const StateFile& state, const Mesh& mesh, const std::string& path);
StateFile read_state(const Mesh& mesh, const std::string& path);

}  // namespace cdg
