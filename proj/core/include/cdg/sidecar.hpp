#pragma once

#include <string>

#include "cdg/curved_mesh.hpp"

namespace cdg {

/// Curved-mesh sidecar: binary little-endian, magic "CDG1". Layout in
/// docs/FORMATS.md. Element indices strictly increasing; CRC32 over the
/// payload validates on read.
void write_curved_mesh(const CurvedMesh& cmesh, const std::string& path);

/// Reads a sidecar and attaches it to `mesh`. Element count must match;
/// checksum and count consistency are enforced.
CurvedMesh read_curved_mesh(const Mesh& mesh, const std::string& path);

/// CRC32 (IEEE) used by the binary formats.
uint32_t crc32(const void* data, size_t len, uint32_t seed = 0);

}  // namespace cdg
