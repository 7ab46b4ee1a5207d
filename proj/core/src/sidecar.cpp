#include "cdg/sidecar.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <vector>

namespace cdg {

uint32_t crc32(const void* data, size_t len, uint32_t seed) {
  static const auto table = [] {
    std::array<uint32_t, 256> t{};
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  uint32_t crc = seed ^ 0xFFFFFFFFu;
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) crc = table[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

namespace {

template <typename T>
void put(std::vector<char>& buf, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.insert(buf.end(), bytes, bytes + sizeof(T));
}

template <typename T>
T get(const char*& p, const char* end) {
  if (p + sizeof(T) > end) throw ParseError("sidecar: truncated file");
  T value;
  std::memcpy(&value, p, sizeof(T));
  p += sizeof(T);
  return value;
}

constexpr uint32_t kVersion = 1;

}  // namespace

void write_curved_mesh(const CurvedMesh& cmesh, const std::string& path) {
  std::vector<char> payload;
  put<uint32_t>(payload, kVersion);
  put<uint32_t>(payload, static_cast<uint32_t>(cmesh.degree()));
  put<uint64_t>(payload, static_cast<uint64_t>(cmesh.mesh().n_elements()));
  put<uint64_t>(payload, static_cast<uint64_t>(cmesh.n_curved()));

  const int np = basis_count(cmesh.degree());
  for (int e = 0; e < cmesh.mesh().n_elements(); ++e) {
    if (!cmesh.is_curved(e)) continue;
    put<uint64_t>(payload, static_cast<uint64_t>(e));
    const auto& nodes = cmesh.curved_nodes(e);
    if (static_cast<int>(nodes.size()) != np)
      throw NumericsError("write_curved_mesh: node count mismatch");
    for (const auto& x : nodes) {
      put<double>(payload, x.x);
      put<double>(payload, x.y);
      put<double>(payload, x.z);
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out.write("CDG1", 4);
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  const uint32_t crc = crc32(payload.data(), payload.size());
  out.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
}

CurvedMesh read_curved_mesh(const Mesh& mesh, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open curved-mesh sidecar '" + path + "'");
  std::vector<char> all((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  if (all.size() < 4 + sizeof(uint32_t) || std::memcmp(all.data(), "CDG1", 4) != 0)
    throw ParseError("sidecar: missing CDG1 magic");

  const char* p = all.data() + 4;
  const char* end = all.data() + all.size() - sizeof(uint32_t);
  uint32_t stored_crc;
  std::memcpy(&stored_crc, end, sizeof(stored_crc));
  if (crc32(p, static_cast<size_t>(end - p)) != stored_crc)
    throw ParseError("sidecar: checksum mismatch");

  const auto version = get<uint32_t>(p, end);
  if (version != kVersion)
    throw ParseError("sidecar: unsupported version " + std::to_string(version));
  const auto degree = get<uint32_t>(p, end);
  if (degree < 1 || degree > 9) throw ParseError("sidecar: invalid degree");
  const auto n_elements = get<uint64_t>(p, end);
  if (n_elements != static_cast<uint64_t>(mesh.n_elements()))
    throw ParseError("sidecar: element count does not match the mesh");
  const auto n_curved = get<uint64_t>(p, end);

  CurvedMesh cmesh(mesh, static_cast<int>(degree));
  const int np = basis_count(static_cast<int>(degree));
  int64_t last = -1;
  for (uint64_t c = 0; c < n_curved; ++c) {
    const auto e = get<uint64_t>(p, end);
    if (static_cast<int64_t>(e) <= last)
      throw ParseError("sidecar: element indices not strictly increasing");
    if (e >= n_elements) throw ParseError("sidecar: element index out of range");
    last = static_cast<int64_t>(e);
    std::vector<Vec3> nodes(np);
    for (int i = 0; i < np; ++i) {
      nodes[i].x = get<double>(p, end);
      nodes[i].y = get<double>(p, end);
      nodes[i].z = get<double>(p, end);
    }
    cmesh.set_curved(static_cast<int>(e), std::move(nodes));
  }
  if (p != end) throw ParseError("sidecar: trailing bytes after payload");
  return cmesh;
}

}  // namespace cdg
