#include "cdg/state_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "cdg/refelem.hpp"
#include "cdg/sidecar.hpp"

namespace cdg {

uint32_t mesh_fingerprint(const Mesh& mesh) {
  uint32_t crc = 0;
  crc = crc32(mesh.vertices.data(), mesh.vertices.size() * sizeof(Vec3), crc);
  crc = crc32(mesh.tets.data(), mesh.tets.size() * sizeof(std::array<int, 4>), crc);
  return crc;
}

void write_state(const StateFile& state, const Mesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");

  std::vector<char> payload;
  auto put = [&payload](const void* p, size_t n) {
    const char* c = static_cast<const char*>(p);
    payload.insert(payload.end(), c, c + n);
  };
  const uint32_t version = 1;
  const uint32_t degree = static_cast<uint32_t>(state.degree);
  const uint64_t ne = static_cast<uint64_t>(state.store.n_elements());
  const uint32_t np = static_cast<uint32_t>(state.store.values_per_field());
  const uint32_t fp = mesh_fingerprint(mesh);
  put(&version, 4);
  put(&degree, 4);
  put(&ne, 8);
  put(&np, 4);
  put(&fp, 4);
  put(&state.gamma, 8);
  const auto dense = state.store.unpack();
  put(dense.data(), dense.size() * sizeof(double));

  out.write("CDS1", 4);
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  const uint32_t crc = crc32(payload.data(), payload.size());
  out.write(reinterpret_cast<const char*>(&crc), 4);
}

StateFile read_state(const Mesh& mesh, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open state file '" + path + "'");
  std::vector<char> all((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  if (all.size() < 8 || std::memcmp(all.data(), "CDS1", 4) != 0)
    throw ParseError("state: missing CDS1 magic");
  const char* p = all.data() + 4;
  const char* end = all.data() + all.size() - 4;
  uint32_t stored_crc;
  std::memcpy(&stored_crc, end, 4);
  if (crc32(p, static_cast<size_t>(end - p)) != stored_crc)
    throw ParseError("state: checksum mismatch");

  auto get = [&p, end](void* dst, size_t n) {
    if (p + n > end) throw ParseError("state: truncated file");
    std::memcpy(dst, p, n);
    p += n;
  };
  uint32_t version, degree, np, fp;
  uint64_t ne;
  StateFile state;
  get(&version, 4);
  if (version != 1) throw ParseError("state: unsupported version");
  get(&degree, 4);
  get(&ne, 8);
  get(&np, 4);
  get(&fp, 4);
  get(&state.gamma, 8);
  if (fp != mesh_fingerprint(mesh))
    throw ParseError("state: mesh fingerprint mismatch (state written for another mesh)");
  if (degree < 1 || degree > 9 || np != static_cast<uint32_t>(basis_count(degree)))
    throw ParseError("state: degree / value-count mismatch");
  if (ne != static_cast<uint64_t>(mesh.n_elements()))
    throw ParseError("state: element count mismatch");

  state.degree = static_cast<int>(degree);
  state.store = SolutionStore(static_cast<int>(ne), static_cast<int>(np));
  std::vector<double> dense(static_cast<size_t>(ne) * kNumFields * np);
  get(dense.data(), dense.size() * sizeof(double));
  if (p != end) throw ParseError("state: trailing bytes");
  state.store.pack(dense);
  return state;
}

}  // namespace cdg
