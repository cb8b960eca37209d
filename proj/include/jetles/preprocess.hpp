#pragma once

// Partitioned-grid emission and loading: one grid container per rank plus a
// text manifest describing the decomposition.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "jetles/grid.hpp"
#include "jetles/io.hpp"
#include "jetles/partition.hpp"

namespace jetles {

inline constexpr const char* kManifestName = "partition.map";

inline std::string manifest_text(const PartitionMap& map, const Extents& mesh) {
  std::ostringstream os;
  os << "# mesh " << format_mesh_spec(mesh) << " npx " << map.npx() << " npz " << map.npz() << "\n";
  os << "# rank xi_begin xi_end zeta_begin zeta_end west east zeta_minus zeta_plus\n";
  for (int r = 0; r < map.size(); ++r) {
    const auto pr = map.range(r);
    const auto nb = map.neighbors(r);
    os << r << ' ' << pr.xi_begin << ' ' << pr.xi_end << ' ' << pr.zeta_begin << ' ' << pr.zeta_end << ' ' << nb.west
       << ' ' << nb.east << ' ' << nb.zeta_minus << ' ' << nb.zeta_plus << "\n";
  }
  return os.str();
}

// Writes grid_<rank>.jzg for every rank and the manifest. I/O failures name
// the rank.
inline void partition_grid(const CurvilinearBlock& global, const PartitionMap& map, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (int r = 0; r < map.size(); ++r) {
    try {
      write_grid(dir / grid_file_name(r), extract_partition(global, map, r), r);
    } catch (const IoError& e) {
      throw IoError(e.kind, "rank " + std::to_string(r) + ": " + e.what());
    }
  }
  std::ofstream m(dir / kManifestName);
  if (!m) throw IoError(IoError::Kind::open, "cannot write manifest in " + dir.string());
  m << manifest_text(map, global.dims);
}

struct Manifest {
  Extents mesh;
  int npx = 0, npz = 0;
};

inline Manifest read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / kManifestName);
  if (!in) throw IoError(IoError::Kind::open, "cannot open manifest in " + dir.string());
  std::string hash, word, mesh;
  Manifest m;
  std::string key1, key2;
  if (!(in >> hash >> word >> mesh >> key1 >> m.npx >> key2 >> m.npz) || word != "mesh")
    throw IoError(IoError::Kind::format, "malformed manifest in " + dir.string());
  m.mesh = parse_mesh_spec(mesh);
  return m;
}

// Loads one rank's block and computes its metrics.
inline CurvilinearBlock load_partition(const std::filesystem::path& dir, int rank) {
  auto gc = read_grid(dir / grid_file_name(rank), rank);
  compute_metrics(gc.block);
  return std::move(gc.block);
}

}  // namespace jetles
