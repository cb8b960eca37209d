// partition --mesh <NXIxNETAxNZETA|file> --npx N --npz M --out DIR
//
// Cuts a jet grid (generated from NXIxNETAxNZETA, or read from a grid
// container) into per-rank grid containers plus a text manifest.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "jetles/preprocess.hpp"

int main(int argc, char** argv) {
  using namespace jetles;
  CLI::App app{"Partition a jet grid into per-rank grid containers"};
  std::string mesh, out;
  int npx = 1, npz = 1;
  double length = 30.0, height = 10.0;
  app.add_option("--mesh", mesh, "NXIxNETAxNZETA or a grid container file")->required();
  app.add_option("--npx", npx, "axial partitions")->required()->check(CLI::PositiveNumber);
  app.add_option("--npz", npz, "azimuthal partitions")->required()->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--length", length, "axial domain length in jet diameters (generated grids)");
  app.add_option("--height", height, "radial domain height in jet diameters (generated grids)");
  CLI11_PARSE(app, argc, argv);

  try {
    CurvilinearBlock grid;
    if (std::filesystem::is_regular_file(mesh)) {
      grid = read_grid(mesh).block;
      if (!(grid.dims == grid.global_dims))
        throw PartitionError(mesh + " holds one " + format_mesh_spec(grid.dims) + " partition of a " +
                             format_mesh_spec(grid.global_dims) + " grid; pass a whole-grid container");
    } else {
      const Extents d = parse_mesh_spec(mesh);
      grid = generate_jet_grid(d.nxi, d.neta, d.nzeta, length, height);
    }
    const PartitionMap map = build_map(grid.dims.nxi, grid.dims.nzeta, npx, npz);
    partition_grid(grid, map, out);
    std::printf("mesh %s  npx %d  npz %d  ranks %d  ghost ratio %.4f%%\n", format_mesh_spec(grid.dims).c_str(), npx,
                npz, map.size(), ghost_ratio(grid.dims, npx, npz));
    std::printf("wrote %d grid containers and %s to %s\n", map.size(), kManifestName, out.c_str());
  } catch (const Error& e) {
    std::cerr << "partition: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
