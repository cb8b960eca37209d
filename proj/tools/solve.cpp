// solve --config FILE [--steps N] [--average-from N]
//
// Runs the jet LES on a generated mesh or a partitioned grid directory and
// reports the centerline potential core.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "jetles/diagnostics.hpp"
#include "jetles/solver.hpp"

int main(int argc, char** argv) {
  using namespace jetles;
  CLI::App app{"Partitioned jet LES"};
  std::string config_file;
  int steps = -1, average_from = -1;
  bool legacy = false;
  app.add_option("--config", config_file, "run configuration (key = value)")->required()->check(CLI::ExistingFile);
  app.add_option("--steps", steps, "override the step count");
  app.add_option("--average-from", average_from, "accumulate the mean field from this step (default: half way)");
  app.add_flag("--legacy-exchange", legacy, "use the four-step blocking exchange");
  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig rc = load_config(config_file);
    SolverOptions opt;
    opt.steps = steps > 0 ? steps : rc.steps;
    opt.average_from_step = average_from >= 0 ? average_from : opt.steps / 2;
    opt.mode = legacy ? ExchangeMode::legacy : ExchangeMode::nonblocking;
    if (!rc.out.empty() && rc.snapshot_interval > 0) {
      opt.snapshot_interval = rc.snapshot_interval;
      opt.snapshot_dir = rc.out;
    }
    const FlowSetup setup = FlowSetup::jet(rc.flow);

    CurvilinearBlock grid;
    RunResult r;
    if (!rc.grid_dir.empty()) {
      const Manifest m = read_manifest(rc.grid_dir);
      grid = generate_jet_grid(m.mesh.nxi, m.mesh.neta, m.mesh.nzeta, rc.length, rc.height);
      std::printf("grid %s from %s, npx %d npz %d\n", format_mesh_spec(m.mesh).c_str(), rc.grid_dir.c_str(), m.npx,
                  m.npz);
      r = run_from_directory(rc.grid_dir, rc.flow, setup, opt);
    } else {
      grid = generate_jet_grid(rc.mesh.nxi, rc.mesh.neta, rc.mesh.nzeta, rc.length, rc.height);
      std::printf("grid %s, npx %d npz %d\n", format_mesh_spec(rc.mesh).c_str(), rc.npx, rc.npz);
      r = run_partitioned(grid, rc.flow, rc.npx, rc.npz, setup, opt);
    }
    double total = 0.0;
    for (double s : r.step_seconds) total += s;
    std::printf("%d steps, t = %g, %.3f s, %llu messages\n", r.steps_done, r.time, total,
                static_cast<unsigned long long>(r.messages));

    const double uj = setup.inlet.u[0];
    const ConservativeField& field = r.mean.node_count() > 0 ? r.mean : r.q;
    const PotentialCore pc = potential_core(field, grid, uj);
    std::printf("%s centerline u/u_j:", r.mean.node_count() > 0 ? "mean" : "final");
    for (double u : pc.centerline_u) std::printf(" %.3f", u / uj);
    std::printf("\npotential core: %d stations, contiguous from inlet: %s, ends at x = %g\n", pc.length,
                pc.contiguous_from_inlet ? "yes" : "no", pc.end_x);
  } catch (const Error& e) {
    std::cerr << "solve: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
