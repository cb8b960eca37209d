// bench strong|weak --plan FILE --out DIR
//
// Times every (mesh, cores, npz) run of a plan, selects the fastest npz per
// point, and writes record and metric CSV tables plus SVG plots.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

#include "jetles/bench.hpp"
#include "jetles/io.hpp"

namespace {

// T(m,N) should not grow with N up to the hardware thread count.
void warn_non_monotone(const jetles::ScalingReport& rep) {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  std::map<int, std::vector<jetles::ScalingPoint>> groups;
  for (const auto& p : rep.points) groups[p.group].push_back(p);
  for (const auto& [g, pts] : groups)
    for (std::size_t n = 1; n < pts.size(); ++n)
      if (pts[n].cores <= hw && pts[n].seconds > pts[n - 1].seconds)
        std::fprintf(stderr, "warning: group %d time rises from %d to %d cores\n", g, pts[n - 1].cores, pts[n].cores);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace jetles;
  CLI::App app{"Strong and weak scaling harness"};
  std::string kind, plan_file, out, config_file, from_csv;
  app.add_option("kind", kind, "strong or weak")->required()->check(CLI::IsMember({"strong", "weak"}));
  app.add_option("--plan", plan_file, "plan file")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--config", config_file, "flow configuration (key = value)")->check(CLI::ExistingFile);
  app.add_option("--from-csv", from_csv, "recompute metrics from a records CSV instead of timing")
      ->check(CLI::ExistingFile)
      ->excludes("--plan");
  CLI11_PARSE(app, argc, argv);
  if (plan_file.empty() && from_csv.empty()) {
    std::cerr << "bench: --plan or --from-csv is required\n";
    return 2;
  }

  try {
    ScalingReport rep;
    if (!from_csv.empty()) {
      rep = parse_records_csv(detail::read_file(from_csv));
      rep = build_report(kind, rep.records, rep.start);
    } else {
      FlowConfig cfg = FlowConfig::jet_defaults();
      cfg.dt = 1e-2;
      if (!config_file.empty()) cfg = load_config(config_file).flow;
      const BenchPlan plan = parse_plan(detail::read_file(plan_file));
      std::printf("%s scaling: %zu runs, %d steps, %.0f s wall budget each, start %d\n", kind.c_str(),
                  plan.runs.size(), plan.steps, plan.wall_s, plan.start);
      const auto recs = run_plan(plan, cfg, [](const ScalingRecord& r) {
        std::printf("  mesh %-12s cores %4d npz %3d  %4d it  %.6f s/it\n", r.mesh.c_str(), r.cores, r.npz,
                    r.iterations, r.seconds);
        std::fflush(stdout);
      });
      rep = build_report(kind, recs, plan.start);
    }
    warn_non_monotone(rep);
    for (const auto& p : rep.points) {
      std::printf("  group %d cores %4d npz %3d", p.group, p.cores, p.npz);
      if (rep.kind == "strong") std::printf("  Sp %8.4f", p.speedup);
      std::printf("  eff %.4f%s\n", p.efficiency, p.superlinear ? "  super-linear" : "");
    }
    for (const auto& f : emit_report(rep, out)) std::printf("wrote %s\n", f.string().c_str());
  } catch (const Error& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
