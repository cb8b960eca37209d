#pragma once

// Scalability harness: per-configuration timing, speedup and efficiency
// metrics, fastest-partition selection, workload-corrected weak scaling,
// and CSV/SVG report emission.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "jetles/error.hpp"
#include "jetles/grid.hpp"
#include "jetles/solver.hpp"

namespace jetles {

class BenchError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kWarmupIterations = 3;

struct ScalingRecord {
  int mesh_id = 0;
  std::string mesh;  // "NXIxNETAxNZETA"
  int cores = 1;
  int npz = 1;
  double seconds = 0.0;  // mean time per iteration, slowest worker
  int iterations = 0;
  int workload = 0;         // weak scaling group
  double size_ratio = 1.0;  // actual / nominal workload

  friend bool operator==(const ScalingRecord&, const ScalingRecord&) = default;
};

// Mean of the per-iteration times after the warm-up window (all of them if
// the run is too short to have one).
inline double mean_iteration_seconds(const std::vector<double>& step_seconds, int warmup = kWarmupIterations) {
  if (step_seconds.empty()) throw BenchError("no iterations were timed");
  const std::size_t skip = step_seconds.size() > static_cast<std::size_t>(warmup) ? warmup : 0;
  double sum = 0.0;
  for (std::size_t n = skip; n < step_seconds.size(); ++n) sum += step_seconds[n];
  return sum / static_cast<double>(step_seconds.size() - skip);
}

inline ScalingRecord run_timing(const FlowConfig& cfg, int mesh_id, Extents mesh, int cores, int npz, int steps,
                                double wall_budget_s, double length = 30.0, double height = 10.0) {
  if (steps < 1 || !(wall_budget_s > 0.0)) throw BenchError("step and wall-clock budgets must be positive");
  if (npz < 1 || cores % npz != 0)
    throw BenchError("cores " + std::to_string(cores) + " not divisible by npz " + std::to_string(npz));
  const CurvilinearBlock grid = generate_jet_grid(mesh.nxi, mesh.neta, mesh.nzeta, length, height);
  SolverOptions opt;
  opt.steps = steps;
  opt.wall_budget_s = wall_budget_s;
  RunResult r;
  try {
    r = run_partitioned(grid, cfg, cores / npz, npz, FlowSetup::jet(cfg), opt);
  } catch (const std::exception& e) {
    throw BenchError("solver fault on mesh " + format_mesh_spec(mesh) + " cores " + std::to_string(cores) + " npz " +
                     std::to_string(npz) + ": " + e.what());
  }
  ScalingRecord rec;
  rec.mesh_id = mesh_id;
  rec.mesh = format_mesh_spec(mesh);
  rec.cores = cores;
  rec.npz = npz;
  rec.iterations = r.steps_done;
  rec.seconds = mean_iteration_seconds(r.step_seconds);
  return rec;
}

// Fastest record for every (group, cores); exact ties go to the smaller npz.
// The group is the mesh for strong scaling and the workload for weak.
inline std::map<std::pair<int, int>, ScalingRecord> select_optimal_npz(const std::vector<ScalingRecord>& recs,
                                                                        bool by_workload = false) {
  std::map<std::pair<int, int>, ScalingRecord> best;
  for (const auto& r : recs) {
    const std::pair<int, int> key{by_workload ? r.workload : r.mesh_id, r.cores};
    auto it = best.find(key);
    if (it == best.end() || r.seconds < it->second.seconds ||
        (r.seconds == it->second.seconds && r.npz < it->second.npz))
      best[key] = r;
  }
  return best;
}

// Sp(N) = s T(s) / T(N), so Sp(s) = s.
inline std::map<int, double> speedup(const std::map<int, double>& time_by_cores, int s) {
  const auto base = time_by_cores.find(s);
  if (base == time_by_cores.end()) throw BenchError("no baseline timing at " + std::to_string(s) + " cores");
  std::map<int, double> sp;
  for (const auto& [n, t] : time_by_cores) sp[n] = n == s ? static_cast<double>(s) : s * base->second / t;
  return sp;
}

inline std::map<int, double> strong_efficiency(const std::map<int, double>& sp) {
  std::map<int, double> eta;
  for (const auto& [n, v] : sp) eta[n] = v / n;
  return eta;
}

// eta(N) = T(s) / (T(N) / r(N)) with r the actual-to-nominal workload ratio
// of the point, which discounts the extra work of an oversized mesh.
inline std::map<int, double> weak_efficiency(const std::map<int, double>& time_by_cores, int s,
                                             const std::map<int, double>& size_ratio = {}) {
  const auto base = time_by_cores.find(s);
  if (base == time_by_cores.end()) throw BenchError("no baseline timing at " + std::to_string(s) + " cores");
  auto ratio = [&](int n) {
    auto it = size_ratio.find(n);
    return it == size_ratio.end() ? 1.0 : it->second;
  };
  std::map<int, double> eta;
  for (const auto& [n, t] : time_by_cores) eta[n] = n == s ? 1.0 : base->second / (t / ratio(n));
  return eta;
}

struct ScalingPoint {
  int group = 0;  // mesh id (strong) or workload (weak)
  int cores = 0;
  int npz = 0;
  double seconds = 0.0;
  double speedup = 0.0;     // strong only
  double efficiency = 0.0;
  bool superlinear = false;

  friend bool operator==(const ScalingPoint&, const ScalingPoint&) = default;
};

struct ScalingReport {
  std::string kind = "strong";  // or "weak"
  int start = 1;
  std::vector<ScalingRecord> records;
  std::vector<ScalingPoint> points;  // optimal configuration per (group, cores)

  friend bool operator==(const ScalingReport&, const ScalingReport&) = default;
};

inline ScalingReport build_report(const std::string& kind, const std::vector<ScalingRecord>& recs, int s) {
  if (kind != "strong" && kind != "weak") throw BenchError("report kind must be strong or weak");
  ScalingReport rep;
  rep.kind = kind;
  rep.start = s;
  rep.records = recs;
  const bool weak = kind == "weak";
  const auto best = select_optimal_npz(recs, weak);
  std::map<int, std::map<int, double>> times, ratios;
  for (const auto& [key, r] : best) {
    times[key.first][key.second] = r.seconds;
    ratios[key.first][key.second] = r.size_ratio;
  }
  for (const auto& [group, t] : times) {
    std::map<int, double> sp, eta;
    if (weak) {
      eta = weak_efficiency(t, s, ratios[group]);
    } else {
      sp = speedup(t, s);
      eta = strong_efficiency(sp);
    }
    for (const auto& [n, secs] : t) {
      ScalingPoint p;
      p.group = group;
      p.cores = n;
      p.npz = best.at({group, n}).npz;
      p.seconds = secs;
      p.speedup = weak ? 0.0 : sp[n];
      p.efficiency = eta[n];
      p.superlinear = p.efficiency > 1.0;
      rep.points.push_back(p);
    }
  }
  return rep;
}

// ------------------------------------------------------------- output

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kRecordHeader = "mesh_id,mesh,cores,npz,seconds,iterations,workload,size_ratio";
inline constexpr const char* kPointHeader = "group,cores,npz,seconds,speedup,efficiency,superlinear";

inline std::string records_csv(const ScalingReport& rep) {
  std::ostringstream os;
  os << "# kind=" << rep.kind << " start=" << rep.start << "\n" << kRecordHeader << "\n";
  for (const auto& r : rep.records)
    os << r.mesh_id << ',' << r.mesh << ',' << r.cores << ',' << r.npz << ',' << format_double(r.seconds) << ','
       << r.iterations << ',' << r.workload << ',' << format_double(r.size_ratio) << "\n";
  return os.str();
}

inline std::string points_csv(const ScalingReport& rep) {
  std::ostringstream os;
  os << kPointHeader << "\n";
  for (const auto& p : rep.points)
    os << p.group << ',' << p.cores << ',' << p.npz << ',' << format_double(p.seconds) << ','
       << format_double(p.speedup) << ',' << format_double(p.efficiency) << ',' << (p.superlinear ? 1 : 0) << "\n";
  return os.str();
}

// Rebuilds a report from the records CSV.
inline ScalingReport parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string kind = "strong";
  int start = 1;
  std::vector<ScalingRecord> recs;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# kind=", 0) == 0) {
      std::istringstream h(line.substr(7));
      std::string s;
      h >> kind >> s;
      if (s.rfind("start=", 0) == 0) start = std::stoi(s.substr(6));
      continue;
    }
    if (!header) {
      if (line != kRecordHeader) throw BenchError("unexpected CSV header: " + line);
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 8) throw BenchError("malformed CSV row: " + line);
    ScalingRecord r;
    r.mesh_id = std::stoi(f[0]);
    r.mesh = f[1];
    r.cores = std::stoi(f[2]);
    r.npz = std::stoi(f[3]);
    r.seconds = std::strtod(f[4].c_str(), nullptr);
    r.iterations = std::stoi(f[5]);
    r.workload = std::stoi(f[6]);
    r.size_ratio = std::strtod(f[7].c_str(), nullptr);
    recs.push_back(r);
  }
  if (recs.empty()) {
    ScalingReport rep;
    rep.kind = kind;
    rep.start = start;
    return rep;
  }
  return build_report(kind, recs, start);
}

namespace detail {

inline double log2_pos(double v, double lo, double hi, double px_lo, double px_hi) {
  const double a = std::log2(lo), b = std::log2(hi);
  return px_lo + (std::log2(v) - a) / (b - a) * (px_hi - px_lo);
}

// Speedup (solid, log2 y on the left) and efficiency (dashed, linear y on
// the right) against cores on a log2 x axis, with the ideal reference.
inline std::string scaling_svg(const std::string& title, const std::vector<ScalingPoint>& pts, bool weak) {
  const double W = 640, H = 420, L = 70, R = 570, T = 40, B = 360;
  int nmin = pts.front().cores, nmax = pts.front().cores;
  double smax = 1.0;
  for (const auto& p : pts) {
    nmin = std::min(nmin, p.cores);
    nmax = std::max(nmax, p.cores);
    smax = std::max({smax, p.speedup, static_cast<double>(p.cores)});
  }
  const double xlo = nmin, xhi = nmax > nmin ? nmax : nmin * 2.0;
  const double ylo = 0.5, yhi = std::pow(2.0, std::ceil(std::log2(smax)) + 0.5);
  double emax = 1.2;
  for (const auto& p : pts) emax = std::max(emax, p.efficiency * 1.1);
  auto X = [&](double n) { return log2_pos(n, xlo, xhi, L, R); };
  auto Ys = [&](double s) { return log2_pos(s, ylo, yhi, B, T); };
  auto Ye = [&](double e) { return B - e / emax * (B - T); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << B << "\" x2=\"" << R << "\" y2=\"" << B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << R << "\" y1=\"" << T << "\" x2=\"" << R << "\" y2=\"" << B << "\" stroke=\"black\"/>\n";
  for (double n = xlo; n <= xhi * 1.0001; n *= 2)
    os << "<text x=\"" << X(n) << "\" y=\"" << B + 18 << "\" text-anchor=\"middle\" font-size=\"11\">" << n
       << "</text>\n";
  os << "<text x=\"" << (L + R) / 2 << "\" y=\"" << B + 40 << "\" text-anchor=\"middle\" font-size=\"12\">cores (log2)</text>\n";
  if (!weak) {
    for (double s = 1; s <= yhi; s *= 2)
      os << "<text x=\"" << L - 8 << "\" y=\"" << Ys(s) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << s
         << "</text>\n";
    os << "<text x=\"18\" y=\"" << (T + B) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 18 " << (T + B) / 2
       << ")\">speedup (log2)</text>\n";
    os << "<polyline class=\"ideal\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"2,3\" points=\"" << X(xlo) << ',' << Ys(xlo)
       << ' ' << X(xhi) << ',' << Ys(xhi) << "\"/>\n";
    os << "<polyline class=\"speedup\" fill=\"none\" stroke=\"navy\" stroke-width=\"2\" points=\"";
    for (const auto& p : pts) os << X(p.cores) << ',' << Ys(p.speedup) << ' ';
    os << "\"/>\n";
  } else {
    os << "<polyline class=\"ideal\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"2,3\" points=\"" << X(xlo) << ',' << Ye(1.0)
       << ' ' << X(xhi) << ',' << Ye(1.0) << "\"/>\n";
  }
  for (double e = 0; e <= emax + 1e-9; e += 0.2)
    os << "<text x=\"" << R + 8 << "\" y=\"" << Ye(e) + 4 << "\" font-size=\"11\">" << format_double(std::round(e * 10) / 10)
       << "</text>\n";
  os << "<text x=\"" << W - 14 << "\" y=\"" << (T + B) / 2 << "\" font-size=\"12\" transform=\"rotate(90 " << W - 14
     << ' ' << (T + B) / 2 << ")\">efficiency</text>\n";
  os << "<polyline class=\"efficiency\" fill=\"none\" stroke=\"darkred\" stroke-width=\"2\" stroke-dasharray=\"8,5\" points=\"";
  for (const auto& p : pts) os << X(p.cores) << ',' << Ye(p.efficiency) << ' ';
  os << "\"/>\n";
  struct Key {
    const char* label;
    const char* stroke;
    const char* dash;
  };
  std::vector<Key> keys;
  if (!weak) keys.push_back({"speedup", "navy", "none"});
  keys.push_back({"efficiency", "darkred", "8,5"});
  keys.push_back({"ideal", "gray", "2,3"});
  double ky = T + 12;
  for (const auto& k : keys) {
    os << "<line x1=\"" << L + 12 << "\" y1=\"" << ky << "\" x2=\"" << L + 42 << "\" y2=\"" << ky << "\" stroke=\""
       << k.stroke << "\" stroke-width=\"2\" stroke-dasharray=\"" << k.dash << "\"/>\n";
    os << "<text x=\"" << L + 48 << "\" y=\"" << ky + 4 << "\" font-size=\"11\">" << k.label << "</text>\n";
    ky += 16;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace detail

// CSV tables and one plot per mesh (strong) or workload (weak).
inline std::vector<std::filesystem::path> emit_report(const ScalingReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p);
    if (!out) throw IoError(IoError::Kind::open, "cannot write " + p.string());
    out << s;
    if (!out) throw IoError(IoError::Kind::open, "write failed for " + p.string());
    written.push_back(p);
  };
  put(dir / (rep.kind + "_records.csv"), records_csv(rep));
  put(dir / (rep.kind + "_metrics.csv"), points_csv(rep));
  std::map<int, std::vector<ScalingPoint>> groups;
  for (const auto& p : rep.points) groups[p.group].push_back(p);
  for (const auto& [g, pts] : groups) {
    const std::string label = (rep.kind == "weak" ? "workload " : "mesh ") + std::to_string(g);
    put(dir / (rep.kind + "_" + std::to_string(g) + ".svg"),
        detail::scaling_svg(rep.kind + " scaling, " + label, pts, rep.kind == "weak"));
  }
  return written;
}

// ---------------------------------------------------------------- plans

struct PlanEntry {
  Extents mesh;
  int cores = 1;
  int npz = 1;
  int workload = 0;
  double size_ratio = 1.0;
};

struct BenchPlan {
  int steps = 20;
  double wall_s = 120.0;
  int start = 1;
  std::vector<PlanEntry> runs;
};

// Lines: `steps N`, `wall SECONDS`, `start S`, and
// `run MESH CORES NPZ [WORKLOAD [SIZE_RATIO]]`; `#` comments.
inline BenchPlan parse_plan(const std::string& text) {
  BenchPlan plan;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    auto fail = [&] { throw BenchError("plan line " + std::to_string(lineno) + " is malformed"); };
    if (word == "steps") {
      if (!(ls >> plan.steps) || plan.steps < 1) fail();
    } else if (word == "wall") {
      if (!(ls >> plan.wall_s) || !(plan.wall_s > 0)) fail();
    } else if (word == "start") {
      if (!(ls >> plan.start) || plan.start < 1) fail();
    } else if (word == "run") {
      PlanEntry e;
      std::string mesh;
      if (!(ls >> mesh >> e.cores >> e.npz)) fail();
      e.mesh = parse_mesh_spec(mesh);
      if (ls >> e.workload) ls >> e.size_ratio;
      plan.runs.push_back(e);
    } else {
      fail();
    }
  }
  return plan;
}

// Mesh ids follow first appearance in the plan.
inline std::vector<ScalingRecord> run_plan(const BenchPlan& plan, const FlowConfig& cfg,
                                           const std::function<void(const ScalingRecord&)>& progress = {}) {
  std::vector<std::string> ids;
  std::vector<ScalingRecord> out;
  for (const auto& e : plan.runs) {
    const std::string spec = format_mesh_spec(e.mesh);
    auto it = std::find(ids.begin(), ids.end(), spec);
    if (it == ids.end()) {
      ids.push_back(spec);
      it = ids.end() - 1;
    }
    const int id = static_cast<int>(it - ids.begin()) + 1;
    ScalingRecord r = run_timing(cfg, id, e.mesh, e.cores, e.npz, plan.steps, plan.wall_s);
    r.workload = e.workload;
    r.size_ratio = e.size_ratio;
    if (progress) progress(r);
    out.push_back(r);
  }
  return out;
}

}  // namespace jetles
