#pragma once

// Partitioned time marching: one worker thread per partition, each running
// the stage sequence exchange -> boundaries -> primitives -> viscous terms
// -> (viscous exchange overlapped with convection and dissipation) ->
// update, synchronized per iteration for timing and the stop decision.

#include <atomic>
#include <barrier>
#include <chrono>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "jetles/boundary.hpp"
#include "jetles/comm.hpp"
#include "jetles/exchange.hpp"
#include "jetles/grid.hpp"
#include "jetles/io.hpp"
#include "jetles/numerics.hpp"
#include "jetles/partition.hpp"
#include "jetles/preprocess.hpp"

namespace jetles {

enum class ExchangeMode { nonblocking, legacy };

// Initial field and boundary states.
struct FlowSetup {
  PrimitiveState initial;
  PrimitiveState freestream;
  PrimitiveState inlet;
  double jet_radius = 0.5;

  static FlowSetup jet(const FlowConfig& cfg) {
    FlowSetup s;
    s.freestream = freestream_state(cfg);
    s.initial = s.freestream;
    s.inlet = jet_state(cfg);
    return s;
  }
  // Everything, inlet included, equal to one state.
  static FlowSetup uniform(const PrimitiveState& w) { return FlowSetup{w, w, w, 0.5}; }
};

struct SolverOptions {
  int steps = 10;
  double wall_budget_s = 0.0;  // 0: no limit
  ExchangeMode mode = ExchangeMode::nonblocking;
  std::chrono::milliseconds timeout{std::chrono::seconds(300)};
  int average_from_step = -1;  // accumulate a running mean from this step on
  int snapshot_interval = 0;
  std::filesystem::path snapshot_dir;
  std::uint64_t delay_seed = 0;  // nonzero: random message delays
  std::chrono::microseconds max_delay{0};
};

struct RunResult {
  ConservativeField q;     // global interior after the last step
  ConservativeField mean;  // running mean when requested
  int steps_done = 0;
  double time = 0.0;
  std::vector<double> step_seconds;  // slowest worker per iteration
  std::uint64_t messages = 0;
};

// State and stage logic of one partition.
class PartitionSolver {
 public:
  PartitionSolver(CurvilinearBlock block, const FlowConfig& cfg, const FlowSetup& setup, ExchangeContext ctx,
                  ExchangeMode mode)
      : g_(std::move(block)), cfg_(cfg), ctx_(ctx), mode_(mode), q_(g_.dims), ws_(g_.dims) {
    bset_ = make_jet_boundaries(cfg_, g_);
    bset_.freestream_state = setup.freestream;
    bset_.inlet_state = setup.inlet;
    bset_.jet_radius = setup.jet_radius;
    const Conservative init = to_conservative(setup.initial, cfg_);
    for_each_node(q_.allocated(), [&](int i, int j, int k) { std::copy(init.begin(), init.end(), q_.at(i, j, k)); });
  }

  const CurvilinearBlock& block() const { return g_; }
  ConservativeField& state() { return q_; }
  const ConservativeField& state() const { return q_; }

  void step() {
    rk5_advance(rk_, q_, [this](int s, double alpha, const ConservativeField& q0, ConservativeField& q) {
      stage(s, alpha, q0, q);
    });
  }

  void stage(int s, double alpha, const ConservativeField& q0, ConservativeField& q) {
    if (mode_ == ExchangeMode::legacy)
      exchange_halo_legacy(ctx_, g_, q, kFringe, kTagState);
    else
      exchange_halo(ctx_, g_, q, kFringe, kTagState);
    apply_boundaries(g_, q, bset_, cfg_, ring_reducer(ctx_));
    compute_primitives(g_, q, cfg_, g_.valid_box(), ws_.prim, s);
    compute_viscous_fluxes(g_, ws_.prim, cfg_, owned_box(g_), ws_.fvisc);
    if (mode_ == ExchangeMode::legacy) {
      exchange_halo_legacy(ctx_, g_, ws_.fvisc, 1, kTagViscous);
      convective_and_dissipation(g_, q, cfg_, ws_);
    } else {
      auto rx = post_halo_exchange(ctx_, g_, ws_.fvisc, kXi, 1, kTagViscous);
      wait_halo(rx);
      auto rz = post_halo_exchange(ctx_, g_, ws_.fvisc, kZeta, 1, kTagViscous);
      convective_and_dissipation(g_, q, cfg_, ws_);
      wait_halo(rz);
    }
    check_fringe_ready(ws_.fvisc, kXi, "viscous divergence");
    check_fringe_ready(ws_.fvisc, kZeta, "viscous divergence");
    subtract_viscous_divergence(g_, ws_.fvisc, ws_);
    stage_update(g_, q0, ws_.rhs, alpha * cfg_.dt, q);
  }

 private:
  CurvilinearBlock g_;
  FlowConfig cfg_;
  ExchangeContext ctx_;
  ExchangeMode mode_;
  BoundarySet bset_;
  RkScheme rk_;
  ConservativeField q_;
  RhsWorkspace ws_;
};

// Cuts the global grid into rank blocks with metrics computed per block.
inline std::vector<CurvilinearBlock> make_partition_blocks(const CurvilinearBlock& global, const PartitionMap& map) {
  std::vector<CurvilinearBlock> blocks;
  for (int r = 0; r < map.size(); ++r) {
    blocks.push_back(extract_partition(global, map, r));
    compute_metrics(blocks.back());
  }
  return blocks;
}

// Runs `opt.steps` iterations (or until the wall budget) on the given rank
// blocks, one thread each. A fault in any worker aborts the others and is
// rethrown here.
inline RunResult run_blocks(std::vector<CurvilinearBlock> blocks, const PartitionMap& map, const FlowConfig& cfg,
                            const FlowSetup& setup, const SolverOptions& opt) {
  const int nranks = map.size();
  Communicator comm(nranks, opt.timeout);
  if (opt.delay_seed != 0) comm.inject_delays(opt.delay_seed, opt.max_delay);

  std::vector<std::unique_ptr<PartitionSolver>> solvers(nranks);
  for (int r = 0; r < nranks; ++r)
    solvers[r] = std::make_unique<PartitionSolver>(std::move(blocks[r]), cfg, setup,
                                                   ExchangeContext{Endpoint{&comm, r}, &map}, opt.mode);
  std::vector<ConservativeField> sums(nranks);
  int averaged = 0;

  if (opt.snapshot_interval > 0 && !opt.snapshot_dir.empty()) {
    std::filesystem::create_directories(opt.snapshot_dir);
    for (int r = 0; r < nranks; ++r)
      create_solution(opt.snapshot_dir / solution_file_name(r), r, solvers[r]->block().dims);
  }

  RunResult result;
  std::vector<double> worker_seconds(nranks, 0.0);
  std::atomic<bool> stop{false};
  std::atomic<int> completed{0};
  const auto t_start = std::chrono::steady_clock::now();
  auto on_iteration = [&]() noexcept {
    double slowest = 0.0;
    for (double s : worker_seconds) slowest = std::max(slowest, s);
    result.step_seconds.push_back(slowest);
    const int done = completed.fetch_add(1) + 1;
    if (opt.average_from_step >= 0 && done > opt.average_from_step) ++averaged;
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    if (done >= opt.steps || (opt.wall_budget_s > 0.0 && elapsed >= opt.wall_budget_s) || comm.aborted())
      stop = true;
  };
  std::barrier sync(nranks, on_iteration);

  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&](int r) {
    PartitionSolver& s = *solvers[r];
    try {
      for (int step = 0; step < opt.steps && !stop; ++step) {
        const auto t0 = std::chrono::steady_clock::now();
        s.step();
        worker_seconds[r] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (opt.average_from_step >= 0 && step >= opt.average_from_step) {
          if (sums[r].node_count() == 0) sums[r] = ConservativeField(s.block().dims);
          auto src = s.state().raw();
          auto dst = sums[r].raw();
          for (std::size_t n = 0; n < src.size(); ++n) dst[n] += src[n];
        }
        if (opt.snapshot_interval > 0 && !opt.snapshot_dir.empty() && (step + 1) % opt.snapshot_interval == 0)
          append_snapshot(opt.snapshot_dir / solution_file_name(r), s.state(), step + 1, (step + 1) * cfg.dt);
        sync.arrive_and_wait();
      }
    } catch (...) {
      {
        std::lock_guard lock(err_mutex);
        // Keep the root cause, not the aborts it triggered elsewhere.
        if (!first_error) first_error = std::current_exception();
      }
      comm.abort("rank " + std::to_string(r) + " failed");
      stop = true;
      sync.arrive_and_drop();
    }
  };
  std::vector<std::thread> threads;
  for (int r = 0; r < nranks; ++r) threads.emplace_back(worker, r);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);

  const Extents gd = solvers[0]->block().global_dims;
  result.q = ConservativeField(gd);
  if (opt.average_from_step >= 0 && averaged > 0) result.mean = ConservativeField(gd);
  for (int r = 0; r < nranks; ++r) {
    insert_interior(solvers[r]->state(), map.range(r), result.q);
    if (result.mean.node_count() > 0) {
      auto& sum = sums[r];
      for (auto& v : sum.raw()) v /= averaged;
      insert_interior(sum, map.range(r), result.mean);
    }
  }
  result.steps_done = completed.load();
  result.time = result.steps_done * cfg.dt;
  result.messages = comm.messages();
  return result;
}

inline RunResult run_partitioned(const CurvilinearBlock& global, const FlowConfig& cfg, int npx, int npz,
                                 const FlowSetup& setup, const SolverOptions& opt) {
  const PartitionMap map = build_map(global.dims.nxi, global.dims.nzeta, npx, npz);
  return run_blocks(make_partition_blocks(global, map), map, cfg, setup, opt);
}

// Loads rank blocks written by the partitioner.
inline RunResult run_from_directory(const std::filesystem::path& dir, const FlowConfig& cfg, const FlowSetup& setup,
                                    const SolverOptions& opt) {
  const Manifest m = read_manifest(dir);
  const PartitionMap map = build_map(m.mesh.nxi, m.mesh.nzeta, m.npx, m.npz);
  std::vector<CurvilinearBlock> blocks;
  for (int r = 0; r < map.size(); ++r) blocks.push_back(load_partition(dir, r));
  return run_blocks(std::move(blocks), map, cfg, setup, opt);
}

}  // namespace jetles
