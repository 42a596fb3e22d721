#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lbsim/cluster.hpp"
#include "lbsim/policy.hpp"

namespace lbsim {

// Everything recorded over one episode. Utilization snapshots are normalized
// to [0, 1] by capacity; remaining durations are ground truth, in timesteps.
struct EpisodeResult {
  int num_servers = 0;
  int64_t time_step = 12;  // seconds, for minute conversions downstream
  int64_t num_timesteps = 0;

  std::vector<double> utilization;    // T x N x 4, [t*N*4 + i*4 + r]
  std::vector<int64_t> max_remaining; // T x N, [t*N + i]
  std::vector<int32_t> conn_counts;   // T x N

  bool terminated_early = false;
  int64_t blocked_total = 0;  // entries into the block queue

  // Request accounting; requests_total == completed + live_at_end +
  // queued_at_end + not_injected always holds.
  int64_t requests_total = 0;
  int64_t completed = 0;
  int64_t live_at_end = 0;
  int64_t queued_at_end = 0;
  int64_t not_injected = 0;

  double utilization_at(int64_t t, int server, int resource) const {
    return utilization[static_cast<size_t>((t * num_servers + server) * 4 + resource)];
  }
  int64_t remaining_at(int64_t t, int server) const {
    return max_remaining[static_cast<size_t>(t * num_servers + server)];
  }
};

// Drives one cluster through the per-timestep cycle:
//   1. release connections whose true end step equals the clock;
//   2. retry blocked requests ahead of new arrivals (ready-queue overflow
//      cascades into the block queue; block-queue overflow aborts);
//   3. route ready requests one at a time, updating occupancy immediately so
//      the next request in the same step sees it;
//   4. record the utilization and remaining-duration snapshot;
//   5. advance the clock.
class Simulator {
 public:
  explicit Simulator(const SimulationConfig& config);

  // Feeds the arrivals for the current clock value. Returns false once the
  // episode has aborted on block-queue overflow.
  bool step(std::span<const UserRequest> arrivals, RoutingPolicy& policy);

  const ClusterState& state() const { return state_; }
  ClusterState& mutable_state() { return state_; }
  bool aborted() const { return aborted_; }
  int64_t injected() const { return injected_; }

  // Finalizes accounting (live/queued counts) and hands the result over.
  EpisodeResult take_result(int64_t requests_total);

 private:
  void record_snapshot();
  void push_block(UserRequest request);

  SimulationConfig config_;
  ClusterState state_;
  EpisodeResult result_;
  bool aborted_ = false;
  int64_t injected_ = 0;
};

// Runs requests (sorted by arrival_step) to completion: the episode ends when
// arrivals are exhausted, the queues are empty and no connection is alive, or
// earlier on abort. The seed feeds only stochastic policies via reset().
EpisodeResult run_episode(std::span<const UserRequest> requests, const SimulationConfig& config,
                          RoutingPolicy& policy, uint64_t seed);

// Per-episode log export, one row per server per timestep:
//   t,server,cpu,ram,hdd,bw,conn_count,max_remaining_true
// Utilization normalized to [0,1]; max_remaining_true in minutes.
void write_episode_csv(const std::filesystem::path& path, const EpisodeResult& result);

}  // namespace lbsim
