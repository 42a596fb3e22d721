#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "lbsim/request.hpp"
#include "lbsim/resource.hpp"

namespace lbsim {

// Static description of the simulated data center.
struct SimulationConfig {
  int server_num = 10;
  ResourceVector capacity{500, 500, 500, 500};  // per server
  int64_t ready_queue_size = 200;
  int64_t block_queue_size = 200;
  int64_t predicted_range = 120;  // minutes covered by the lookahead features
  int future_sample = 10;         // number of lookahead offsets (h)
  int64_t time_step = 12;         // seconds per timestep

  int64_t predicted_range_steps() const {
    return (predicted_range * 60 + time_step - 1) / time_step;
  }
  // Lookahead offsets are k * (predicted_range_steps / future_sample),
  // k = 1..future_sample.
  int64_t offset_stride_steps() const { return predicted_range_steps() / future_sample; }

  void validate() const;  // throws ConfigError
};

// A routed request occupying its demand on one server for
// [start_step, true_end_step).
struct Connection {
  int64_t request_id = 0;
  ResourceVector demand;
  int64_t start_step = 0;
  int64_t true_end_step = 0;
  int64_t predicted_end_step = 0;
};

struct ServerState {
  int index = 0;
  ResourceVector capacity;
  ResourceVector occupied;  // sum of live connection demands, kept incrementally
  std::vector<Connection> connections;

  int64_t connection_count() const { return static_cast<int64_t>(connections.size()); }
  // Max over live connections of predicted remaining duration at `clock`
  // (0 for an empty server).
  int64_t max_predicted_remaining(int64_t clock) const;
  // Same, from ground-truth end steps.
  int64_t max_true_remaining(int64_t clock) const;
};

struct ClusterState {
  std::vector<ServerState> servers;
  std::deque<UserRequest> ready_queue;
  std::deque<UserRequest> block_queue;
  int64_t clock = 0;
};

ClusterState make_cluster(const SimulationConfig& config);

// True iff the server can take `demand` on top of its current occupancy.
bool feasible(const ServerState& server, const ResourceVector& demand);

// Per-server policy features: for each resource and each of the h future
// offsets, the predicted utilization (demand of connections whose predicted
// end lies beyond the offset, divided by capacity), laid out resource-major
// as [r*h + k]; the final entry is the predicted remaining duration beyond
// the last offset, normalized by the predicted range. 4h+1 values total.
void lookahead_features(const ServerState& server, int64_t clock, const SimulationConfig& config,
                        std::span<double> out);

inline int lookahead_size(const SimulationConfig& config) {
  return 4 * config.future_sample + 1;
}

}  // namespace lbsim
