#include "lbsim/cluster.hpp"

#include <algorithm>

#include "lbsim/errors.hpp"

namespace lbsim {

void SimulationConfig::validate() const {
  if (server_num < 1) throw ConfigError("simulation: server_num must be >= 1");
  if (!capacity.all_nonnegative()) throw ConfigError("simulation: capacity must be >= 0");
  for (int r = 0; r < ResourceVector::kDims; ++r) {
    if (capacity[r] <= 0) throw ConfigError("simulation: capacity must be positive");
  }
  if (ready_queue_size < 1) throw ConfigError("simulation: ready_queue_size must be >= 1");
  if (block_queue_size < 1) throw ConfigError("simulation: block_queue_size must be >= 1");
  if (time_step <= 0) throw ConfigError("simulation: time_step must be positive");
  if (predicted_range <= 0) throw ConfigError("simulation: predicted_range must be positive");
  if (future_sample < 1) throw ConfigError("simulation: future_sample must be >= 1");
  if (predicted_range_steps() % future_sample != 0) {
    throw ConfigError("simulation: predicted_range must divide evenly into future_sample offsets");
  }
}

int64_t ServerState::max_predicted_remaining(int64_t clock) const {
  int64_t best = 0;
  for (const auto& c : connections) {
    best = std::max(best, c.predicted_end_step - clock);
  }
  return best;
}

int64_t ServerState::max_true_remaining(int64_t clock) const {
  int64_t best = 0;
  for (const auto& c : connections) {
    best = std::max(best, c.true_end_step - clock);
  }
  return best;
}

ClusterState make_cluster(const SimulationConfig& config) {
  config.validate();
  ClusterState state;
  state.servers.resize(static_cast<size_t>(config.server_num));
  for (int i = 0; i < config.server_num; ++i) {
    state.servers[static_cast<size_t>(i)].index = i;
    state.servers[static_cast<size_t>(i)].capacity = config.capacity;
  }
  return state;
}

bool feasible(const ServerState& server, const ResourceVector& demand) {
  return (server.occupied + demand).fits_within(server.capacity);
}

void lookahead_features(const ServerState& server, int64_t clock, const SimulationConfig& config,
                        std::span<double> out) {
  const int h = config.future_sample;
  const size_t size = static_cast<size_t>(4 * h + 1);
  if (out.size() != size) throw ConfigError("lookahead_features: output span has wrong size");

  std::fill(out.begin(), out.end(), 0.0);
  if (server.connections.empty()) return;

  const int64_t stride = config.offset_stride_steps();
  const int64_t range = config.predicted_range_steps();
  const int64_t last_offset = clock + static_cast<int64_t>(h) * stride;

  // Occupied demand per resource at each future offset, counting connections
  // predicted to still be alive strictly beyond it.
  int64_t tail = 0;
  for (const auto& conn : server.connections) {
    for (int k = 0; k < h; ++k) {
      const int64_t at = clock + static_cast<int64_t>(k + 1) * stride;
      if (conn.predicted_end_step > at) {
        for (int r = 0; r < ResourceVector::kDims; ++r) {
          out[static_cast<size_t>(r * h + k)] += static_cast<double>(conn.demand[r]);
        }
      } else {
        break;  // offsets grow, later ones cannot be covered either
      }
    }
    tail = std::max(tail, conn.predicted_end_step - last_offset);
  }
  for (int r = 0; r < ResourceVector::kDims; ++r) {
    for (int k = 0; k < h; ++k) {
      out[static_cast<size_t>(r * h + k)] /= static_cast<double>(server.capacity[r]);
    }
  }
  out[size - 1] = static_cast<double>(tail) / static_cast<double>(range);
}

}  // namespace lbsim
