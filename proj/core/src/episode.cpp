#include "lbsim/episode.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lbsim/errors.hpp"

namespace lbsim {

Simulator::Simulator(const SimulationConfig& config) : config_(config) {
  config_.validate();
  state_ = make_cluster(config_);
  result_.num_servers = config_.server_num;
  result_.time_step = config_.time_step;
}

void Simulator::push_block(UserRequest request) {
  state_.block_queue.push_back(std::move(request));
  ++result_.blocked_total;
  if (static_cast<int64_t>(state_.block_queue.size()) > config_.block_queue_size) {
    aborted_ = true;
  }
}

bool Simulator::step(std::span<const UserRequest> arrivals, RoutingPolicy& policy) {
  if (aborted_) return false;

  // 1. Passive disconnections: a connection is released exactly when the
  // clock reaches its true end step.
  const int64_t clock = state_.clock;
  for (auto& server : state_.servers) {
    auto& conns = server.connections;
    bool any_released = false;
    for (const auto& c : conns) {
      if (c.true_end_step <= clock) {
        server.occupied -= c.demand;
        ++result_.completed;
        any_released = true;
      }
    }
    if (any_released) {
      std::erase_if(conns, [&](const Connection& c) { return c.true_end_step <= clock; });
    }
  }

  // 2. Retried blocked requests go ahead of this step's arrivals; whatever
  // does not fit in the ready queue falls back into the block queue.
  if (!state_.block_queue.empty()) {
    state_.ready_queue.insert(state_.ready_queue.begin(), state_.block_queue.begin(),
                              state_.block_queue.end());
    state_.block_queue.clear();
  }
  for (const auto& req : arrivals) {
    ++injected_;
    if (static_cast<int64_t>(state_.ready_queue.size()) < config_.ready_queue_size) {
      state_.ready_queue.push_back(req);
    } else {
      push_block(req);
      if (aborted_) break;
    }
  }

  // 3. Route one request at a time; occupancy updates immediately so the next
  // request in this very step sees it.
  while (!aborted_ && !state_.ready_queue.empty()) {
    UserRequest req = state_.ready_queue.front();
    state_.ready_queue.pop_front();

    const RoutingDecision decision = policy.decide(state_, req);
    if (decision.is_block()) {
      push_block(std::move(req));
      continue;
    }
    if (decision.server < 0 || decision.server >= config_.server_num) {
      throw std::logic_error("routing policy returned an out-of-range server index");
    }
    ServerState& server = state_.servers[static_cast<size_t>(decision.server)];
    if (!feasible(server, req.demand)) {
      throw std::logic_error("routing policy returned an infeasible server");
    }
    Connection conn;
    conn.request_id = req.id;
    conn.demand = req.demand;
    conn.start_step = clock;
    conn.true_end_step = clock + req.true_duration;
    conn.predicted_end_step = clock + req.predicted_duration;
    server.occupied += conn.demand;
    server.connections.push_back(conn);
  }

  if (aborted_) {
    result_.terminated_early = true;
    return false;
  }

  // 4. Snapshot, 5. advance.
  record_snapshot();
  ++state_.clock;
  return true;
}

void Simulator::record_snapshot() {
  const int64_t clock = state_.clock;
  for (const auto& server : state_.servers) {
    for (int r = 0; r < ResourceVector::kDims; ++r) {
      result_.utilization.push_back(static_cast<double>(server.occupied[r]) /
                                    static_cast<double>(server.capacity[r]));
    }
    result_.max_remaining.push_back(server.max_true_remaining(clock));
    result_.conn_counts.push_back(static_cast<int32_t>(server.connections.size()));
  }
  ++result_.num_timesteps;
}

EpisodeResult Simulator::take_result(int64_t requests_total) {
  result_.requests_total = requests_total;
  result_.live_at_end = 0;
  for (const auto& server : state_.servers) {
    result_.live_at_end += server.connection_count();
  }
  result_.queued_at_end =
      static_cast<int64_t>(state_.ready_queue.size() + state_.block_queue.size());
  result_.not_injected = requests_total - injected_;
  return std::move(result_);
}

EpisodeResult run_episode(std::span<const UserRequest> requests, const SimulationConfig& config,
                          RoutingPolicy& policy, uint64_t seed) {
  Simulator sim(config);
  policy.reset(seed);

  size_t next = 0;
  for (;;) {
    const int64_t clock = sim.state().clock;
    if (next < requests.size() && requests[next].arrival_step < clock) {
      throw std::logic_error(
          "run_episode: requests must be sorted by non-negative arrival_step");
    }
    size_t end = next;
    while (end < requests.size() && requests[end].arrival_step == clock) ++end;

    const bool ok = sim.step(requests.subspan(next, end - next), policy);
    next = end;
    if (!ok) break;

    const bool arrivals_exhausted = next == requests.size();
    const bool drained = sim.state().ready_queue.empty() && sim.state().block_queue.empty();
    bool no_live = true;
    for (const auto& server : sim.state().servers) {
      if (!server.connections.empty()) {
        no_live = false;
        break;
      }
    }
    if (arrivals_exhausted && drained && no_live) break;
  }
  return sim.take_result(static_cast<int64_t>(requests.size()));
}

void write_episode_csv(const std::filesystem::path& path, const EpisodeResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "t,server,cpu,ram,hdd,bw,conn_count,max_remaining_true\n";

  const double minutes_per_step = static_cast<double>(result.time_step) / 60.0;
  char buf[64];
  for (int64_t t = 0; t < result.num_timesteps; ++t) {
    for (int i = 0; i < result.num_servers; ++i) {
      out << t << ',' << i;
      for (int r = 0; r < ResourceVector::kDims; ++r) {
        std::snprintf(buf, sizeof(buf), ",%.6f", result.utilization_at(t, i, r));
        out << buf;
      }
      const size_t flat = static_cast<size_t>(t * result.num_servers + i);
      std::snprintf(buf, sizeof(buf), ",%d,%.4f", result.conn_counts[flat],
                    static_cast<double>(result.max_remaining[flat]) * minutes_per_step);
      out << buf << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace lbsim
