#include "lbsim/heuristics.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace lbsim {

std::vector<int> mask_actions(const std::vector<ServerState>& servers,
                              const ResourceVector& demand) {
  std::vector<int> out;
  out.reserve(servers.size());
  for (const auto& server : servers) {
    if (feasible(server, demand)) out.push_back(server.index);
  }
  return out;
}

RoutingDecision RandomPolicy::decide(const ClusterState& state, const UserRequest& request) {
  const auto candidates = mask_actions(state.servers, request.demand);
  if (candidates.empty()) return RoutingDecision::block();
  std::uniform_int_distribution<size_t> pick(0, candidates.size() - 1);
  return RoutingDecision::route_to(candidates[pick(rng_)]);
}

RoutingDecision RoundRobinPolicy::decide(const ClusterState& state, const UserRequest& request) {
  const int n = static_cast<int>(state.servers.size());
  for (int k = 0; k < n; ++k) {
    const int i = (cursor_ + k) % n;
    if (feasible(state.servers[static_cast<size_t>(i)], request.demand)) {
      cursor_ = (i + 1) % n;
      return RoutingDecision::route_to(i);
    }
  }
  return RoutingDecision::block();  // cursor untouched
}

RoutingDecision LeastConnectionPolicy::decide(const ClusterState& state,
                                              const UserRequest& request) {
  int best = RoutingDecision::kBlock;
  int64_t best_count = std::numeric_limits<int64_t>::max();
  for (const auto& server : state.servers) {
    if (!feasible(server, request.demand)) continue;
    if (server.connection_count() < best_count) {
      best_count = server.connection_count();
      best = server.index;
    }
  }
  return best == RoutingDecision::kBlock ? RoutingDecision::block()
                                         : RoutingDecision::route_to(best);
}

RoutingDecision LeastDurationGapPolicy::decide(const ClusterState& state,
                                               const UserRequest& request) {
  int best = RoutingDecision::kBlock;
  int64_t best_gap = std::numeric_limits<int64_t>::max();
  for (const auto& server : state.servers) {
    if (!feasible(server, request.demand)) continue;
    const int64_t gap =
        std::llabs(server.max_predicted_remaining(state.clock) - request.predicted_duration);
    if (gap < best_gap) {
      best_gap = gap;
      best = server.index;
    }
  }
  return best == RoutingDecision::kBlock ? RoutingDecision::block()
                                         : RoutingDecision::route_to(best);
}

}  // namespace lbsim
