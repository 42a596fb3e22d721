#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "lbsim/cluster.hpp"
#include "lbsim/request.hpp"

namespace lbsim {

// Either a server index in [0, N) or kBlock. Policies must only return a
// server that is feasible for the request at decision time; the simulator
// treats a violation as an internal error.
struct RoutingDecision {
  static constexpr int kBlock = -1;

  int server = kBlock;

  bool is_block() const { return server == kBlock; }
  static RoutingDecision block() { return RoutingDecision{}; }
  static RoutingDecision route_to(int server) { return RoutingDecision{server}; }

  bool operator==(const RoutingDecision&) const = default;
};

// Indices of servers that can take the demand right now. An empty result
// means the caller must block the request.
std::vector<int> mask_actions(const std::vector<ServerState>& servers,
                              const ResourceVector& demand);

// Interface shared by the heuristic routers and the neural policy. A policy
// instance belongs to one simulator instance; reset() is called once at
// episode start (the seed only matters for stochastic policies).
class RoutingPolicy {
 public:
  virtual ~RoutingPolicy() = default;

  virtual void reset(uint64_t /*seed*/) {}
  virtual RoutingDecision decide(const ClusterState& state, const UserRequest& request) = 0;
  virtual std::string_view name() const = 0;
};

}  // namespace lbsim
