#pragma once

#include <random>

#include "lbsim/policy.hpp"

namespace lbsim {

// Uniform choice over the feasible set.
class RandomPolicy : public RoutingPolicy {
 public:
  void reset(uint64_t seed) override { rng_.seed(seed); }
  RoutingDecision decide(const ClusterState& state, const UserRequest& request) override;
  std::string_view name() const override { return "random"; }

 private:
  std::mt19937_64 rng_;
};

// Cyclic scan from a persistent cursor; the cursor advances past the chosen
// server and stays put when everything is infeasible.
class RoundRobinPolicy : public RoutingPolicy {
 public:
  void reset(uint64_t) override { cursor_ = 0; }
  RoutingDecision decide(const ClusterState& state, const UserRequest& request) override;
  std::string_view name() const override { return "round_robin"; }

  int cursor() const { return cursor_; }

 private:
  int cursor_ = 0;
};

// Feasible server with the fewest live connections; ties break to the lowest
// index.
class LeastConnectionPolicy : public RoutingPolicy {
 public:
  RoutingDecision decide(const ClusterState& state, const UserRequest& request) override;
  std::string_view name() const override { return "least_connection"; }
};

// Feasible server whose maximal predicted remaining duration is closest to
// the request's predicted duration (empty servers count as 0); ties break to
// the lowest index.
class LeastDurationGapPolicy : public RoutingPolicy {
 public:
  RoutingDecision decide(const ClusterState& state, const UserRequest& request) override;
  std::string_view name() const override { return "least_duration_gap"; }
};

}  // namespace lbsim
