#pragma once

#include <cstdint>

#include "lbsim/resource.hpp"

namespace lbsim {

// One incoming user request. Durations are stored in integer timesteps
// (the simulator is integer-stepped); minute-valued configuration is
// converted on generation/ingestion.
struct UserRequest {
  int64_t id = 0;
  int64_t arrival_step = 0;
  ResourceVector demand;
  int64_t true_duration = 0;       // timesteps, ground truth
  int64_t predicted_duration = 0;  // timesteps, what policies are allowed to see

  bool operator==(const UserRequest&) const = default;
};

}  // namespace lbsim
