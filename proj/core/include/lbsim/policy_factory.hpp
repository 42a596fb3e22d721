#pragma once

#include <memory>
#include <string>

#include "lbsim/cluster.hpp"
#include "lbsim/neural.hpp"
#include "lbsim/policy.hpp"

namespace lbsim {

// Resolves a policy selection string:
//   random | round_robin | least_connection | least_duration_gap |
//   neural:<genome-file>
// Unknown names raise ConfigError; a missing genome file raises IoError.
std::unique_ptr<RoutingPolicy> make_policy(const std::string& spec, const SimulationConfig& config,
                                           int64_t demand_scale,
                                           MaskMode mask_mode = MaskMode::kExclude);

}  // namespace lbsim
