#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lbsim/request.hpp"
#include "lbsim/resource.hpp"

namespace lbsim {

// Parameters of the synthetic request stream. Durations are configured in
// minutes and converted to timesteps with ceil(minutes * 60 / time_step).
struct WorkloadConfig {
  int64_t data_time = 120;        // minutes during which requests arrive
  int64_t time_step = 12;         // seconds per timestep
  double mean_req_num = 3.0;      // Poisson mean of arrivals per timestep
  int64_t min_res_req = 0;        // units, per resource component
  int64_t max_res_req = 10;       // units
  int64_t min_user_duration = 1;  // minutes
  int64_t max_user_duration = 120;  // minutes
  double noise_sigma = 0.0;       // minutes, duration-prediction noise std dev
  uint64_t seed = 0;

  int64_t arrival_steps() const { return data_time * 60 / time_step; }
  int64_t duration_to_steps(int64_t minutes) const {
    return (minutes * 60 + time_step - 1) / time_step;
  }
  int64_t min_duration_steps() const { return duration_to_steps(min_user_duration); }
  int64_t max_duration_steps() const { return duration_to_steps(max_user_duration); }

  // Throws ConfigError on out-of-range values (min > max, sigma < 0, ...).
  void validate() const;
};

// Synthetic stream: per timestep a Poisson(mean_req_num) number of requests,
// uniform integer demands and uniform integer durations (in minutes,
// converted to steps). predicted_duration starts equal to true_duration;
// noise is applied separately. Deterministic given config.seed.
std::vector<UserRequest> generate_workload(const WorkloadConfig& config);

// Perturbs predicted_duration by Gaussian noise (std dev sigma minutes),
// truncated at 3 sigma and then clamped to the configured duration range.
// sigma == 0 is the identity. true_duration is never touched.
void apply_prediction_noise(std::vector<UserRequest>& requests, const WorkloadConfig& config,
                            double sigma_minutes, uint64_t seed);

// Expected steady-state demand divided by total capacity, per the binding
// resource (max over components). Computed analytically from the config via
// Little's law: mean_req_num * E[duration_steps] * E[demand].
double expected_load(const WorkloadConfig& config, int server_num,
                     const ResourceVector& capacity);

// Inverse of expected_load in mean_req_num: the Poisson mean that makes the
// analytic load equal target_load (a fraction, e.g. 0.75).
double mean_req_num_for_load(double target_load, const WorkloadConfig& config, int server_num,
                             const ResourceVector& capacity);

// Workload CSV, one request per row:
//   id,arrival_step,cpu,ram,hdd,bw,true_duration,predicted_duration
// Integers throughout; durations in timesteps.
void write_workload_csv(const std::filesystem::path& path, std::span<const UserRequest> requests);
std::vector<UserRequest> read_workload_csv(const std::filesystem::path& path);

// Column mapping for ingesting an external trace CSV. Factors convert the
// source units into internal ones: arrival and duration into timesteps,
// demands into capacity units. Values are rounded to the nearest integer
// after scaling.
struct TraceMapping {
  std::string arrival_col;
  std::string cpu_col;
  std::string ram_col;
  std::string hdd_col;
  std::string bw_col;
  std::string duration_col;
  double arrival_factor = 1.0;
  double cpu_factor = 1.0;
  double ram_factor = 1.0;
  double hdd_factor = 1.0;
  double bw_factor = 1.0;
  double duration_factor = 1.0;
};

// Mapping document:
//   {"columns": {"arrival": "...", "cpu": "...", "ram": "...", "hdd": "...",
//                "bw": "...", "duration": "..."},
//    "factors": {"arrival": 1.0, ...}}   (factors optional, default 1)
TraceMapping read_trace_mapping(const std::filesystem::path& path);

struct TraceReport {
  int64_t rows_read = 0;
  int64_t rows_kept = 0;
  int64_t rows_skipped = 0;
};

// Converts trace rows to requests: rows with missing or negative fields are
// skipped and counted; kept rows have demands and durations clamped to the
// configured ranges. Output is sorted by arrival_step (stable) and re-keyed
// with sequential ids.
std::pair<std::vector<UserRequest>, TraceReport> load_trace(const std::filesystem::path& path,
                                                            const TraceMapping& mapping,
                                                            const WorkloadConfig& config);

}  // namespace lbsim
