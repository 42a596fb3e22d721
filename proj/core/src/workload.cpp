#include "lbsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <unordered_map>

#include <json.hpp>

#include "csv_internal.hpp"
#include "lbsim/errors.hpp"
#include "lbsim/rng.hpp"

namespace lbsim {

namespace {

using nlohmann::json;

int64_t clamp64(int64_t v, int64_t lo, int64_t hi) { return std::clamp(v, lo, hi); }

// Mean duration in timesteps over the uniform integer minute range; exact
// summation so the load helpers agree with the generator's ceil conversion.
double mean_duration_steps(const WorkloadConfig& config) {
  double sum = 0.0;
  for (int64_t m = config.min_user_duration; m <= config.max_user_duration; ++m) {
    sum += static_cast<double>(config.duration_to_steps(m));
  }
  return sum / static_cast<double>(config.max_user_duration - config.min_user_duration + 1);
}

double truncated_gaussian(std::mt19937_64& rng, std::normal_distribution<double>& dist,
                          double sigma) {
  for (;;) {
    const double e = dist(rng);
    if (std::abs(e) <= 3.0 * sigma) return e;
  }
}

}  // namespace

void WorkloadConfig::validate() const {
  if (data_time <= 0) throw ConfigError("workload: data_time must be positive");
  if (time_step <= 0) throw ConfigError("workload: time_step must be positive");
  if (mean_req_num < 0) throw ConfigError("workload: mean_req_num must be >= 0");
  if (min_res_req < 0) throw ConfigError("workload: min_res_req must be >= 0");
  if (min_res_req > max_res_req) throw ConfigError("workload: min_res_req > max_res_req");
  if (min_user_duration < 1) throw ConfigError("workload: min_user_duration must be >= 1");
  if (min_user_duration > max_user_duration) {
    throw ConfigError("workload: min_user_duration > max_user_duration");
  }
  if (noise_sigma < 0) throw ConfigError("workload: noise_sigma must be >= 0");
}

std::vector<UserRequest> generate_workload(const WorkloadConfig& config) {
  config.validate();

  std::vector<UserRequest> requests;
  auto rng = rng::engine(config.seed);
  std::uniform_int_distribution<int64_t> demand_dist(config.min_res_req, config.max_res_req);
  std::uniform_int_distribution<int64_t> duration_dist(config.min_user_duration,
                                                       config.max_user_duration);

  const int64_t steps = config.arrival_steps();
  int64_t next_id = 0;
  for (int64_t t = 0; t < steps; ++t) {
    int64_t count = 0;
    if (config.mean_req_num > 0) {
      std::poisson_distribution<int64_t> arrivals(config.mean_req_num);
      count = arrivals(rng);
    }
    for (int64_t k = 0; k < count; ++k) {
      UserRequest req;
      req.id = next_id++;
      req.arrival_step = t;
      for (int r = 0; r < ResourceVector::kDims; ++r) req.demand[r] = demand_dist(rng);
      req.true_duration = config.duration_to_steps(duration_dist(rng));
      req.predicted_duration = req.true_duration;
      requests.push_back(req);
    }
  }
  return requests;
}

void apply_prediction_noise(std::vector<UserRequest>& requests, const WorkloadConfig& config,
                            double sigma_minutes, uint64_t seed) {
  if (sigma_minutes < 0) throw ConfigError("noise sigma must be >= 0");
  if (sigma_minutes == 0) return;

  const double steps_per_minute = 60.0 / static_cast<double>(config.time_step);
  const int64_t lo = config.min_duration_steps();
  const int64_t hi = config.max_duration_steps();

  auto rng = rng::engine(seed);
  std::normal_distribution<double> dist(0.0, sigma_minutes);
  for (auto& req : requests) {
    const double noise_minutes = truncated_gaussian(rng, dist, sigma_minutes);
    const int64_t noise_steps = std::llround(noise_minutes * steps_per_minute);
    req.predicted_duration = clamp64(req.true_duration + noise_steps, lo, hi);
  }
}

double expected_load(const WorkloadConfig& config, int server_num,
                     const ResourceVector& capacity) {
  config.validate();
  if (server_num <= 0) throw ConfigError("expected_load: server_num must be positive");

  const double mean_demand =
      0.5 * static_cast<double>(config.min_res_req + config.max_res_req);
  const double concurrent = config.mean_req_num * mean_duration_steps(config) * mean_demand;

  double load = 0.0;
  for (int r = 0; r < ResourceVector::kDims; ++r) {
    if (capacity[r] <= 0) throw ConfigError("expected_load: capacity must be positive");
    load = std::max(load, concurrent / static_cast<double>(server_num * capacity[r]));
  }
  return load;
}

double mean_req_num_for_load(double target_load, const WorkloadConfig& config, int server_num,
                             const ResourceVector& capacity) {
  if (target_load < 0) throw ConfigError("target load must be >= 0");
  WorkloadConfig unit = config;
  unit.mean_req_num = 1.0;
  const double load_per_unit = expected_load(unit, server_num, capacity);
  if (load_per_unit <= 0) throw ConfigError("degenerate config: zero demand per request");
  return target_load / load_per_unit;
}

void write_workload_csv(const std::filesystem::path& path,
                        std::span<const UserRequest> requests) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "id,arrival_step,cpu,ram,hdd,bw,true_duration,predicted_duration\n";
  for (const auto& r : requests) {
    out << r.id << ',' << r.arrival_step << ',' << r.demand.cpu() << ',' << r.demand.ram() << ','
        << r.demand.hdd() << ',' << r.demand.bw() << ',' << r.true_duration << ','
        << r.predicted_duration << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<UserRequest> read_workload_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());

  std::string line;
  if (!detail::read_line(in, line)) throw IoError("empty workload file: " + path.string());
  if (line != "id,arrival_step,cpu,ram,hdd,bw,true_duration,predicted_duration") {
    throw IoError("unexpected workload header in " + path.string());
  }

  std::vector<UserRequest> requests;
  int64_t line_no = 1;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 8) {
      throw IoError(path.string() + ": line " + std::to_string(line_no) + ": expected 8 fields");
    }
    UserRequest r;
    try {
      r.id = std::stoll(fields[0]);
      r.arrival_step = std::stoll(fields[1]);
      for (int c = 0; c < ResourceVector::kDims; ++c) {
        r.demand[c] = std::stoll(fields[static_cast<size_t>(2 + c)]);
      }
      r.true_duration = std::stoll(fields[6]);
      r.predicted_duration = std::stoll(fields[7]);
    } catch (const std::exception&) {
      throw IoError(path.string() + ": line " + std::to_string(line_no) + ": bad integer field");
    }
    requests.push_back(r);
  }
  return requests;
}

TraceMapping read_trace_mapping(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace mapping: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("bad trace mapping JSON: " + std::string(e.what()));
  }

  if (!doc.contains("columns") || !doc["columns"].is_object()) {
    throw ConfigError("trace mapping: missing \"columns\" object");
  }
  const auto& cols = doc["columns"];
  auto col = [&](const char* key) -> std::string {
    if (!cols.contains(key)) {
      throw ConfigError(std::string("trace mapping: missing column for \"") + key + "\"");
    }
    return cols[key].get<std::string>();
  };

  TraceMapping m;
  m.arrival_col = col("arrival");
  m.cpu_col = col("cpu");
  m.ram_col = col("ram");
  m.hdd_col = col("hdd");
  m.bw_col = col("bw");
  m.duration_col = col("duration");

  if (doc.contains("factors")) {
    const auto& f = doc["factors"];
    auto factor = [&](const char* key, double fallback) {
      return f.contains(key) ? f[key].get<double>() : fallback;
    };
    m.arrival_factor = factor("arrival", 1.0);
    m.cpu_factor = factor("cpu", 1.0);
    m.ram_factor = factor("ram", 1.0);
    m.hdd_factor = factor("hdd", 1.0);
    m.bw_factor = factor("bw", 1.0);
    m.duration_factor = factor("duration", 1.0);
  }
  return m;
}

std::pair<std::vector<UserRequest>, TraceReport> load_trace(const std::filesystem::path& path,
                                                            const TraceMapping& mapping,
                                                            const WorkloadConfig& config) {
  config.validate();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace: " + path.string());

  std::string line;
  if (!detail::read_line(in, line)) throw IoError("empty trace: " + path.string());
  const auto header = detail::split_csv_line(line);
  std::unordered_map<std::string, size_t> col_index;
  for (size_t i = 0; i < header.size(); ++i) col_index[header[i]] = i;

  auto require = [&](const std::string& name) -> size_t {
    auto it = col_index.find(name);
    if (it == col_index.end()) {
      throw ConfigError("trace header has no column \"" + name + "\"");
    }
    return it->second;
  };
  const size_t arrival_i = require(mapping.arrival_col);
  const std::array<size_t, 4> demand_i = {require(mapping.cpu_col), require(mapping.ram_col),
                                          require(mapping.hdd_col), require(mapping.bw_col)};
  const std::array<double, 4> demand_f = {mapping.cpu_factor, mapping.ram_factor,
                                          mapping.hdd_factor, mapping.bw_factor};
  const size_t duration_i = require(mapping.duration_col);

  const int64_t dur_lo = config.min_duration_steps();
  const int64_t dur_hi = config.max_duration_steps();

  TraceReport report;
  std::vector<UserRequest> requests;
  while (detail::read_line(in, line)) {
    if (line.empty()) continue;
    ++report.rows_read;
    const auto fields = detail::split_csv_line(line);

    auto scaled = [&](size_t index, double factor, int64_t& out) -> bool {
      if (index >= fields.size() || fields[index].empty()) return false;
      try {
        const double value = std::stod(fields[index]) * factor;
        if (!std::isfinite(value) || value < 0) return false;
        out = std::llround(value);
      } catch (const std::exception&) {
        return false;
      }
      return true;
    };

    UserRequest r;
    bool ok = scaled(arrival_i, mapping.arrival_factor, r.arrival_step);
    for (int c = 0; ok && c < ResourceVector::kDims; ++c) {
      ok = scaled(demand_i[static_cast<size_t>(c)], demand_f[static_cast<size_t>(c)], r.demand[c]);
    }
    ok = ok && scaled(duration_i, mapping.duration_factor, r.true_duration);
    if (!ok) {
      ++report.rows_skipped;
      continue;
    }

    for (int c = 0; c < ResourceVector::kDims; ++c) {
      r.demand[c] = clamp64(r.demand[c], config.min_res_req, config.max_res_req);
    }
    r.true_duration = clamp64(r.true_duration, dur_lo, dur_hi);
    r.predicted_duration = r.true_duration;
    requests.push_back(r);
    ++report.rows_kept;
  }

  std::stable_sort(requests.begin(), requests.end(),
                   [](const UserRequest& a, const UserRequest& b) {
                     return a.arrival_step < b.arrival_step;
                   });
  for (size_t i = 0; i < requests.size(); ++i) requests[i].id = static_cast<int64_t>(i);
  return {std::move(requests), report};
}

}  // namespace lbsim
