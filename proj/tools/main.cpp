// Command-line front end: workload generation, trace ingestion, training,
// evaluation and sweeps, all driven by one JSON config plus flag overrides
// (flags win). Every command writes a config snapshot that reproduces its
// outputs bit for bit.
//
// Exit codes: 0 success, 1 config error, 2 I/O error, 3 internal invariant
// violation.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lbsim/episode.hpp"
#include "lbsim/errors.hpp"
#include "lbsim/evolution.hpp"
#include "lbsim/objectives.hpp"
#include "lbsim/parallel.hpp"
#include "lbsim/policy_factory.hpp"
#include "lbsim/rng.hpp"
#include "lbsim/workload.hpp"

namespace {

using lbsim::ConfigError;
using lbsim::IoError;
using nlohmann::json;

struct RunConfig {
  lbsim::WorkloadConfig workload;
  lbsim::SimulationConfig sim;
  lbsim::EvoConfig evo;
  uint64_t seed = 0;
  std::string out_dir = "out";
  std::vector<std::string> policies = {"least_connection"};
  int n_seeds = 1;
  int parallelism = 1;
  std::string mask_mode = "exclude";
  std::string workload_file;   // when set, evaluate/train run on this CSV
  double target_load = -1.0;   // >= 0 overrides mean_req_num analytically
  std::string sweep_axis;
  std::vector<double> sweep_values;
};

template <typename T>
void read_field(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: bad value for \"") + key + "\"");
  }
}

lbsim::ResourceVector read_capacity(const json& doc) {
  lbsim::ResourceVector cap{500, 500, 500, 500};
  if (!doc.contains("capacity")) return cap;
  const auto& c = doc.at("capacity");
  if (c.is_number()) {
    const int64_t v = c.get<int64_t>();
    return {v, v, v, v};
  }
  if (c.is_object()) {
    for (int r = 0; r < lbsim::ResourceVector::kDims; ++r) {
      if (c.contains(lbsim::kResourceNames[r])) {
        cap[r] = c.at(lbsim::kResourceNames[r]).get<int64_t>();
      }
    }
    return cap;
  }
  throw ConfigError("config: capacity must be a number or an object");
}

void parse_workload(const json& doc, lbsim::WorkloadConfig& w) {
  read_field(doc, "data_time", w.data_time);
  read_field(doc, "time_step", w.time_step);
  read_field(doc, "mean_req_num", w.mean_req_num);
  read_field(doc, "min_res_req", w.min_res_req);
  read_field(doc, "max_res_req", w.max_res_req);
  read_field(doc, "min_user_duration", w.min_user_duration);
  read_field(doc, "max_user_duration", w.max_user_duration);
  read_field(doc, "noise_sigma", w.noise_sigma);
}

void parse_simulation(const json& doc, lbsim::SimulationConfig& s) {
  read_field(doc, "server_num", s.server_num);
  s.capacity = read_capacity(doc);
  read_field(doc, "ready_queue_size", s.ready_queue_size);
  read_field(doc, "block_queue_size", s.block_queue_size);
  read_field(doc, "predicted_range", s.predicted_range);
  read_field(doc, "future_sample", s.future_sample);
  read_field(doc, "time_step", s.time_step);
}

void parse_evolution(const json& doc, lbsim::EvoConfig& e) {
  read_field(doc, "pop_size", e.pop_size);
  read_field(doc, "elite_count", e.elite_count);
  read_field(doc, "offspring_count", e.offspring_count);
  read_field(doc, "mutation_prob", e.mutation_prob);
  read_field(doc, "mutation_sigma", e.mutation_sigma);
  read_field(doc, "max_simulations", e.max_simulations);
  read_field(doc, "max_generations", e.max_generations);
  read_field(doc, "init_scale", e.init_scale);
  if (doc.contains("eval_seed_policy")) {
    const auto v = doc.at("eval_seed_policy").get<std::string>();
    if (v == "fixed") {
      e.resample_each_generation = false;
    } else if (v == "per_generation") {
      e.resample_each_generation = true;
    } else {
      throw ConfigError("config: eval_seed_policy must be fixed | per_generation");
    }
  }
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;

  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("bad config JSON: " + std::string(e.what()));
  }

  if (doc.contains("workload")) parse_workload(doc.at("workload"), cfg.workload);
  if (doc.contains("simulation")) parse_simulation(doc.at("simulation"), cfg.sim);
  if (doc.contains("evolution")) parse_evolution(doc.at("evolution"), cfg.evo);
  read_field(doc, "seed", cfg.seed);
  read_field(doc, "out_dir", cfg.out_dir);
  read_field(doc, "n_seeds", cfg.n_seeds);
  read_field(doc, "parallelism", cfg.parallelism);
  read_field(doc, "mask_mode", cfg.mask_mode);
  read_field(doc, "workload_file", cfg.workload_file);
  read_field(doc, "target_load", cfg.target_load);
  if (doc.contains("policy")) cfg.policies = {doc.at("policy").get<std::string>()};
  if (doc.contains("policies")) cfg.policies = doc.at("policies").get<std::vector<std::string>>();
  if (doc.contains("sweep")) {
    read_field(doc.at("sweep"), "axis", cfg.sweep_axis);
    read_field(doc.at("sweep"), "values", cfg.sweep_values);
  }
  return cfg;
}

lbsim::MaskMode parse_mask_mode(const std::string& mode) {
  if (mode == "exclude") return lbsim::MaskMode::kExclude;
  if (mode == "zero") return lbsim::MaskMode::kZero;
  throw ConfigError("mask_mode must be exclude | zero");
}

// Resolves derived values and validates everything up front.
void finalize(RunConfig& cfg) {
  if (cfg.workload.time_step != cfg.sim.time_step) {
    throw ConfigError("workload.time_step and simulation.time_step must agree");
  }
  if (cfg.n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
  if (cfg.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (cfg.policies.empty()) throw ConfigError("at least one policy is required");
  parse_mask_mode(cfg.mask_mode);
  if (cfg.target_load >= 0) {
    cfg.workload.mean_req_num = lbsim::mean_req_num_for_load(
        cfg.target_load, cfg.workload, cfg.sim.server_num, cfg.sim.capacity);
  }
  cfg.workload.validate();
  cfg.sim.validate();
}

json capacity_json(const lbsim::ResourceVector& cap) {
  json c;
  for (int r = 0; r < lbsim::ResourceVector::kDims; ++r) c[lbsim::kResourceNames[r]] = cap[r];
  return c;
}

// The snapshot captures everything semantic. out_dir and parallelism are
// execution details and stay out, so reruns elsewhere compare byte-equal.
json snapshot_json(const RunConfig& cfg, const std::string& command) {
  json doc;
  doc["command"] = command;
  doc["seed"] = cfg.seed;
  doc["n_seeds"] = cfg.n_seeds;
  doc["policies"] = cfg.policies;
  doc["mask_mode"] = cfg.mask_mode;
  if (!cfg.workload_file.empty()) doc["workload_file"] = cfg.workload_file;
  if (cfg.target_load >= 0) doc["target_load"] = cfg.target_load;
  if (!cfg.sweep_axis.empty()) {
    doc["sweep"]["axis"] = cfg.sweep_axis;
    doc["sweep"]["values"] = cfg.sweep_values;
  }

  json& w = doc["workload"];
  w["data_time"] = cfg.workload.data_time;
  w["time_step"] = cfg.workload.time_step;
  w["mean_req_num"] = cfg.workload.mean_req_num;
  w["min_res_req"] = cfg.workload.min_res_req;
  w["max_res_req"] = cfg.workload.max_res_req;
  w["min_user_duration"] = cfg.workload.min_user_duration;
  w["max_user_duration"] = cfg.workload.max_user_duration;
  w["noise_sigma"] = cfg.workload.noise_sigma;

  json& s = doc["simulation"];
  s["server_num"] = cfg.sim.server_num;
  s["capacity"] = capacity_json(cfg.sim.capacity);
  s["ready_queue_size"] = cfg.sim.ready_queue_size;
  s["block_queue_size"] = cfg.sim.block_queue_size;
  s["predicted_range"] = cfg.sim.predicted_range;
  s["future_sample"] = cfg.sim.future_sample;
  s["time_step"] = cfg.sim.time_step;

  json& e = doc["evolution"];
  e["pop_size"] = cfg.evo.pop_size;
  e["elite_count"] = cfg.evo.elite_count;
  e["offspring_count"] = cfg.evo.offspring_count;
  e["mutation_prob"] = cfg.evo.mutation_prob;
  e["mutation_sigma"] = cfg.evo.mutation_sigma;
  e["max_simulations"] = cfg.evo.max_simulations;
  e["max_generations"] = cfg.evo.max_generations;
  e["eval_seed_policy"] = cfg.evo.resample_each_generation ? "per_generation" : "fixed";
  e["init_scale"] = cfg.evo.init_scale;
  return doc;
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::filesystem::path prepare_out_dir(const RunConfig& cfg, const std::string& command) {
  std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());
  write_json_file(dir / "config_snapshot.json", snapshot_json(cfg, command));
  return dir;
}

// One evaluation scenario per seed index; the same derivation the trainer
// uses, so trained policies can be scored on its seed or held out from it.
struct Scenario {
  std::vector<lbsim::UserRequest> requests;
  uint64_t policy_seed = 0;
};

Scenario build_scenario(const RunConfig& cfg, uint64_t index) {
  Scenario scenario;
  if (!cfg.workload_file.empty()) {
    scenario.requests = lbsim::read_workload_csv(cfg.workload_file);
  } else {
    lbsim::WorkloadConfig wl = cfg.workload;
    wl.seed = lbsim::rng::derive(cfg.seed, lbsim::rng::Stream::kWorkload, index);
    scenario.requests = lbsim::generate_workload(wl);
  }
  lbsim::apply_prediction_noise(scenario.requests, cfg.workload, cfg.workload.noise_sigma,
                                lbsim::rng::derive(cfg.seed, lbsim::rng::Stream::kNoise, index));
  scenario.policy_seed = lbsim::rng::derive(cfg.seed, lbsim::rng::Stream::kPolicy, index);
  return scenario;
}

struct SeedOutcome {
  lbsim::Fitness fitness;      // normalized balance; idle in minutes
  double balance_units = 0.0;  // capacity-scaled balance for reports
  bool aborted = false;
  bool has_fitness = false;
};

SeedOutcome evaluate_one(const RunConfig& cfg, const std::string& policy_spec, uint64_t index,
                         lbsim::EpisodeResult* keep_result) {
  const Scenario scenario = build_scenario(cfg, index);
  auto policy = lbsim::make_policy(policy_spec, cfg.sim, cfg.workload.max_res_req,
                                   parse_mask_mode(cfg.mask_mode));
  lbsim::EpisodeResult result =
      lbsim::run_episode(scenario.requests, cfg.sim, *policy, scenario.policy_seed);

  SeedOutcome outcome;
  outcome.aborted = result.terminated_early;
  if (result.num_timesteps >= 1) {
    outcome.fitness = lbsim::episode_fitness(result);
    outcome.balance_units = lbsim::episode_balance_units(result, cfg.sim.capacity);
    outcome.has_fitness = true;
  }
  if (keep_result != nullptr) *keep_result = std::move(result);
  return outcome;
}

struct MeanStd {
  double mean = 0.0;
  double std_dev = 0.0;
};

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd ms;
  if (values.empty()) return ms;
  for (const double v : values) ms.mean += v;
  ms.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (const double v : values) var += (v - ms.mean) * (v - ms.mean);
  ms.std_dev = std::sqrt(var / static_cast<double>(values.size()));
  return ms;
}

int cmd_generate(RunConfig cfg) {
  finalize(cfg);
  const auto dir = prepare_out_dir(cfg, "generate");

  lbsim::WorkloadConfig wl = cfg.workload;
  wl.seed = lbsim::rng::derive(cfg.seed, lbsim::rng::Stream::kWorkload, 0);
  auto requests = lbsim::generate_workload(wl);
  lbsim::apply_prediction_noise(requests, wl, wl.noise_sigma,
                                lbsim::rng::derive(cfg.seed, lbsim::rng::Stream::kNoise, 0));
  lbsim::write_workload_csv(dir / "workload.csv", requests);

  std::cout << "generate: " << requests.size() << " requests over " << wl.arrival_steps()
            << " timesteps -> " << (dir / "workload.csv").string() << "\n";
  return 0;
}

int cmd_ingest(RunConfig cfg, const std::string& input, const std::string& mapping_path) {
  finalize(cfg);
  if (input.empty()) throw ConfigError("ingest: --input <trace.csv> is required");
  if (mapping_path.empty()) throw ConfigError("ingest: --mapping <mapping.json> is required");
  const auto dir = prepare_out_dir(cfg, "ingest");

  const auto mapping = lbsim::read_trace_mapping(mapping_path);
  const auto [requests, report] = lbsim::load_trace(input, mapping, cfg.workload);
  lbsim::write_workload_csv(dir / "workload.csv", requests);

  json rep;
  rep["rows_read"] = report.rows_read;
  rep["rows_kept"] = report.rows_kept;
  rep["rows_skipped"] = report.rows_skipped;
  write_json_file(dir / "ingest_report.json", rep);

  std::cout << "ingest: read " << report.rows_read << ", kept " << report.rows_kept
            << ", skipped " << report.rows_skipped << " -> " << (dir / "workload.csv").string()
            << "\n";
  return 0;
}

int cmd_evaluate(RunConfig cfg) {
  finalize(cfg);
  if (cfg.policies.size() != 1) throw ConfigError("evaluate: exactly one policy per run");
  const std::string policy_spec = cfg.policies.front();
  // Resolve the policy once up front so a missing genome file fails fast.
  lbsim::make_policy(policy_spec, cfg.sim, cfg.workload.max_res_req,
                     parse_mask_mode(cfg.mask_mode));
  const auto dir = prepare_out_dir(cfg, "evaluate");

  std::vector<SeedOutcome> outcomes(static_cast<size_t>(cfg.n_seeds));
  lbsim::EpisodeResult first_result;
  lbsim::parallel_for(cfg.n_seeds, cfg.parallelism, [&](int64_t s) {
    outcomes[static_cast<size_t>(s)] = evaluate_one(
        cfg, policy_spec, static_cast<uint64_t>(s), s == 0 ? &first_result : nullptr);
  });

  json rows = json::array();
  std::vector<double> balances;
  std::vector<double> idles;
  int aborted_count = 0;
  for (int s = 0; s < cfg.n_seeds; ++s) {
    const auto& o = outcomes[static_cast<size_t>(s)];
    json row;
    row["seed_index"] = s;
    row["aborted"] = o.aborted;
    if (o.has_fitness) {
      row["f_balance"] = o.balance_units;
      row["f_balance_normalized"] = o.fitness.f_balance;
      row["f_idle"] = o.fitness.f_idle;
    }
    rows.push_back(row);
    if (o.aborted) {
      ++aborted_count;
    } else if (o.has_fitness) {
      balances.push_back(o.balance_units);
      idles.push_back(o.fitness.f_idle);
    }
  }

  const MeanStd balance_agg = mean_std(balances);
  const MeanStd idle_agg = mean_std(idles);
  json report;
  report["policy"] = policy_spec;
  report["n_seeds"] = cfg.n_seeds;
  report["results"] = rows;
  report["aggregate"]["f_balance"]["mean"] = balance_agg.mean;
  report["aggregate"]["f_balance"]["std"] = balance_agg.std_dev;
  report["aggregate"]["f_idle"]["mean"] = idle_agg.mean;
  report["aggregate"]["f_idle"]["std"] = idle_agg.std_dev;
  report["aggregate"]["aborted_count"] = aborted_count;
  // A single seed makes the std 0 by convention; flag it.
  report["aggregate"]["degenerate_std"] = cfg.n_seeds == 1;
  write_json_file(dir / "evaluation_report.json", report);

  if (first_result.num_timesteps >= 1) {
    lbsim::write_episode_csv(dir / "episode_timeseries.csv", first_result);
  }

  std::cout << "evaluate " << policy_spec << ": f_balance " << balance_agg.mean << " +- "
            << balance_agg.std_dev << " units, f_idle " << idle_agg.mean << " +- "
            << idle_agg.std_dev << " minutes (" << aborted_count << " aborted)\n";
  return 0;
}

int cmd_train(RunConfig cfg) {
  finalize(cfg);
  cfg.evo.validate();
  const auto dir = prepare_out_dir(cfg, "train");

  lbsim::TrainOptions options;
  options.master_seed = cfg.seed;
  options.out_dir = dir;
  options.parallelism = cfg.parallelism;
  options.mask_mode = parse_mask_mode(cfg.mask_mode);
  if (!cfg.workload_file.empty()) {
    options.base_requests = lbsim::read_workload_csv(cfg.workload_file);
  }

  const auto result = lbsim::train(cfg.evo, cfg.workload, cfg.sim, options);
  std::cout << "train: " << result.generations << " generations, " << result.simulations
            << " simulations, final front size " << result.front.size() << " -> "
            << dir.string() << "\n";
  return 0;
}

int cmd_sweep(RunConfig cfg) {
  if (cfg.sweep_axis.empty()) throw ConfigError("sweep: --axis is required");
  if (cfg.sweep_values.empty()) throw ConfigError("sweep: --values is required");
  if (cfg.sweep_axis != "load" && cfg.sweep_axis != "servers" && cfg.sweep_axis != "sigma") {
    throw ConfigError("sweep: axis must be load | servers | sigma");
  }
  finalize(cfg);
  const auto dir = prepare_out_dir(cfg, "sweep");

  struct Cell {
    double value = 0.0;
    std::string policy;
    int seed = 0;
    RunConfig cfg;
    SeedOutcome outcome;
    std::string error;
  };

  std::vector<Cell> cells;
  for (const double value : cfg.sweep_values) {
    RunConfig cell_cfg = cfg;
    if (cfg.sweep_axis == "load") {
      cell_cfg.workload.mean_req_num = lbsim::mean_req_num_for_load(
          value / 100.0, cfg.workload, cfg.sim.server_num, cfg.sim.capacity);
    } else if (cfg.sweep_axis == "servers") {
      const int servers = static_cast<int>(std::llround(value));
      if (servers < 1) throw ConfigError("sweep: server counts must be >= 1");
      cell_cfg.sim.server_num = servers;
      // Request volume scales with the cluster so the analytic load is held.
      cell_cfg.workload.mean_req_num =
          cfg.workload.mean_req_num * static_cast<double>(servers) / cfg.sim.server_num;
    } else {
      if (value < 0) throw ConfigError("sweep: sigma values must be >= 0");
      cell_cfg.workload.noise_sigma = value;
    }
    cell_cfg.workload.validate();
    cell_cfg.sim.validate();
    for (const auto& policy : cfg.policies) {
      for (int s = 0; s < cfg.n_seeds; ++s) {
        Cell cell;
        cell.value = value;
        cell.policy = policy;
        cell.seed = s;
        cell.cfg = cell_cfg;
        cells.push_back(std::move(cell));
      }
    }
  }

  lbsim::parallel_for(static_cast<int64_t>(cells.size()), cfg.parallelism, [&](int64_t i) {
    Cell& cell = cells[static_cast<size_t>(i)];
    try {
      cell.outcome =
          evaluate_one(cell.cfg, cell.policy, static_cast<uint64_t>(cell.seed), nullptr);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });

  std::ofstream out(dir / "sweep.csv");
  if (!out) throw IoError("cannot open for writing: " + (dir / "sweep.csv").string());
  out << "axis,value,policy,seed,f_balance,f_idle\n";
  json failures = json::array();
  char buf[160];
  for (const auto& cell : cells) {
    if (cell.error.empty() && cell.outcome.has_fitness) {
      std::snprintf(buf, sizeof(buf), "%s,%.9g,%s,%d,%.9g,%.9g\n", cfg.sweep_axis.c_str(),
                    cell.value, cell.policy.c_str(), cell.seed, cell.outcome.balance_units,
                    cell.outcome.fitness.f_idle);
    } else {
      std::snprintf(buf, sizeof(buf), "%s,%.9g,%s,%d,nan,nan\n", cfg.sweep_axis.c_str(),
                    cell.value, cell.policy.c_str(), cell.seed);
      json failure;
      failure["value"] = cell.value;
      failure["policy"] = cell.policy;
      failure["seed"] = cell.seed;
      failure["error"] = cell.error.empty() ? "episode produced no snapshots" : cell.error;
      failures.push_back(failure);
    }
    out << buf;
  }
  if (!out) throw IoError("write failed: sweep.csv");
  if (!failures.empty()) write_json_file(dir / "sweep_failures.json", failures);

  std::cout << "sweep " << cfg.sweep_axis << ": " << cells.size() << " cells ("
            << failures.size() << " failed) -> " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-objective connection-routing simulator and trainer"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<std::string> policies;
  std::optional<int> n_seeds;
  std::optional<int> parallelism;
  std::optional<std::string> mask_mode;
  std::optional<std::string> workload_file;
  std::optional<double> target_load;
  std::string axis;
  std::string values_csv;
  std::string ingest_input;
  std::string ingest_mapping;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--seed", seed, "master seed (overrides config)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--policy", policies, "policy selection, repeatable");
    cmd->add_option("--n-seeds", n_seeds, "number of evaluation seeds");
    cmd->add_option("--parallelism", parallelism, "worker threads");
    cmd->add_option("--mask-mode", mask_mode, "exclude | zero");
    cmd->add_option("--workload-file", workload_file,
                    "workload CSV to run instead of generating");
    cmd->add_option("--target-load", target_load,
                    "analytic load fraction used to derive mean_req_num");
  };

  auto* generate = app.add_subcommand("generate", "write a synthetic workload CSV");
  add_common(generate);
  auto* ingest = app.add_subcommand("ingest", "convert an external trace CSV");
  add_common(ingest);
  ingest->add_option("--input", ingest_input, "trace CSV path");
  ingest->add_option("--mapping", ingest_mapping, "column mapping JSON");
  auto* train = app.add_subcommand("train", "evolve routing policies");
  add_common(train);
  auto* evaluate = app.add_subcommand("evaluate", "score one policy over seeds");
  add_common(evaluate);
  auto* sweep = app.add_subcommand("sweep", "evaluate policies across an axis");
  add_common(sweep);
  sweep->add_option("--axis", axis, "load | servers | sigma");
  sweep->add_option("--values", values_csv, "comma-separated axis values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    if (!policies.empty()) cfg.policies = policies;
    if (n_seeds) cfg.n_seeds = *n_seeds;
    if (parallelism) cfg.parallelism = *parallelism;
    if (mask_mode) cfg.mask_mode = *mask_mode;
    if (workload_file) cfg.workload_file = *workload_file;
    if (target_load) cfg.target_load = *target_load;
    if (!axis.empty()) cfg.sweep_axis = axis;
    if (!values_csv.empty()) {
      cfg.sweep_values.clear();
      std::stringstream ss(values_csv);
      std::string token;
      while (std::getline(ss, token, ',')) {
        try {
          cfg.sweep_values.push_back(std::stod(token));
        } catch (const std::exception&) {
          throw ConfigError("sweep: bad value \"" + token + "\"");
        }
      }
    }

    if (generate->parsed()) return cmd_generate(std::move(cfg));
    if (ingest->parsed()) return cmd_ingest(std::move(cfg), ingest_input, ingest_mapping);
    if (train->parsed()) return cmd_train(std::move(cfg));
    if (evaluate->parsed()) return cmd_evaluate(std::move(cfg));
    if (sweep->parsed()) return cmd_sweep(std::move(cfg));
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
