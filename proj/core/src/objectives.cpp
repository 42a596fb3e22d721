#include "lbsim/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace lbsim {

double balance_step(std::span<const double> snapshot, int num_servers) {
  if (num_servers <= 0) throw std::invalid_argument("balance_step: no servers");
  if (snapshot.size() != static_cast<size_t>(num_servers) * ResourceVector::kDims) {
    throw std::invalid_argument("balance_step: snapshot size mismatch");
  }

  double total = 0.0;
  for (int r = 0; r < ResourceVector::kDims; ++r) {
    double mean = 0.0;
    for (int i = 0; i < num_servers; ++i) {
      mean += snapshot[static_cast<size_t>(i * ResourceVector::kDims + r)];
    }
    mean /= num_servers;
    double var = 0.0;
    for (int i = 0; i < num_servers; ++i) {
      const double d = snapshot[static_cast<size_t>(i * ResourceVector::kDims + r)] - mean;
      var += d * d;
    }
    total += std::sqrt(var / num_servers);  // population std dev
  }
  return total / ResourceVector::kDims;
}

double idle_step(std::span<const double> remaining) {
  if (remaining.empty()) throw std::invalid_argument("idle_step: no servers");
  double sum = 0.0;
  for (const double d : remaining) sum += d;
  return sum / static_cast<double>(remaining.size());
}

Fitness episode_fitness(const EpisodeResult& result) {
  if (result.num_timesteps < 1) throw std::invalid_argument("episode_fitness: empty episode");

  const int n = result.num_servers;
  const double minutes_per_step = static_cast<double>(result.time_step) / 60.0;

  std::vector<double> remaining(static_cast<size_t>(n));
  double balance_sum = 0.0;
  double idle_sum = 0.0;
  for (int64_t t = 0; t < result.num_timesteps; ++t) {
    const auto snapshot = std::span<const double>(result.utilization)
                              .subspan(static_cast<size_t>(t) * static_cast<size_t>(n) *
                                           ResourceVector::kDims,
                                       static_cast<size_t>(n) * ResourceVector::kDims);
    balance_sum += balance_step(snapshot, n);
    for (int i = 0; i < n; ++i) {
      remaining[static_cast<size_t>(i)] =
          static_cast<double>(result.remaining_at(t, i)) * minutes_per_step;
    }
    idle_sum += idle_step(remaining);
  }

  // Averaged over exactly the recorded snapshots.
  Fitness f;
  f.f_balance = balance_sum / static_cast<double>(result.num_timesteps);
  f.f_idle = idle_sum / static_cast<double>(result.num_timesteps);
  return f;
}

double episode_balance_units(const EpisodeResult& result, const ResourceVector& capacity) {
  if (result.num_timesteps < 1) throw std::invalid_argument("episode_balance_units: empty episode");

  const int n = result.num_servers;
  std::vector<double> scaled(static_cast<size_t>(n) * ResourceVector::kDims);
  double sum = 0.0;
  for (int64_t t = 0; t < result.num_timesteps; ++t) {
    for (int i = 0; i < n; ++i) {
      for (int r = 0; r < ResourceVector::kDims; ++r) {
        scaled[static_cast<size_t>(i * ResourceVector::kDims + r)] =
            result.utilization_at(t, i, r) * static_cast<double>(capacity[r]);
      }
    }
    sum += balance_step(scaled, n);
  }
  return sum / static_cast<double>(result.num_timesteps);
}

FitnessNormalizer FitnessNormalizer::from(std::span<const Fitness> observations) {
  FitnessNormalizer norm;
  bool first = true;
  for (const auto& f : observations) {
    if (first) {
      norm.balance_min = norm.balance_max = f.f_balance;
      norm.idle_min = norm.idle_max = f.f_idle;
      first = false;
      continue;
    }
    norm.balance_min = std::min(norm.balance_min, f.f_balance);
    norm.balance_max = std::max(norm.balance_max, f.f_balance);
    norm.idle_min = std::min(norm.idle_min, f.f_idle);
    norm.idle_max = std::max(norm.idle_max, f.f_idle);
  }
  return norm;
}

double scalarize(const Fitness& fitness, double w1, double w2, const FitnessNormalizer& norm) {
  if (w1 < 0 || w2 < 0) throw std::invalid_argument("scalarize: weights must be >= 0");
  auto normalized = [](double v, double lo, double hi) {
    if (hi <= lo) return 0.0;  // degenerate range contributes nothing
    return (v - lo) / (hi - lo);
  };
  return w1 * normalized(fitness.f_balance, norm.balance_min, norm.balance_max) +
         w2 * normalized(fitness.f_idle, norm.idle_min, norm.idle_max);
}

}  // namespace lbsim
