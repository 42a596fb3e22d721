#pragma once

#include <span>

#include "lbsim/episode.hpp"
#include "lbsim/resource.hpp"

namespace lbsim {

// Bi-objective episode fitness, both minimized. f_balance is the time- and
// resource-averaged population standard deviation of utilization (in the
// units of the snapshots it was computed from, normalized here); f_idle is
// the time- and server-averaged maximal remaining duration, in minutes.
struct Fitness {
  double f_balance = 0.0;
  double f_idle = 0.0;

  bool operator==(const Fitness&) const = default;
};

// Mean over resources of the per-resource population std dev across servers.
// snapshot is N x 4, [i*4 + r]. Scale-equivariant, so it accepts normalized
// or raw-unit snapshots alike.
double balance_step(std::span<const double> snapshot, int num_servers);

// Mean over servers of the maximal remaining duration; unit-preserving.
double idle_step(std::span<const double> remaining);

// Averages the per-step functions over every recorded snapshot. f_idle is
// converted to minutes using the episode's time_step.
Fitness episode_fitness(const EpisodeResult& result);

// f_balance rescaled to raw capacity units (per-resource std devs are scaled
// by the matching capacity before averaging), for unit-comparable reports.
double episode_balance_units(const EpisodeResult& result, const ResourceVector& capacity);

// Min-max bounds per objective for diagnostic scalarization.
struct FitnessNormalizer {
  double balance_min = 0.0;
  double balance_max = 0.0;
  double idle_min = 0.0;
  double idle_max = 0.0;

  static FitnessNormalizer from(std::span<const Fitness> observations);
};

// Weighted sum of min-max normalized objectives. Diagnostics only (training
// curves); never used inside selection. A degenerate objective range
// contributes zero.
double scalarize(const Fitness& fitness, double w1, double w2, const FitnessNormalizer& norm);

}  // namespace lbsim
