#pragma once

#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "odmts/core.h"

namespace odmts {

using Rng = std::mt19937_64;

// Driver reaction time between an instruction and the driver's response.
// Truncation at the removal threshold belongs to the lifecycle, not here.
struct ReactionTimeModel {
  enum class Family { LogNormal, Constant, Empirical };

  Family family = Family::Constant;
  double mu = 0.0;     // LogNormal: log-scale location
  double sigma = 0.0;  // LogNormal: log-scale spread
  double constant_s = 0.0;
  std::vector<double> samples;  // Empirical

  static ReactionTimeModel constant(double seconds);
  static ReactionTimeModel lognormal(double mu, double sigma);
  static ReactionTimeModel empirical(std::vector<double> samples);

  // Log-normal matched to a median and a mean: exp(mu) = median and
  // exp(mu + sigma^2 / 2) = mean.
  static ReactionTimeModel lognormal_from_median_mean(double median, double mean);

  // {"family":"LogNormal","mu":..,"sigma":..} | {"family":"Constant","seconds":..}
  // | {"family":"Empirical","samples":[..]} or {"family":"Empirical","file":path}
  // (one value per line, relative paths resolved against base_dir).
  static ReactionTimeModel from_json(nlohmann::json const& j, std::string const& base_dir = ".");
  nlohmann::json to_json() const;

  void validate() const;
};

// One nonnegative draw in seconds.
double sample_reaction(ReactionTimeModel const& model, Rng& rng);

// Draw rounded to whole simulation seconds.
Seconds sample_reaction_seconds(ReactionTimeModel const& model, Rng& rng);

}  // namespace odmts
