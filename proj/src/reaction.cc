#include "odmts/reaction.h"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace odmts {

ReactionTimeModel ReactionTimeModel::constant(double seconds) {
  ReactionTimeModel m;
  m.family = Family::Constant;
  m.constant_s = seconds;
  m.validate();
  return m;
}

ReactionTimeModel ReactionTimeModel::lognormal(double mu, double sigma) {
  ReactionTimeModel m;
  m.family = Family::LogNormal;
  m.mu = mu;
  m.sigma = sigma;
  m.validate();
  return m;
}

ReactionTimeModel ReactionTimeModel::empirical(std::vector<double> samples) {
  ReactionTimeModel m;
  m.family = Family::Empirical;
  m.samples = std::move(samples);
  m.validate();
  return m;
}

ReactionTimeModel ReactionTimeModel::lognormal_from_median_mean(double median, double mean) {
  if (!(median > 0.0) || !(mean >= median)) {
    throw Error("ModelInvalid", "log-normal fit needs 0 < median <= mean");
  }
  return lognormal(std::log(median), std::sqrt(2.0 * std::log(mean / median)));
}

void ReactionTimeModel::validate() const {
  switch (family) {
    case Family::Constant:
      if (constant_s < 0.0) throw Error("ModelInvalid", "constant reaction time must be nonnegative");
      break;
    case Family::LogNormal:
      if (!(sigma >= 0.0) || !std::isfinite(mu)) throw Error("ModelInvalid", "log-normal needs finite mu, sigma >= 0");
      break;
    case Family::Empirical:
      if (samples.empty()) throw Error("EmptyEmpiricalFile", "empirical reaction model has no samples");
      for (double s : samples) {
        if (s < 0.0) throw Error("ModelInvalid", "empirical reaction samples must be nonnegative");
      }
      break;
  }
}

ReactionTimeModel ReactionTimeModel::from_json(nlohmann::json const& j, std::string const& base_dir) {
  auto const family = j.value("family", std::string{"Constant"});
  if (family == "Constant") {
    return constant(j.value("seconds", 0.0));
  }
  if (family == "LogNormal") {
    if (j.contains("median") && j.contains("mean")) {
      return lognormal_from_median_mean(j["median"].get<double>(), j["mean"].get<double>());
    }
    return lognormal(j.at("mu").get<double>(), j.at("sigma").get<double>());
  }
  if (family == "Empirical") {
    std::vector<double> samples;
    if (j.contains("samples")) {
      samples = j["samples"].get<std::vector<double>>();
    } else {
      auto path = std::filesystem::path{j.at("file").get<std::string>()};
      if (path.is_relative()) {
        path = std::filesystem::path{base_dir} / path;
      }
      std::ifstream in{path};
      if (!in) {
        throw IoError("cannot open reaction sample file " + path.string());
      }
      double v = 0.0;
      while (in >> v) {
        samples.push_back(v);
      }
    }
    return empirical(std::move(samples));
  }
  throw Error("ModelInvalid", "unknown reaction family " + family);
}

nlohmann::json ReactionTimeModel::to_json() const {
  switch (family) {
    case Family::Constant: return {{"family", "Constant"}, {"seconds", constant_s}};
    case Family::LogNormal: return {{"family", "LogNormal"}, {"mu", mu}, {"sigma", sigma}};
    case Family::Empirical: return {{"family", "Empirical"}, {"samples", samples}};
  }
  return {};
}

double sample_reaction(ReactionTimeModel const& model, Rng& rng) {
  switch (model.family) {
    case ReactionTimeModel::Family::Constant:
      return model.constant_s;
    case ReactionTimeModel::Family::LogNormal: {
      std::lognormal_distribution<double> d{model.mu, model.sigma};
      return d(rng);
    }
    case ReactionTimeModel::Family::Empirical: {
      if (model.samples.empty()) {
        throw Error("EmptyEmpiricalFile", "empirical reaction model has no samples");
      }
      std::uniform_int_distribution<std::size_t> pick{0, model.samples.size() - 1};
      return model.samples[pick(rng)];
    }
  }
  return 0.0;
}

Seconds sample_reaction_seconds(ReactionTimeModel const& model, Rng& rng) {
  return static_cast<Seconds>(std::llround(sample_reaction(model, rng)));
}

}  // namespace odmts
