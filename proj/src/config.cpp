#include "qrc/config.hpp"

#include <fstream>

namespace qrc {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["experiment"] = to_string(cfg.experiment);
  {
    std::vector<std::string> models;
    for (Model m : cfg.models) models.push_back(to_string(m));
    j["models"] = models;
  }
  j["dims"] = cfg.dims;
  j["train_sizes"] = cfg.train_sizes;
  j["test_size"] = cfg.test_size;
  j["n_reservoirs"] = cfg.n_reservoirs;
  j["seed"] = cfg.seed;
  j["noise_grid"] = cfg.noise_grid;
  j["classical_form"] = to_string(cfg.classical_form);
  j["radius_form"] = to_string(cfg.radius_form);
  j["gamma_selection"] = to_string(cfg.gamma_selection);
  j["rel_std"] = cfg.rel_std;
  j["threads"] = cfg.threads;
  j["fixed_dt"] = cfg.fixed_dt;
  j["t_signal"] = cfg.t_signal;
  j["n_samples"] = cfg.n_samples;
  j["out_dir"] = cfg.out_dir;
  return j;
}

namespace {

template <class T>
T expect(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const json& value) {
  if (key == "experiment") {
    // handled by the caller
  } else if (key == "models") {
    cfg.models.clear();
    for (const auto& item : expect<std::vector<std::string>>(value, "models"))
      cfg.models.push_back(model_from_string(item));
  } else if (key == "dims") {
    cfg.dims = expect<std::vector<int>>(value, "dims");
  } else if (key == "train_sizes") {
    cfg.train_sizes = expect<std::vector<int>>(value, "train_sizes");
  } else if (key == "test_size") {
    cfg.test_size = expect<int>(value, "test_size");
  } else if (key == "n_reservoirs") {
    cfg.n_reservoirs = expect<int>(value, "n_reservoirs");
  } else if (key == "seed") {
    cfg.seed = expect<std::uint64_t>(value, "seed");
  } else if (key == "noise_grid") {
    cfg.noise_grid = expect<std::vector<double>>(value, "noise_grid");
  } else if (key == "classical_form") {
    cfg.classical_form = classical_form_from_string(expect<std::string>(value, "classical_form"));
  } else if (key == "radius_form") {
    cfg.radius_form = radius_form_from_string(expect<std::string>(value, "radius_form"));
  } else if (key == "gamma_selection") {
    cfg.gamma_selection = gamma_selection_from_string(expect<std::string>(value, "gamma_selection"));
  } else if (key == "rel_std") {
    cfg.rel_std = expect<double>(value, "rel_std");
  } else if (key == "threads") {
    cfg.threads = expect<int>(value, "threads");
  } else if (key == "fixed_dt") {
    cfg.fixed_dt = expect<double>(value, "fixed_dt");
  } else if (key == "t_signal") {
    cfg.t_signal = expect<double>(value, "t_signal");
  } else if (key == "n_samples") {
    cfg.n_samples = expect<int>(value, "n_samples");
  } else if (key == "out_dir") {
    cfg.out_dir = expect<std::string>(value, "out_dir");
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  const json* body = &doc;
  if (doc.is_object() && doc.contains("config")) body = &doc.at("config");  // run manifest
  if (!body->is_object()) throw ConfigError("config document must be a JSON object");
  if (!body->contains("experiment")) throw ConfigError("config is missing the 'experiment' key");

  ExperimentConfig cfg =
      experiment_defaults(experiment_from_string(expect<std::string>(body->at("experiment"), "experiment")));
  for (const auto& [key, value] : body->items()) apply_key(cfg, key, value);
  cfg.validate();
  return cfg;
}

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace qrc
