#include "rashomon/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rashomon/errors.hpp"
#include "rashomon/rng.hpp"

namespace rashomon {

using nlohmann::json;

const char* mas_mode_name(MasMode m) {
  return m == MasMode::group_mean ? "group_mean" : "scalar";
}

MasMode mas_mode_from_name(const std::string& name) {
  if (name == "group_mean") return MasMode::group_mean;
  if (name == "scalar") return MasMode::scalar;
  throw Error(ErrorCode::ConfigError, "mas_mode must be 'group_mean' or 'scalar', got '" + name + "'");
}

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::ConfigError, "config key '" + key + "': " + why);
}

template <typename T>
T take_number(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) bad_key(key, "expected a number");
    return v.get<double>();
  } else {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      bad_key(key, "expected a non-negative integer");
    }
    return v.get<T>();
  }
}

std::string take_string(const json& j, const std::string& key, std::string fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) bad_key(key, "expected a string");
  return j.at(key).get<std::string>();
}

bool take_bool(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) bad_key(key, "expected a boolean");
  return j.at(key).get<bool>();
}

void check_keys(const json& j, const std::string& scope,
                const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw Error(ErrorCode::ConfigError,
                  "unknown config key '" + (scope.empty() ? it.key() : scope + "." + it.key()) + "'");
    }
  }
}

}  // namespace

AuditConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config root must be a JSON object");

  check_keys(j, "", {"dataset", "label", "test_dataset", "test_fraction", "impute",
                     "one_hot", "seed", "folds", "top_k", "epsilon", "grid", "nested",
                     "families", "budget", "bagging", "shap", "similarity", "alpha",
                     "schema_version"});
  if (j.contains("schema_version")) {
    const auto v = take_number<long long>(j, "schema_version", kSchemaVersion);
    if (v != kSchemaVersion) {
      throw Error(ErrorCode::SchemaMismatch,
                  "config schema_version " + std::to_string(v) + " unsupported (expected " +
                      std::to_string(kSchemaVersion) + ")");
    }
  }

  AuditConfig c;
  c.dataset = take_string(j, "dataset", c.dataset);
  c.label = take_string(j, "label", c.label);
  c.test_dataset = take_string(j, "test_dataset", c.test_dataset);
  c.test_fraction = take_number<double>(j, "test_fraction", c.test_fraction);
  c.impute = take_bool(j, "impute", c.impute);
  c.one_hot = take_bool(j, "one_hot", c.one_hot);
  c.seed = take_number<std::uint64_t>(j, "seed", c.seed);
  c.folds = take_number<std::size_t>(j, "folds", c.folds);
  c.top_k = take_number<std::size_t>(j, "top_k", c.top_k);
  c.epsilon = take_number<double>(j, "epsilon", c.epsilon);
  c.nested = take_bool(j, "nested", c.nested);
  c.budget = take_number<std::size_t>(j, "budget", c.budget);
  c.bagging = take_bool(j, "bagging", c.bagging);
  c.alpha = take_number<double>(j, "alpha", c.alpha);

  if (j.contains("grid")) {
    if (!j.at("grid").is_array()) bad_key("grid", "expected an array of sizes");
    for (const auto& v : j.at("grid")) {
      if (!v.is_number_integer() || v.get<long long>() < 2) {
        bad_key("grid", "sizes must be integers >= 2");
      }
      c.grid.push_back(v.get<std::size_t>());
    }
  }
  if (j.contains("families")) {
    if (!j.at("families").is_array()) bad_key("families", "expected an array of names");
    for (const auto& v : j.at("families")) {
      if (!v.is_string()) bad_key("families", "names must be strings");
      try {
        c.families.push_back(family_from_name(v.get<std::string>()));
      } catch (const Error& e) {
        bad_key("families", e.what());
      }
    }
  }
  if (j.contains("shap")) {
    const json& s = j.at("shap");
    if (!s.is_object()) bad_key("shap", "expected an object");
    check_keys(s, "shap", {"background", "background_mean", "nsamples",
                           "enumeration_threshold", "max_instances"});
    c.shap.background = take_number<std::size_t>(s, "background", c.shap.background);
    c.shap.background_mean = take_bool(s, "background_mean", c.shap.background_mean);
    c.shap.nsamples = take_number<std::size_t>(s, "nsamples", c.shap.nsamples);
    c.shap.enumeration_threshold =
        take_number<std::size_t>(s, "enumeration_threshold", c.shap.enumeration_threshold);
    c.shap.max_instances = take_number<std::size_t>(s, "max_instances", c.shap.max_instances);
  }
  if (j.contains("similarity")) {
    const json& s = j.at("similarity");
    if (!s.is_object()) bad_key("similarity", "expected an object");
    check_keys(s, "similarity", {"top_j", "mas_mode", "fold_paired_inter"});
    if (s.contains("top_j")) {
      if (!s.at("top_j").is_array()) bad_key("similarity.top_j", "expected an array");
      c.similarity.top_j.clear();
      for (const auto& v : s.at("top_j")) {
        if (!v.is_number_integer() || v.get<long long>() < 1) {
          bad_key("similarity.top_j", "entries must be integers >= 1");
        }
        c.similarity.top_j.push_back(v.get<std::size_t>());
      }
    }
    c.similarity.mas_mode =
        mas_mode_from_name(take_string(s, "mas_mode", mas_mode_name(c.similarity.mas_mode)));
    c.similarity.fold_paired_inter =
        take_bool(s, "fold_paired_inter", c.similarity.fold_paired_inter);
  }
  return c;
}

AuditConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void validate_config(const AuditConfig& c) {
  if (c.dataset.empty()) throw Error(ErrorCode::ConfigError, "dataset path is required");
  if (c.test_dataset.empty() &&
      !(c.test_fraction > 0.0 && c.test_fraction < 1.0)) {
    throw Error(ErrorCode::ConfigError, "test_fraction must be in (0,1)");
  }
  if (c.folds < 2) throw Error(ErrorCode::ConfigError, "folds must be >= 2");
  if (c.top_k != 3) {
    throw Error(ErrorCode::ConfigError, "top_k must be 3 (top-3 selection is the contract)");
  }
  if (!(c.epsilon >= 0.0) || !std::isfinite(c.epsilon)) {
    throw Error(ErrorCode::ConfigError, "epsilon must be >= 0");
  }
  if (c.budget < 1) throw Error(ErrorCode::ConfigError, "budget must be >= 1");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
    throw Error(ErrorCode::ConfigError, "alpha must be in (0,1)");
  }
  if (!c.grid.empty()) {
    for (std::size_t i = 1; i < c.grid.size(); ++i) {
      if (c.grid[i] <= c.grid[i - 1]) {
        throw Error(ErrorCode::ConfigError, "grid sizes must be strictly increasing");
      }
    }
    if (c.grid.front() < 4) throw Error(ErrorCode::ConfigError, "grid sizes must be >= 4");
  }
  {
    std::set<Family> seen;
    for (Family f : c.families) {
      if (!seen.insert(f).second) {
        throw Error(ErrorCode::ConfigError,
                    std::string("family '") + family_name(f) + "' listed twice");
      }
    }
    if (!c.families.empty() && c.families.size() < 3) {
      throw Error(ErrorCode::ConfigError, "need at least 3 families to select a top-3");
    }
  }
  if (c.shap.background < 1) {
    throw Error(ErrorCode::ConfigError, "shap.background must be >= 1");
  }
  if (c.shap.enumeration_threshold < 1 || c.shap.enumeration_threshold > 20) {
    throw Error(ErrorCode::ConfigError, "shap.enumeration_threshold must be in [1,20]");
  }
  if (c.shap.nsamples < 4) {
    throw Error(ErrorCode::ConfigError, "shap.nsamples must be >= 4");
  }
  if (c.similarity.top_j.empty()) {
    throw Error(ErrorCode::ConfigError, "similarity.top_j must not be empty");
  }
  for (std::size_t i = 1; i < c.similarity.top_j.size(); ++i) {
    if (c.similarity.top_j[i] <= c.similarity.top_j[i - 1]) {
      throw Error(ErrorCode::ConfigError, "similarity.top_j must be strictly increasing");
    }
  }
}

std::string config_to_json(const AuditConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["dataset"] = c.dataset;
  j["label"] = c.label;
  j["test_dataset"] = c.test_dataset;
  j["test_fraction"] = c.test_fraction;
  j["impute"] = c.impute;
  j["one_hot"] = c.one_hot;
  j["seed"] = c.seed;
  j["folds"] = c.folds;
  j["top_k"] = c.top_k;
  j["epsilon"] = c.epsilon;
  j["grid"] = c.grid;
  j["nested"] = c.nested;
  json fams = json::array();
  for (Family f : c.families) fams.push_back(family_name(f));
  j["families"] = fams;
  j["budget"] = c.budget;
  j["bagging"] = c.bagging;
  j["shap"] = {{"background", c.shap.background},
               {"background_mean", c.shap.background_mean},
               {"nsamples", c.shap.nsamples},
               {"enumeration_threshold", c.shap.enumeration_threshold},
               {"max_instances", c.shap.max_instances}};
  j["similarity"] = {{"top_j", c.similarity.top_j},
                     {"mas_mode", mas_mode_name(c.similarity.mas_mode)},
                     {"fold_paired_inter", c.similarity.fold_paired_inter}};
  j["alpha"] = c.alpha;
  return j.dump(2) + "\n";
}

std::string config_hash(const AuditConfig& c) {
  const std::uint64_t h = fnv1a(config_to_json(c));
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace rashomon
