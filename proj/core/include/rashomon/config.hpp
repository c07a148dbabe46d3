#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rashomon/models.hpp"
#include "rashomon/similarity.hpp"

namespace rashomon {

inline constexpr int kSchemaVersion = 1;

struct ShapOptions {
  std::size_t background = 16;             // B rows drawn from the training pool
  bool background_mean = false;            // single per-feature-mean row instead
  std::size_t nsamples = 2048;             // sampled-mode coalition budget
  std::size_t enumeration_threshold = 12;  // K <= this: enumerate all coalitions
  std::size_t max_instances = 0;           // explained test rows; 0 = all
};

struct SimilarityOptions {
  std::vector<std::size_t> top_j = {1, 3, 5};
  MasMode mas_mode = MasMode::group_mean;
  bool fold_paired_inter = false;  // pair inter-model similarity per fold
};

struct AuditConfig {
  std::string dataset;       // CSV path
  std::string label = "label";
  std::string test_dataset;  // optional pre-split test CSV; else test_fraction
  double test_fraction = 0.2;
  bool impute = false;
  bool one_hot = false;
  std::uint64_t seed = 1;
  std::size_t folds = 10;
  std::size_t top_k = 3;
  double epsilon = 0.05;
  std::vector<std::size_t> grid;      // empty: powers-of-two grid from the pool
  bool nested = true;                 // nested subsamples across sizes
  std::vector<Family> families;       // empty: every family
  std::size_t budget = 20;
  bool bagging = true;                // explain the top-3 bagging ensemble too
  ShapOptions shap;
  SimilarityOptions similarity;
  double alpha = 0.05;
};

// Parse from a JSON object (text form). Unknown keys and 'wrong-typed values
// are ConfigError with the offending key named.
AuditConfig parse_config(const std::string& json_text);
AuditConfig load_config_file(const std::string& path);

// Canonical serialization: sorted keys, families spelled out, no environment
// details (worker counts, paths outside the config), so the hash is portable.
std::string config_to_json(const AuditConfig& c);

void validate_config(const AuditConfig& c);

// 16-hex FNV-1a of the canonical serialization.
std::string config_hash(const AuditConfig& c);

const char* mas_mode_name(MasMode m);
MasMode mas_mode_from_name(const std::string& name);

}  // namespace rashomon
