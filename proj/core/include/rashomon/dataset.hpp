#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rashomon/matrix.hpp"

namespace rashomon {

struct Dataset {
  Matrix features;  // N x K
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::string name;

  std::size_t n() const { return features.rows(); }
  std::size_t k() const { return features.cols(); }
};

// Throws if the Dataset invariants do not hold.
void validate_dataset(const Dataset& d);

struct IngestOptions {
  char delimiter = ',';
  // Explicit label mapping, e.g. {"yes",1},{"no",0}. When empty the label
  // column must already be numeric 0/1.
  std::map<std::string, int> label_map;
  bool impute_nonfinite = false;  // mean-impute instead of rejecting
  bool one_hot = false;           // expand categorical columns to indicators
};

Dataset load_dataset(const std::string& path, const std::string& label_column,
                     const IngestOptions& options = {});

void write_dataset_csv(const Dataset& d, const std::string& path,
                       const std::string& label_column = "label");

struct SplitPlan {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
};

SplitPlan make_split(const Dataset& d, double test_fraction, std::uint64_t seed);

// For an explicit train/test file pair that was concatenated row-wise:
// rows [0, n_train) are train, the rest test.
SplitPlan verbatim_split(std::size_t n_train, std::size_t n_test);

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // fold id per position
};

// `labels` are the labels of the rows being folded, in position order.
FoldPlan make_folds(std::size_t n, const std::vector<int>& labels, std::size_t k,
                    std::uint64_t seed);

struct SampleGrid {
  std::vector<std::size_t> sizes;
};

SampleGrid make_grid(std::size_t train_size);

// Stratified subset of `pool` of size s, returned in pool order.
// Nested mode: the subset at s is contained in the subset at any larger s.
std::vector<std::size_t> subsample(const Dataset& d, std::span<const std::size_t> pool,
                                   std::size_t s, std::uint64_t seed, bool nested = true);

// Stable digest of the dataset contents, used to key model caches.
std::uint64_t dataset_digest(const Dataset& d);

}  // namespace rashomon
