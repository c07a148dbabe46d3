#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rashomon/shap.hpp"

namespace rashomon {

struct FeatureRanking {
  std::vector<std::size_t> ordered_indices;
  std::size_t j = 0;
};

// Top-j features by descending importance, ties broken by ascending index.
FeatureRanking rank_top_j(const GlobalImportance& g, std::size_t j);

double top_j_similarity(const GlobalImportance& a, const GlobalImportance& b,
                        std::size_t j);

double top_j_pairwise(std::span<const GlobalImportance> models, std::size_t j);

// Per-instance variant: mean over instances of the top-j overlap of the two
// attribution rows.
double top_j_similarity_instances(const Attribution& a, const Attribution& b,
                                  std::size_t j);

struct WeightedImportance {
  std::vector<double> weights;
};

enum class MasMode {
  group_mean,  // mas_k = mean over the compared group at feature k
  scalar,      // mas = per-model scalar mean over features
};

std::vector<WeightedImportance> weight_vectors(std::span<const GlobalImportance> models,
                                               MasMode mode = MasMode::group_mean);

// Cosine of two non-negative weighted vectors; 0 when either norm is 0, with
// the degeneracy flag set.
double wcossim(const WeightedImportance& a, const WeightedImportance& b,
               bool* degenerate = nullptr);

double wcossim_group(std::span<const GlobalImportance> models,
                     MasMode mode = MasMode::group_mean);

struct ConsensusVector {
  std::vector<double> per_feature;
  std::size_t model_count = 0;
  std::size_t sample_size = 0;
};

ConsensusVector consensus(std::span<const GlobalImportance> models);

}  // namespace rashomon
