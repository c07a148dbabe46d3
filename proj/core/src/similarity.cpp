#include "rashomon/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rashomon/errors.hpp"

namespace rashomon {

namespace {

std::vector<std::size_t> top_j_of(std::span<const double> values, std::size_t j) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double va = std::abs(values[a]), vb = std::abs(values[b]);
    if (va != vb) return va > vb;
    return a < b;
  });
  order.resize(j);
  return order;
}

double overlap(std::vector<std::size_t> a, std::vector<std::size_t> b, std::size_t j) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::size_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(j);
}

void check_j(std::size_t j, std::size_t k) {
  if (j < 1 || j > k) throw Error(ErrorCode::BadJ, "need 1 <= j <= K");
}

void check_group(std::span<const GlobalImportance> models) {
  if (models.size() < 2) throw Error(ErrorCode::TooFewModels, "need >= 2 models");
  for (const auto& m : models) {
    if (m.per_feature.size() != models.front().per_feature.size()) {
      throw Error(ErrorCode::DimensionMismatch, "feature counts disagree");
    }
  }
}

}  // namespace

FeatureRanking rank_top_j(const GlobalImportance& g, std::size_t j) {
  check_j(j, g.per_feature.size());
  FeatureRanking r;
  r.j = j;
  r.ordered_indices = top_j_of(g.per_feature, j);
  return r;
}

double top_j_similarity(const GlobalImportance& a, const GlobalImportance& b,
                        std::size_t j) {
  if (a.per_feature.size() != b.per_feature.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature counts disagree");
  }
  check_j(j, a.per_feature.size());
  return overlap(top_j_of(a.per_feature, j), top_j_of(b.per_feature, j), j);
}

double top_j_pairwise(std::span<const GlobalImportance> models, std::size_t j) {
  check_group(models);
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < models.size(); ++a) {
    for (std::size_t b = a + 1; b < models.size(); ++b) {
      total += top_j_similarity(models[a], models[b], j);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

double top_j_similarity_instances(const Attribution& a, const Attribution& b,
                                  std::size_t j) {
  if (a.values.cols() != b.values.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "feature counts disagree");
  }
  if (a.values.rows() != b.values.rows()) {
    throw Error(ErrorCode::SizeMismatch, "instance counts disagree");
  }
  check_j(j, a.values.cols());
  if (a.values.rows() == 0) throw Error(ErrorCode::SizeMismatch, "no instances");
  double total = 0.0;
  for (std::size_t i = 0; i < a.values.rows(); ++i) {
    total += overlap(top_j_of(a.values.row(i), j), top_j_of(b.values.row(i), j), j);
  }
  return total / static_cast<double>(a.values.rows());
}

std::vector<WeightedImportance> weight_vectors(std::span<const GlobalImportance> models,
                                               MasMode mode) {
  if (models.empty()) throw Error(ErrorCode::TooFewModels, "empty group");
  std::size_t k = models.front().per_feature.size();
  for (const auto& m : models) {
    if (m.per_feature.size() != k) {
      throw Error(ErrorCode::DimensionMismatch, "feature counts disagree");
    }
  }

  std::vector<WeightedImportance> out(models.size());
  if (mode == MasMode::group_mean) {
    std::vector<double> mas(k, 0.0);
    for (const auto& m : models) {
      for (std::size_t f = 0; f < k; ++f) mas[f] += std::abs(m.per_feature[f]);
    }
    for (auto& v : mas) v /= static_cast<double>(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) {
      out[i].weights.resize(k);
      for (std::size_t f = 0; f < k; ++f) {
        out[i].weights[f] = std::abs(models[i].per_feature[f]) * mas[f];
      }
    }
  } else {
    // literal formula: mas collapses to a per-model scalar
    for (std::size_t i = 0; i < models.size(); ++i) {
      double mas = 0.0;
      for (std::size_t f = 0; f < k; ++f) mas += std::abs(models[i].per_feature[f]);
      mas /= static_cast<double>(k);
      out[i].weights.resize(k);
      for (std::size_t f = 0; f < k; ++f) {
        out[i].weights[f] = std::abs(models[i].per_feature[f]) * mas;
      }
    }
  }
  return out;
}

double wcossim(const WeightedImportance& a, const WeightedImportance& b,
               bool* degenerate) {
  if (a.weights.size() != b.weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "lengths disagree");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t f = 0; f < a.weights.size(); ++f) {
    dot += a.weights[f] * b.weights[f];
    na += a.weights[f] * a.weights[f];
    nb += b.weights[f] * b.weights[f];
  }
  if (degenerate) *degenerate = false;
  if (na <= 0.0 || nb <= 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double wcossim_group(std::span<const GlobalImportance> models, MasMode mode) {
  check_group(models);
  std::vector<WeightedImportance> weighted = weight_vectors(models, mode);
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < weighted.size(); ++a) {
    for (std::size_t b = a + 1; b < weighted.size(); ++b) {
      total += wcossim(weighted[a], weighted[b]);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

ConsensusVector consensus(std::span<const GlobalImportance> models) {
  if (models.empty()) throw Error(ErrorCode::TooFewModels, "empty group");
  std::size_t k = models.front().per_feature.size();
  for (const auto& m : models) {
    if (m.per_feature.size() != k) {
      throw Error(ErrorCode::DimensionMismatch, "feature counts disagree");
    }
    if (m.sample_size != models.front().sample_size) {
      throw Error(ErrorCode::SizeMismatch, "models explained at different sizes");
    }
  }
  ConsensusVector c;
  c.model_count = models.size();
  c.sample_size = models.front().sample_size;
  c.per_feature.assign(k, 0.0);
  for (const auto& m : models) {
    for (std::size_t f = 0; f < k; ++f) c.per_feature[f] += std::abs(m.per_feature[f]);
  }
  for (auto& v : c.per_feature) v /= static_cast<double>(models.size());
  return c;
}

}  // namespace rashomon
