#pragma once

#include <memory>
#include <vector>

#include "rashomon/models.hpp"
#include "rashomon/tree.hpp"

namespace rashomon::detail {

struct LinearScoreModel final : FittedModel {
  std::vector<double> w;
  double b = 0.0;

  void predict_raw(const Matrix& X, std::span<double> out) const override;
  void save(ModelState& state) const override;
  static std::shared_ptr<const FittedModel> from_state(const ModelState& state);
};

struct NbModel final : FittedModel {
  std::vector<double> mean0, var0, mean1, var1;
  double log_prior0 = 0.0, log_prior1 = 0.0;

  void predict_raw(const Matrix& X, std::span<double> out) const override;
  void save(ModelState& state) const override;
  static std::shared_ptr<const FittedModel> from_state(const ModelState& state);
};

struct QdaModel final : FittedModel {
  std::size_t k = 0;
  std::vector<double> mean0, mean1;
  std::vector<double> icov0, icov1;  // k*k row-major inverses
  double logdet0 = 0.0, logdet1 = 0.0;
  double log_prior0 = 0.0, log_prior1 = 0.0;

  void predict_raw(const Matrix& X, std::span<double> out) const override;
  void save(ModelState& state) const override;
  static std::shared_ptr<const FittedModel> from_state(const ModelState& state);
};

struct ForestModel final : FittedModel {
  std::vector<Tree> trees;  // leaves hold class-1 probability

  void predict_raw(const Matrix& X, std::span<double> out) const override;
  void save(ModelState& state) const override;
  static std::shared_ptr<const FittedModel> from_state(const ModelState& state);
};

struct GbcModel final : FittedModel {
  double f0 = 0.0;
  double learning_rate = 0.1;
  std::vector<Tree> trees;  // regression trees on gradient residuals

  void predict_raw(const Matrix& X, std::span<double> out) const override;
  void save(ModelState& state) const override;
  static std::shared_ptr<const FittedModel> from_state(const ModelState& state);
};

struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;  // +1: x > threshold votes class 1
  double alpha = 0.0;
};

struct AdaModel final : FittedModel {
  std::vector<Stump> stumps;

  void predict_raw(const Matrix& X, std::span<double> out) const override;
  void save(ModelState& state) const override;
  static std::shared_ptr<const FittedModel> from_state(const ModelState& state);
};

struct KnnModel final : FittedModel {
  Matrix train;  // standardized training rows
  std::vector<int> labels;
  std::size_t k = 1;

  void predict_raw(const Matrix& X, std::span<double> out) const override;
  void save(ModelState& state) const override;
  static std::shared_ptr<const FittedModel> from_state(const ModelState& state);
};

using Fitted = std::shared_ptr<const FittedModel>;

Fitted fit_lr(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y,
              std::vector<std::string>& warnings);
Fitted fit_ridge(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y);
Fitted fit_svm(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y,
               std::vector<std::string>& warnings);
Fitted fit_lda(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y,
               bool& repaired);
Fitted fit_qda(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y,
               bool& repaired);
Fitted fit_nb(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y);
Fitted fit_forest(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y);
Fitted fit_ada(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y);
Fitted fit_gbc(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y);
Fitted fit_knn(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y);

Fitted model_from_state(Family family, const ModelState& state);

void save_trees(const std::vector<Tree>& trees, ModelState& state);
std::vector<Tree> load_trees(const ModelState& state);

double sigmoid(double z);

}  // namespace rashomon::detail
