#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rashomon/dataset.hpp"
#include "rashomon/matrix.hpp"

namespace rashomon {

enum class Family { lr, ridge, lda, qda, nb, dt, rf, et, ada, gbc, knn, svm };

inline constexpr Family kAllFamilies[] = {
    Family::lr,  Family::ridge, Family::lda, Family::qda, Family::nb,  Family::dt,
    Family::rf,  Family::et,    Family::ada, Family::gbc, Family::knn, Family::svm};

const char* family_name(Family f);
Family family_from_name(const std::string& name);

struct ModelSpec {
  Family family = Family::lr;
  std::map<std::string, double> hyperparams;
  std::uint64_t seed = 0;
};

struct ParamDef {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  bool integer = false;
  bool log_scale = false;
  std::vector<double> choices;  // non-empty: value must be one of these
  double fallback = 0.0;
  bool searched = true;
  // Wider bounds for explicitly supplied values; NaN falls back to [lo, hi].
  double accept_lo = std::numeric_limits<double>::quiet_NaN();
  double accept_hi = std::numeric_limits<double>::quiet_NaN();
};

const std::vector<ParamDef>& family_schema(Family f);
void validate_spec(const ModelSpec& spec);
ModelSpec sample_spec(Family f, std::uint64_t seed);
double hyper(const ModelSpec& spec, const std::string& name);

// Anything that can score rows: trained models and the bagging ensemble.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::size_t feature_count() const = 0;
  // class-1 probability per row of X
  virtual void predict_proba1(const Matrix& X, std::span<double> out) const = 0;

  std::vector<double> proba1(const Matrix& X) const;
  Matrix predict_proba(const Matrix& X) const;  // N x 2, rows sum to 1
  std::vector<int> predict(const Matrix& X) const;
};

struct ModelState {
  std::map<std::string, std::vector<double>> arrays;
};

// Family-specific fitted internals. Inputs arrive already standardized when
// the family is scale-sensitive.
class FittedModel {
 public:
  virtual ~FittedModel() = default;
  virtual void predict_raw(const Matrix& X, std::span<double> out) const = 0;
  virtual void save(ModelState& state) const = 0;
};

struct TrainedModel final : Predictor {
  ModelSpec spec;
  std::size_t features = 0;
  double class_prior = 0.0;
  std::vector<double> scale_mean;  // empty for scale-free families
  std::vector<double> scale_sd;
  bool repaired = false;
  std::vector<std::string> warnings;
  std::shared_ptr<const FittedModel> impl;

  std::size_t feature_count() const override { return features; }
  void predict_proba1(const Matrix& X, std::span<double> out) const override;
};

struct BaggingEnsemble final : Predictor {
  std::vector<TrainedModel> members;

  std::size_t feature_count() const override;
  void predict_proba1(const Matrix& X, std::span<double> out) const override;
};

TrainedModel train(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y);

BaggingEnsemble bag(std::vector<TrainedModel> members);

ModelSpec random_search(Family f, const Matrix& X, const std::vector<int>& y,
                        std::size_t budget, const FoldPlan& folds, std::uint64_t seed);

// Versioned binary persistence, keyed by content hash for caching.
void save_model(const TrainedModel& m, const std::string& path);
TrainedModel load_model(const std::string& path);
std::string model_cache_key(const ModelSpec& spec, std::uint64_t data_digest);

// Regularized log-loss pieces used by the lr trainer; exposed for the
// finite-difference gradient check. w[0] is the intercept and is excluded
// from the penalty; X must already carry the leading 1s column.
double logreg_loss(const Matrix& X, const std::vector<int>& y,
                   std::span<const double> w, double l2);
std::vector<double> logreg_gradient(const Matrix& X, const std::vector<int>& y,
                                    std::span<const double> w, double l2);

bool family_is_scaled(Family f);

}  // namespace rashomon
