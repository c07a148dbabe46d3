#include "rashomon/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "model_impls.hpp"
#include "rashomon/errors.hpp"
#include "rashomon/metrics.hpp"
#include "rashomon/rng.hpp"

namespace rashomon {

const char* family_name(Family f) {
  switch (f) {
    case Family::lr: return "lr";
    case Family::ridge: return "ridge";
    case Family::lda: return "lda";
    case Family::qda: return "qda";
    case Family::nb: return "nb";
    case Family::dt: return "dt";
    case Family::rf: return "rf";
    case Family::et: return "et";
    case Family::ada: return "ada";
    case Family::gbc: return "gbc";
    case Family::knn: return "knn";
    case Family::svm: return "svm";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  for (Family f : kAllFamilies) {
    if (name == family_name(f)) return f;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model family '" + name + "'");
}

bool family_is_scaled(Family f) {
  switch (f) {
    case Family::lr:
    case Family::ridge:
    case Family::svm:
    case Family::knn:
    case Family::lda:
    case Family::qda:
      return true;
    default:
      return false;
  }
}

namespace {

std::vector<ParamDef> make_schema(Family f) {
  auto uniform = [](std::string name, double lo, double hi, double def) {
    return ParamDef{std::move(name), lo, hi, false, false, {}, def, true};
  };
  auto log_uniform = [](std::string name, double lo, double hi, double def) {
    return ParamDef{std::move(name), lo, hi, false, true, {}, def, true};
  };
  auto int_uniform = [](std::string name, double lo, double hi, double def) {
    return ParamDef{std::move(name), lo, hi, true, false, {}, def, true};
  };
  auto choice = [](std::string name, std::vector<double> values, double def) {
    return ParamDef{std::move(name), 0, 0, true, false, std::move(values), def, true};
  };
  auto fixed = [](std::string name, double lo, double hi, double def) {
    return ParamDef{std::move(name), lo, hi, true, false, {}, def, false};
  };
  auto tree_depth = [&] {
    ParamDef p = int_uniform("max_depth", 2, 16, 8);
    p.accept_lo = 0;
    p.accept_hi = 64;
    return p;
  };

  switch (f) {
    case Family::lr:
    case Family::ridge:
    case Family::svm:
      return {log_uniform("l2", 1e-4, 1e2, 1.0)};
    case Family::lda:
    case Family::qda:
      return {uniform("shrinkage", 0.0, 0.5, 0.0)};
    case Family::nb:
      return {log_uniform("var_smoothing", 1e-10, 1e-6, 1e-9)};
    case Family::dt:
      return {tree_depth(),
              choice("min_leaf", {1, 2, 4, 8}, 1)};
    case Family::rf:
      return {tree_depth(),
              choice("min_leaf", {1, 2, 4, 8}, 1),
              int_uniform("n_trees", 50, 300, 100),
              fixed("bootstrap", 0, 1, 1),
              fixed("max_features", 0, 1e9, 0)};
    case Family::et:
      return {tree_depth(),
              choice("min_leaf", {1, 2, 4, 8}, 1),
              int_uniform("n_trees", 50, 300, 100),
              fixed("random_threshold", 0, 1, 1),
              fixed("max_features", 0, 1e9, 0)};
    case Family::ada:
      return {int_uniform("n_estimators", 50, 300, 100),
              log_uniform("learning_rate", 0.01, 1.0, 1.0)};
    case Family::gbc:
      return {int_uniform("n_estimators", 50, 300, 100),
              log_uniform("learning_rate", 0.01, 1.0, 0.1),
              fixed("max_depth", 1, 16, 3)};
    case Family::knn:
      return {choice("k", {1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27, 29, 31}, 5)};
  }
  return {};
}

}  // namespace

const std::vector<ParamDef>& family_schema(Family f) {
  static const std::map<Family, std::vector<ParamDef>> schemas = [] {
    std::map<Family, std::vector<ParamDef>> m;
    for (Family f : kAllFamilies) m[f] = make_schema(f);
    return m;
  }();
  return schemas.at(f);
}

void validate_spec(const ModelSpec& spec) {
  const auto& schema = family_schema(spec.family);
  for (const auto& [name, value] : spec.hyperparams) {
    const ParamDef* def = nullptr;
    for (const auto& p : schema) {
      if (p.name == name) def = &p;
    }
    if (!def) {
      throw Error(ErrorCode::ConfigError, std::string(family_name(spec.family)) +
                                              " has no hyperparameter '" + name + "'");
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::ConfigError, name + " is not finite");
    }
    if (!def->choices.empty()) {
      if (std::find(def->choices.begin(), def->choices.end(), value) ==
          def->choices.end()) {
        throw Error(ErrorCode::ConfigError, name + " not an allowed choice");
      }
    } else {
      const double lo = std::isnan(def->accept_lo) ? def->lo : def->accept_lo;
      const double hi = std::isnan(def->accept_hi) ? def->hi : def->accept_hi;
      if (value < lo || value > hi) {
        throw Error(ErrorCode::ConfigError, name + " out of range");
      }
      if (def->integer && value != std::round(value)) {
        throw Error(ErrorCode::ConfigError, name + " must be an integer");
      }
    }
  }
}

ModelSpec sample_spec(Family f, std::uint64_t seed) {
  Rng rng(seed);
  ModelSpec spec;
  spec.family = f;
  for (const auto& p : family_schema(f)) {
    if (!p.searched) continue;
    double v;
    if (!p.choices.empty()) {
      v = p.choices[static_cast<std::size_t>(rng.below(p.choices.size()))];
    } else if (p.integer) {
      v = static_cast<double>(
          rng.range(static_cast<long long>(p.lo), static_cast<long long>(p.hi)));
    } else if (p.log_scale) {
      v = rng.log_uniform(p.lo, p.hi);
    } else {
      v = rng.uniform(p.lo, p.hi);
    }
    spec.hyperparams[p.name] = v;
  }
  return spec;
}

double hyper(const ModelSpec& spec, const std::string& name) {
  auto it = spec.hyperparams.find(name);
  if (it != spec.hyperparams.end()) return it->second;
  for (const auto& p : family_schema(spec.family)) {
    if (p.name == name) return p.fallback;
  }
  throw Error(ErrorCode::ConfigError, "unknown hyperparameter '" + name + "'");
}

std::vector<double> Predictor::proba1(const Matrix& X) const {
  std::vector<double> out(X.rows());
  predict_proba1(X, out);
  return out;
}

Matrix Predictor::predict_proba(const Matrix& X) const {
  std::vector<double> p1 = proba1(X);
  Matrix out(X.rows(), 2);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    out(i, 0) = 1.0 - p1[i];
    out(i, 1) = p1[i];
  }
  return out;
}

std::vector<int> Predictor::predict(const Matrix& X) const {
  std::vector<double> p1 = proba1(X);
  std::vector<int> out(p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) out[i] = p1[i] >= 0.5 ? 1 : 0;
  return out;
}

void TrainedModel::predict_proba1(const Matrix& X, std::span<double> out) const {
  if (X.cols() != features) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(features) + " features, got " +
                    std::to_string(X.cols()));
  }
  if (out.size() != X.rows()) {
    throw Error(ErrorCode::LengthMismatch, "output span size != rows");
  }
  if (scale_mean.empty()) {
    impl->predict_raw(X, out);
    return;
  }
  Matrix scaled(X.rows(), X.cols());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t j = 0; j < X.cols(); ++j) {
      scaled(i, j) = (X(i, j) - scale_mean[j]) / scale_sd[j];
    }
  }
  impl->predict_raw(scaled, out);
}

std::size_t BaggingEnsemble::feature_count() const {
  return members.empty() ? 0 : members.front().feature_count();
}

void BaggingEnsemble::predict_proba1(const Matrix& X, std::span<double> out) const {
  if (members.empty()) throw Error(ErrorCode::MemberMismatch, "empty ensemble");
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> tmp(X.rows());
  for (const auto& m : members) {
    m.predict_proba1(X, tmp);
    for (std::size_t i = 0; i < tmp.size(); ++i) out[i] += tmp[i];
  }
  double inv = 1.0 / static_cast<double>(members.size());
  for (auto& v : out) v *= inv;
}

TrainedModel train(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y) {
  validate_spec(spec);
  if (X.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "rows != labels");
  if (X.rows() < 2) throw Error(ErrorCode::TooFewInstances, "need N >= 2");
  std::size_t n_pos = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorCode::NonBinaryLabel, "label outside {0,1}");
    n_pos += static_cast<std::size_t>(v);
  }
  if (n_pos == 0 || n_pos == y.size()) {
    throw Error(ErrorCode::DegenerateClass, "training labels are single-class");
  }
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t j = 0; j < X.cols(); ++j) {
      if (!std::isfinite(X(i, j))) {
        throw Error(ErrorCode::NonFiniteValue, "training feature not finite");
      }
    }
  }

  TrainedModel m;
  m.spec = spec;
  m.features = X.cols();
  m.class_prior = static_cast<double>(n_pos) / static_cast<double>(y.size());

  const Matrix* fit_X = &X;
  Matrix scaled;
  if (family_is_scaled(spec.family)) {
    m.scale_mean.assign(X.cols(), 0.0);
    m.scale_sd.assign(X.cols(), 1.0);
    for (std::size_t j = 0; j < X.cols(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < X.rows(); ++i) s += X(i, j);
      double mean = s / static_cast<double>(X.rows());
      double ss = 0.0;
      for (std::size_t i = 0; i < X.rows(); ++i) {
        double d = X(i, j) - mean;
        ss += d * d;
      }
      double sd = std::sqrt(ss / static_cast<double>(X.rows()));
      m.scale_mean[j] = mean;
      m.scale_sd[j] = sd > 1e-12 ? sd : 1.0;
    }
    scaled = Matrix(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i) {
      for (std::size_t j = 0; j < X.cols(); ++j) {
        scaled(i, j) = (X(i, j) - m.scale_mean[j]) / m.scale_sd[j];
      }
    }
    fit_X = &scaled;
  }

  switch (spec.family) {
    case Family::lr: m.impl = detail::fit_lr(spec, *fit_X, y, m.warnings); break;
    case Family::ridge: m.impl = detail::fit_ridge(spec, *fit_X, y); break;
    case Family::svm: m.impl = detail::fit_svm(spec, *fit_X, y, m.warnings); break;
    case Family::lda: m.impl = detail::fit_lda(spec, *fit_X, y, m.repaired); break;
    case Family::qda: m.impl = detail::fit_qda(spec, *fit_X, y, m.repaired); break;
    case Family::nb: m.impl = detail::fit_nb(spec, *fit_X, y); break;
    case Family::dt:
    case Family::rf:
    case Family::et: m.impl = detail::fit_forest(spec, *fit_X, y); break;
    case Family::ada: m.impl = detail::fit_ada(spec, *fit_X, y); break;
    case Family::gbc: m.impl = detail::fit_gbc(spec, *fit_X, y); break;
    case Family::knn: m.impl = detail::fit_knn(spec, *fit_X, y); break;
  }
  if (m.repaired) m.warnings.push_back("repaired-shrinkage");
  return m;
}

BaggingEnsemble bag(std::vector<TrainedModel> members) {
  if (members.size() < 2) {
    throw Error(ErrorCode::MemberMismatch, "bagging needs >= 2 members");
  }
  for (const auto& m : members) {
    if (m.feature_count() != members.front().feature_count()) {
      throw Error(ErrorCode::MemberMismatch, "members disagree on feature count");
    }
  }
  BaggingEnsemble e;
  e.members = std::move(members);
  return e;
}

ModelSpec random_search(Family f, const Matrix& X, const std::vector<int>& y,
                        std::size_t budget, const FoldPlan& folds, std::uint64_t seed) {
  if (budget < 1) throw Error(ErrorCode::InvalidArgument, "budget must be >= 1");
  if (folds.assignments.size() != X.rows()) {
    throw Error(ErrorCode::LengthMismatch, "fold plan does not match data");
  }

  ModelSpec best;
  double best_score = -std::numeric_limits<double>::infinity();
  bool have_best = false;

  for (std::size_t i = 0; i < budget; ++i) {
    ModelSpec candidate = sample_spec(f, mix_seed(seed, i));
    candidate.seed = mix_seed(seed, 0x10000 + i);

    double total = 0.0;
    std::size_t scored = 0;
    bool failed = false;
    for (std::size_t fold = 0; fold < folds.k && !failed; ++fold) {
      std::vector<std::size_t> tr, va;
      for (std::size_t r = 0; r < X.rows(); ++r) {
        (folds.assignments[r] == fold ? va : tr).push_back(r);
      }
      if (va.empty()) continue;
      std::vector<int> y_tr, y_va;
      for (std::size_t r : tr) y_tr.push_back(y[r]);
      for (std::size_t r : va) y_va.push_back(y[r]);
      try {
        TrainedModel m = train(candidate, X.take_rows(tr), y_tr);
        std::vector<int> pred = m.predict(X.take_rows(va));
        total += kappa(confusion(y_va, pred));
        ++scored;
      } catch (const Error&) {
        failed = true;
      }
    }
    if (failed || scored == 0) continue;
    double mean = total / static_cast<double>(scored);
    if (!have_best || mean > best_score) {
      best = candidate;
      best_score = mean;
      have_best = true;
    }
  }
  if (!have_best) {
    throw Error(ErrorCode::AllFamiliesFailed,
                std::string(family_name(f)) + ": every sampled config failed CV");
  }
  return best;
}

}  // namespace rashomon
