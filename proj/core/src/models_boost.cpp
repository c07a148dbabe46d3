#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "model_impls.hpp"
#include "rashomon/errors.hpp"

namespace rashomon::detail {

void AdaModel::predict_raw(const Matrix& X, std::span<double> out) const {
  double alpha_sum = 0.0;
  for (const Stump& s : stumps) alpha_sum += s.alpha;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double* row = X.data() + i * X.cols();
    double vote = 0.0;
    for (const Stump& s : stumps) {
      double h = row[s.feature] > s.threshold ? 1.0 : -1.0;
      vote += s.alpha * h * static_cast<double>(s.polarity);
    }
    out[i] = sigmoid(alpha_sum > 0.0 ? 2.0 * vote / alpha_sum : 0.0);
  }
}

void AdaModel::save(ModelState& state) const {
  std::vector<double> feature, threshold, polarity, alpha;
  for (const Stump& s : stumps) {
    feature.push_back(static_cast<double>(s.feature));
    threshold.push_back(s.threshold);
    polarity.push_back(static_cast<double>(s.polarity));
    alpha.push_back(s.alpha);
  }
  state.arrays["s_feature"] = std::move(feature);
  state.arrays["s_threshold"] = std::move(threshold);
  state.arrays["s_polarity"] = std::move(polarity);
  state.arrays["s_alpha"] = std::move(alpha);
}

std::shared_ptr<const FittedModel> AdaModel::from_state(const ModelState& state) {
  auto m = std::make_shared<AdaModel>();
  const auto& feature = state.arrays.at("s_feature");
  const auto& threshold = state.arrays.at("s_threshold");
  const auto& polarity = state.arrays.at("s_polarity");
  const auto& alpha = state.arrays.at("s_alpha");
  for (std::size_t i = 0; i < feature.size(); ++i) {
    m->stumps.push_back({static_cast<std::size_t>(feature[i]), threshold[i],
                         static_cast<int>(polarity[i]), alpha[i]});
  }
  return m;
}

namespace {

struct StumpFit {
  Stump stump;
  double error = std::numeric_limits<double>::infinity();
};

// Weighted decision stump: exhaustive threshold scan per feature.
StumpFit best_stump(const Matrix& X, const std::vector<int>& y,
                    const std::vector<double>& weights) {
  std::size_t n = X.rows();
  StumpFit best;
  std::vector<std::pair<double, std::size_t>> order(n);
  for (std::size_t j = 0; j < X.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) order[i] = {X(i, j), i};
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // error of "everything votes class 1" for polarity +1 at threshold below min
    double err_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] == 0) err_plus += weights[i];
    }
    auto consider = [&](double threshold, double ep) {
      // polarity +1: x > threshold → class 1
      if (ep < best.error) {
        best.error = ep;
        best.stump = {j, threshold, 1, 0.0};
      }
      double em = 1.0 - ep;
      if (em < best.error) {
        best.error = em;
        best.stump = {j, threshold, -1, 0.0};
      }
    };
    consider(order.front().first - 1.0, err_plus);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = order[i].second;
      // r moves to the "≤ threshold" side, predicted class 0 under polarity +1
      if (y[r] == 1) err_plus += weights[r];
      else err_plus -= weights[r];
      if (i + 1 < n && order[i].first == order[i + 1].first) continue;
      double threshold = i + 1 < n
                             ? (order[i].first + order[i + 1].first) / 2.0
                             : order[i].first + 1.0;
      consider(threshold, err_plus);
    }
  }
  return best;
}

}  // namespace

Fitted fit_ada(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y) {
  std::size_t n = X.rows();
  std::size_t rounds = static_cast<std::size_t>(hyper(spec, "n_estimators"));
  double lr = hyper(spec, "learning_rate");

  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  auto m = std::make_shared<AdaModel>();

  for (std::size_t round = 0; round < rounds; ++round) {
    StumpFit fit = best_stump(X, y, weights);
    double eps = std::clamp(fit.error, 1e-10, 1.0 - 1e-10);
    if (fit.error >= 0.5) break;

    fit.stump.alpha = lr * std::log((1.0 - eps) / eps);
    m->stumps.push_back(fit.stump);

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double h = X(i, fit.stump.feature) > fit.stump.threshold ? 1.0 : -1.0;
      h *= static_cast<double>(fit.stump.polarity);
      double truth = y[i] == 1 ? 1.0 : -1.0;
      if (h != truth) weights[i] *= std::exp(fit.stump.alpha);
      total += weights[i];
    }
    for (auto& w : weights) w /= total;

    if (fit.error <= 1e-10) break;
  }

  if (m->stumps.empty()) {
    // degenerate data: single zero-weight stump keeps the predictor total
    StumpFit fit = best_stump(X, y, weights);
    fit.stump.alpha = 0.0;
    m->stumps.push_back(fit.stump);
  }
  return m;
}

}  // namespace rashomon::detail
