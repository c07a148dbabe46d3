#include <algorithm>
#include <cmath>

#include "model_impls.hpp"
#include "rashomon/errors.hpp"

namespace rashomon::detail {

void KnnModel::predict_raw(const Matrix& X, std::span<double> out) const {
  std::size_t n_train = train.rows();
  std::size_t k_eff = std::min(k, n_train);
  std::vector<std::pair<double, std::size_t>> dist(n_train);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double* q = X.data() + i * X.cols();
    for (std::size_t t = 0; t < n_train; ++t) {
      const double* r = train.data() + t * train.cols();
      double d = 0.0;
      for (std::size_t j = 0; j < train.cols(); ++j) {
        double diff = q[j] - r[j];
        d += diff * diff;
      }
      dist[t] = {d, t};
    }
    std::partial_sort(dist.begin(), dist.begin() + k_eff, dist.end());
    std::size_t votes = 0;
    for (std::size_t t = 0; t < k_eff; ++t) {
      votes += static_cast<std::size_t>(labels[dist[t].second]);
    }
    out[i] = static_cast<double>(votes) / static_cast<double>(k_eff);
  }
}

void KnnModel::save(ModelState& state) const {
  std::vector<double> rows;
  rows.reserve(train.rows() * train.cols());
  for (std::size_t i = 0; i < train.rows(); ++i) {
    for (std::size_t j = 0; j < train.cols(); ++j) rows.push_back(train(i, j));
  }
  state.arrays["train"] = std::move(rows);
  std::vector<double> lab(labels.begin(), labels.end());
  state.arrays["labels"] = std::move(lab);
  state.arrays["knn_scalars"] = {static_cast<double>(k),
                                 static_cast<double>(train.cols())};
}

std::shared_ptr<const FittedModel> KnnModel::from_state(const ModelState& state) {
  auto m = std::make_shared<KnnModel>();
  const auto& s = state.arrays.at("knn_scalars");
  m->k = static_cast<std::size_t>(s.at(0));
  std::size_t cols = static_cast<std::size_t>(s.at(1));
  const auto& rows = state.arrays.at("train");
  std::size_t n = cols > 0 ? rows.size() / cols : 0;
  m->train = Matrix(n, cols);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m->train(i, j) = rows[i * cols + j];
  }
  for (double v : state.arrays.at("labels")) m->labels.push_back(static_cast<int>(v));
  return m;
}

Fitted fit_knn(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y) {
  auto m = std::make_shared<KnnModel>();
  m->k = static_cast<std::size_t>(hyper(spec, "k"));
  m->train = X;
  m->labels = y;
  return m;
}

}  // namespace rashomon::detail
