#include <algorithm>
#include <cmath>

#include "model_impls.hpp"
#include "rashomon/errors.hpp"
#include "rashomon/rng.hpp"

namespace rashomon::detail {

void ForestModel::predict_raw(const Matrix& X, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const Tree& tree : trees) {
    for (std::size_t i = 0; i < X.rows(); ++i) {
      out[i] += tree.predict_row(X.data() + i * X.cols());
    }
  }
  double inv = 1.0 / static_cast<double>(trees.size());
  for (auto& v : out) v *= inv;
}

void ForestModel::save(ModelState& state) const { save_trees(trees, state); }

std::shared_ptr<const FittedModel> ForestModel::from_state(const ModelState& state) {
  auto m = std::make_shared<ForestModel>();
  m->trees = load_trees(state);
  return m;
}

void GbcModel::predict_raw(const Matrix& X, std::span<double> out) const {
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = f0;
  for (const Tree& tree : trees) {
    for (std::size_t i = 0; i < X.rows(); ++i) {
      out[i] += learning_rate * tree.predict_row(X.data() + i * X.cols());
    }
  }
  for (auto& v : out) v = sigmoid(v);
}

void GbcModel::save(ModelState& state) const {
  save_trees(trees, state);
  state.arrays["gbc_scalars"] = {f0, learning_rate};
}

std::shared_ptr<const FittedModel> GbcModel::from_state(const ModelState& state) {
  auto m = std::make_shared<GbcModel>();
  m->trees = load_trees(state);
  const auto& s = state.arrays.at("gbc_scalars");
  m->f0 = s.at(0);
  m->learning_rate = s.at(1);
  return m;
}

void save_trees(const std::vector<Tree>& trees, ModelState& state) {
  std::vector<double> feature, threshold, left, right, value, offsets;
  offsets.push_back(0);
  for (const Tree& t : trees) {
    for (const TreeNode& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
    }
    offsets.push_back(static_cast<double>(feature.size()));
  }
  state.arrays["t_feature"] = std::move(feature);
  state.arrays["t_threshold"] = std::move(threshold);
  state.arrays["t_left"] = std::move(left);
  state.arrays["t_right"] = std::move(right);
  state.arrays["t_value"] = std::move(value);
  state.arrays["t_offsets"] = std::move(offsets);
}

std::vector<Tree> load_trees(const ModelState& state) {
  const auto& feature = state.arrays.at("t_feature");
  const auto& threshold = state.arrays.at("t_threshold");
  const auto& left = state.arrays.at("t_left");
  const auto& right = state.arrays.at("t_right");
  const auto& value = state.arrays.at("t_value");
  const auto& offsets = state.arrays.at("t_offsets");
  std::vector<Tree> trees;
  for (std::size_t t = 0; t + 1 < offsets.size(); ++t) {
    Tree tree;
    auto begin = static_cast<std::size_t>(offsets[t]);
    auto end = static_cast<std::size_t>(offsets[t + 1]);
    for (std::size_t i = begin; i < end; ++i) {
      tree.nodes.push_back({static_cast<int>(feature[i]), threshold[i],
                            static_cast<int>(left[i]), static_cast<int>(right[i]),
                            value[i]});
    }
    trees.push_back(std::move(tree));
  }
  return trees;
}

Fitted fit_forest(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y) {
  std::size_t k = X.cols();
  std::size_t n = X.rows();

  std::size_t n_trees = 1;
  bool bootstrap = false;
  bool random_threshold = false;
  std::size_t mtry = k;
  if (spec.family == Family::rf || spec.family == Family::et) {
    n_trees = static_cast<std::size_t>(hyper(spec, "n_trees"));
    double mf = hyper(spec, "max_features");
    mtry = mf == 0.0 ? static_cast<std::size_t>(
                           std::ceil(std::sqrt(static_cast<double>(k))))
                     : std::min<std::size_t>(static_cast<std::size_t>(mf), k);
    if (spec.family == Family::rf) {
      bootstrap = hyper(spec, "bootstrap") != 0.0;
    } else {
      random_threshold = hyper(spec, "random_threshold") != 0.0;
    }
  }

  TreeOptions options;
  options.max_depth = static_cast<std::size_t>(hyper(spec, "max_depth"));
  options.min_leaf = static_cast<std::size_t>(hyper(spec, "min_leaf"));
  options.mtry = mtry;
  options.random_threshold = random_threshold;

  std::vector<double> targets(n);
  for (std::size_t i = 0; i < n; ++i) targets[i] = static_cast<double>(y[i]);

  std::vector<std::size_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;

  auto m = std::make_shared<ForestModel>();
  for (std::size_t t = 0; t < n_trees; ++t) {
    Rng rng(mix_seed(spec.seed, t));
    std::vector<std::size_t> rows;
    if (bootstrap) {
      rows.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        rows[i] = static_cast<std::size_t>(rng.below(n));
      }
    }
    m->trees.push_back(grow_tree(X, targets, {}, bootstrap ? rows : all_rows,
                                 options, rng));
  }
  return m;
}

Fitted fit_gbc(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y) {
  std::size_t n = X.rows();
  std::size_t rounds = static_cast<std::size_t>(hyper(spec, "n_estimators"));

  auto m = std::make_shared<GbcModel>();
  m->learning_rate = hyper(spec, "learning_rate");

  double prior = 0.0;
  for (int v : y) prior += v;
  prior = std::clamp(prior / static_cast<double>(n), 1e-12, 1.0 - 1e-12);
  m->f0 = std::log(prior / (1.0 - prior));

  TreeOptions options;
  options.max_depth = static_cast<std::size_t>(hyper(spec, "max_depth"));
  options.min_leaf = 1;
  options.mtry = 0;

  std::vector<std::size_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;

  std::vector<double> f(n, m->f0), residual(n), hessian(n);
  for (std::size_t round = 0; round < rounds; ++round) {
    double max_resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(f[i]);
      residual[i] = static_cast<double>(y[i]) - p;
      hessian[i] = std::max(p * (1.0 - p), 1e-12);
      max_resid = std::max(max_resid, std::abs(residual[i]));
    }
    if (max_resid < 1e-10) break;

    Rng rng(mix_seed(spec.seed, round));
    Tree tree = grow_tree(X, residual, hessian, all_rows, options, rng);
    for (std::size_t i = 0; i < n; ++i) {
      f[i] += m->learning_rate * tree.predict_row(X.data() + i * X.cols());
    }
    m->trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace rashomon::detail
