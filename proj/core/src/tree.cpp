#include "rashomon/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rashomon/errors.hpp"

namespace rashomon {

namespace {

struct Split {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
};

struct Grower {
  const Matrix& X;
  std::span<const double> targets;
  std::span<const double> hessians;
  const TreeOptions& opt;
  Rng& rng;
  std::vector<TreeNode> nodes;
  std::vector<std::pair<double, std::size_t>> scratch;  // (x value, row)

  double leaf_value(std::span<const std::size_t> rows) const {
    double ts = 0.0;
    for (std::size_t r : rows) ts += targets[r];
    if (hessians.empty()) return ts / static_cast<double>(rows.size());
    double hs = 0.0;
    for (std::size_t r : rows) hs += hessians[r];
    return ts / std::max(hs, 1e-12);
  }

  Split best_split(std::span<const std::size_t> rows,
                   std::span<const std::size_t> features) {
    Split best;
    std::size_t n = rows.size();
    for (std::size_t j : features) {
      scratch.clear();
      for (std::size_t r : rows) scratch.push_back({X(r, j), r});
      std::sort(scratch.begin(), scratch.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (scratch.front().first == scratch.back().first) continue;

      if (opt.random_threshold) {
        double thr = rng.uniform(scratch.front().first, scratch.back().first);
        double sum_l = 0.0;
        std::size_t n_l = 0, total_n = n;
        double total = 0.0;
        for (auto& [x, r] : scratch) {
          total += targets[r];
          if (x <= thr) {
            sum_l += targets[r];
            ++n_l;
          }
        }
        std::size_t n_r = total_n - n_l;
        if (n_l < opt.min_leaf || n_r < opt.min_leaf) continue;
        double sum_r = total - sum_l;
        double gain = sum_l * sum_l / static_cast<double>(n_l) +
                      sum_r * sum_r / static_cast<double>(n_r);
        if (gain > best.gain) {
          best = {true, j, thr, gain};
        }
        continue;
      }

      double total = 0.0;
      for (auto& [x, r] : scratch) total += targets[r];
      double sum_l = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        sum_l += targets[scratch[i - 1].second];
        if (scratch[i - 1].first == scratch[i].first) continue;
        std::size_t n_l = i, n_r = n - i;
        if (n_l < opt.min_leaf || n_r < opt.min_leaf) continue;
        double sum_r = total - sum_l;
        double gain = sum_l * sum_l / static_cast<double>(n_l) +
                      sum_r * sum_r / static_cast<double>(n_r);
        if (gain > best.gain) {
          best = {true, j, (scratch[i - 1].first + scratch[i].first) / 2.0, gain};
        }
      }
    }
    return best;
  }

  int build(std::vector<std::size_t>& rows, std::size_t depth) {
    int idx = static_cast<int>(nodes.size());
    nodes.push_back({});

    bool pure = true;
    for (std::size_t r : rows) {
      if (targets[r] != targets[rows[0]]) {
        pure = false;
        break;
      }
    }
    if (depth >= opt.max_depth || pure || rows.size() < 2 * opt.min_leaf) {
      nodes[idx].value = leaf_value(rows);
      return idx;
    }

    std::size_t k = X.cols();
    std::vector<std::size_t> features;
    if (opt.mtry == 0 || opt.mtry >= k) {
      features.resize(k);
      for (std::size_t j = 0; j < k; ++j) features[j] = j;
    } else {
      features = rng.sample_without_replacement(k, opt.mtry);
    }

    Split split = best_split(rows, features);
    if (!split.found) {
      nodes[idx].value = leaf_value(rows);
      return idx;
    }

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
      (X(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes[idx].feature = static_cast<int>(split.feature);
    nodes[idx].threshold = split.threshold;
    nodes[idx].left = build(left_rows, depth + 1);
    nodes[idx].right = build(right_rows, depth + 1);
    return idx;
  }
};

}  // namespace

Tree grow_tree(const Matrix& X, std::span<const double> targets,
               std::span<const double> hessians, std::span<const std::size_t> rows,
               const TreeOptions& options, Rng& rng) {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "grow_tree on no rows");
  Grower g{X, targets, hessians, options, rng, {}, {}};
  std::vector<std::size_t> all(rows.begin(), rows.end());
  g.build(all, 0);
  Tree t;
  t.nodes = std::move(g.nodes);
  return t;
}

}  // namespace rashomon
