#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rashomon/matrix.hpp"
#include "rashomon/rng.hpp"

namespace rashomon {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict_row(const double* x) const {
    int idx = 0;
    while (nodes[idx].feature >= 0) {
      idx = x[nodes[idx].feature] <= nodes[idx].threshold ? nodes[idx].left
                                                          : nodes[idx].right;
    }
    return nodes[idx].value;
  }
};

struct TreeOptions {
  std::size_t max_depth = 16;
  std::size_t min_leaf = 1;
  std::size_t mtry = 0;  // 0 = all features
  bool random_threshold = false;
};

// Variance-reduction tree over real targets. For binary 0/1 targets this
// selects the same splits as Gini gain; leaves hold the target mean. When
// `hessians` is non-empty, leaves hold sum(targets)/sum(hessians) instead
// (Newton step for boosting). `rows` may contain duplicates (bootstrap).
Tree grow_tree(const Matrix& X, std::span<const double> targets,
               std::span<const double> hessians, std::span<const std::size_t> rows,
               const TreeOptions& options, Rng& rng);

}  // namespace rashomon
