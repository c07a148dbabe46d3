#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rashomon/matrix.hpp"
#include "rashomon/models.hpp"

namespace rashomon {

struct Background {
  Matrix rows;
  std::string source;

  std::size_t size() const { return rows.rows(); }
};

// Uniform subsample without replacement of the given training rows; all rows
// when B >= available. With mean_row, a single synthetic per-feature-mean row.
Background make_background(const Matrix& X_train, std::size_t B, std::uint64_t seed,
                           bool mean_row = false);

struct ShapConfig {
  std::size_t nsamples = 2048;          // sampled-mode coalition budget
  std::size_t enumeration_threshold = 12;  // K <= this: enumerate all coalitions
  std::uint64_t seed = 0;
};

struct Attribution {
  Matrix values;  // N x K
  double base = 0.0;
  std::string explained_output = "probability of class 1";
};

Attribution explain(const Predictor& m, const Matrix& X, const Background& bg,
                    const ShapConfig& config = {});

// Brute-force Shapley values of one instance with factorial subset weights.
// Independent of the kernel WLS path; K <= 12.
std::vector<double> exact_shapley_oracle(const Predictor& m, std::span<const double> x,
                                         const Background& bg);

struct GlobalImportance {
  std::vector<double> per_feature;  // mean |phi|
  std::string model_id;
  std::size_t sample_size = 0;
  std::size_t fold_id = 0;
};

GlobalImportance aggregate(const Attribution& a);

namespace detail {

// Weighted least squares over coalition masks with the efficiency constraint
// eliminated analytically. Returns length-K attributions.
std::vector<double> kernel_wls_solve(std::span<const std::uint64_t> masks,
                                     std::span<const double> weights, std::size_t k,
                                     std::span<const double> v, double base, double fx);

double shapley_kernel_weight(std::size_t k, std::size_t coalition_size);

}  // namespace detail

}  // namespace rashomon
