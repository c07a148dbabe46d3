#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rashomon {

struct SpearmanResult {
  double r = 0.0;
  double p = 1.0;
};

// Midrank Spearman correlation with a two-sided t-approximation p-value.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

// Exact two-sided permutation p-value for the midrank Spearman statistic.
// Enumerates all n! label permutations; n <= 8.
double spearman_permutation_p(std::span<const double> x, std::span<const double> y);

std::vector<double> midranks(std::span<const double> values);

// Benjamini-Hochberg step-up adjustment, returned in input order.
std::vector<double> bh_fdr(std::span<const double> p_values);

// Post-hoc power of the correlation test via the Fisher-z approximation.
double posthoc_power(double r, std::size_t n, double alpha = 0.05);

struct CorrelationResult {
  double r = 0.0;
  double p = 1.0;
  double p_cor = 1.0;
  double power = 0.0;
  std::size_t n = 0;
};

}  // namespace rashomon
