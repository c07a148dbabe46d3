#include "rashomon/synth.hpp"

#include <cmath>

#include "rashomon/errors.hpp"
#include "rashomon/rng.hpp"

namespace rashomon {

namespace {

std::vector<std::string> numbered_names(std::size_t k) {
  std::vector<std::string> names(k);
  for (std::size_t j = 0; j < k; ++j) names[j] = "x" + std::to_string(j);
  return names;
}

void flip_labels(std::vector<int>& labels, double noise, Rng& rng) {
  if (noise <= 0.0) return;
  for (auto& y : labels)
    if (rng.uniform() < noise) y = 1 - y;
}

}  // namespace

Dataset make_planted(std::size_t n, std::size_t k, double noise, std::uint64_t seed,
                     const std::string& name) {
  if (n < 4 || k < 3) throw Error(ErrorCode::InvalidArgument, "make_planted: need n >= 4, k >= 3");
  if (noise < 0.0 || noise >= 0.5)
    throw Error(ErrorCode::InvalidArgument, "make_planted: noise must be in [0, 0.5)");
  Rng rng(seed);
  Matrix x(n, k);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) x(i, j) = rng.normal();
    const double score = 2.0 * x(i, 0) - 1.6 * x(i, 1) + 1.2 * x(i, 2);
    y[i] = score > 0.0 ? 1 : 0;
  }
  flip_labels(y, noise, rng);
  return Dataset{std::move(x), std::move(y), numbered_names(k), name};
}

Dataset make_xor(std::size_t n, std::size_t k, double noise, std::uint64_t seed,
                 const std::string& name) {
  if (n < 4 || k < 2) throw Error(ErrorCode::InvalidArgument, "make_xor: need n >= 4, k >= 2");
  if (noise < 0.0 || noise >= 0.5)
    throw Error(ErrorCode::InvalidArgument, "make_xor: noise must be in [0, 0.5)");
  Rng rng(seed);
  Matrix x(n, k);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) x(i, j) = rng.normal();
    y[i] = ((x(i, 0) > 0.0) != (x(i, 1) > 0.0)) ? 1 : 0;
  }
  flip_labels(y, noise, rng);
  return Dataset{std::move(x), std::move(y), numbered_names(k), name};
}

Dataset make_separable(std::size_t n, std::size_t k, double margin, std::uint64_t seed,
                       const std::string& name) {
  if (n < 4 || k < 2)
    throw Error(ErrorCode::InvalidArgument, "make_separable: need n >= 4, k >= 2");
  if (margin < 0.0) throw Error(ErrorCode::InvalidArgument, "make_separable: margin must be >= 0");
  Rng rng(seed);
  Matrix x(n, k);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double score = 0.0;
    do {
      for (std::size_t j = 0; j < k; ++j) x(i, j) = rng.normal();
      score = x(i, 0) + x(i, 1);
    } while (std::abs(score) < margin);
    y[i] = score > 0.0 ? 1 : 0;
  }
  // Guarantee both classes even at tiny n.
  bool pos = false, neg = false;
  for (int v : y) (v == 1 ? pos : neg) = true;
  if (!pos) {
    y[0] = 1;
    x(0, 0) = margin + 1.0;
    x(0, 1) = margin + 1.0;
  }
  if (!neg) {
    y[n - 1] = 0;
    x(n - 1, 0) = -(margin + 1.0);
    x(n - 1, 1) = -(margin + 1.0);
  }
  return Dataset{std::move(x), std::move(y), numbered_names(k), name};
}

}  // namespace rashomon
