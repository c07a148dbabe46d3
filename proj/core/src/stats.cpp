#include "rashomon/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "rashomon/errors.hpp"

namespace rashomon {

std::vector<double> midranks(std::span<const double> values) {
  std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mid;
    i = j + 1;
  }
  return ranks;
}

namespace {

double pearson(std::span<const double> x, std::span<const double> y, bool& degenerate) {
  std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    degenerate = true;
    return 0.0;
  }
  degenerate = false;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "input lengths differ");
  }
  if (x.size() < 4) throw Error(ErrorCode::TooShort, "need n >= 4");
}

double rho_of_ranks(std::span<const double> rx, std::span<const double> ry) {
  bool degenerate = false;
  double r = pearson(rx, ry, degenerate);
  if (degenerate) throw Error(ErrorCode::ConstantInput, "constant input vector");
  return r;
}

}  // namespace

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  std::vector<double> rx = midranks(x);
  std::vector<double> ry = midranks(y);
  double r = rho_of_ranks(rx, ry);

  SpearmanResult result;
  result.r = r;
  double n = static_cast<double>(x.size());
  if (1.0 - r * r <= 1e-15) {
    result.p = 0.0;
  } else {
    double t = r * std::sqrt((n - 2.0) / (1.0 - r * r));
    boost::math::students_t dist(n - 2.0);
    result.p = 2.0 * boost::math::cdf(dist, -std::abs(t));
  }
  return result;
}

double spearman_permutation_p(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  if (x.size() > 8) {
    throw Error(ErrorCode::InvalidArgument, "permutation mode limited to n <= 8");
  }
  std::vector<double> rx = midranks(x);
  std::vector<double> ry = midranks(y);
  double observed = std::abs(rho_of_ranks(rx, ry));

  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> permuted(x.size());
  std::size_t hits = 0, total = 0;
  do {
    for (std::size_t i = 0; i < perm.size(); ++i) permuted[i] = ry[perm[i]];
    bool degenerate = false;
    double r = std::abs(pearson(rx, permuted, degenerate));
    if (r >= observed - 1e-12) ++hits;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<double> bh_fdr(std::span<const double> p_values) {
  std::size_t m = p_values.size();
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::OutOfRange, "p-value outside [0,1]");
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p_values[a] < p_values[b];
  });
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t i = m; i-- > 0;) {
    double q = p_values[order[i]] * static_cast<double>(m) /
               static_cast<double>(i + 1);
    running = std::min(running, q);
    adjusted[order[i]] = std::min(running, 1.0);
  }
  return adjusted;
}

double posthoc_power(double r, std::size_t n, double alpha) {
  if (n < 4) throw Error(ErrorCode::TooShort, "need n >= 4");
  if (!(std::abs(r) < 1.0)) throw Error(ErrorCode::DegenerateR, "|r| must be < 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::OutOfRange, "alpha outside (0,1)");
  }
  boost::math::normal norm;
  double z_crit = boost::math::quantile(norm, 1.0 - alpha / 2.0);
  double arg = std::sqrt(static_cast<double>(n) - 3.0) * std::abs(std::atanh(r)) -
               z_crit;
  return boost::math::cdf(norm, arg);
}

}  // namespace rashomon
