#include "rashomon/shap.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "rashomon/errors.hpp"
#include "rashomon/rng.hpp"

namespace rashomon {

Background make_background(const Matrix& X_train, std::size_t B, std::uint64_t seed,
                           bool mean_row) {
  if (X_train.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "background source is empty");
  }
  Background bg;
  if (mean_row) {
    bg.rows = Matrix(1, X_train.cols());
    for (std::size_t j = 0; j < X_train.cols(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < X_train.rows(); ++i) s += X_train(i, j);
      bg.rows(0, j) = s / static_cast<double>(X_train.rows());
    }
    bg.source = "mean";
    return bg;
  }
  if (B == 0) throw Error(ErrorCode::InvalidArgument, "B must be >= 1");
  if (B >= X_train.rows()) {
    bg.rows = X_train;
    bg.source = "train[all]";
    return bg;
  }
  Rng rng(seed);
  std::vector<std::size_t> idx = rng.sample_without_replacement(X_train.rows(), B);
  std::sort(idx.begin(), idx.end());
  bg.rows = X_train.take_rows(idx);
  bg.source = "train[B=" + std::to_string(B) + "]";
  return bg;
}

namespace detail {

double shapley_kernel_weight(std::size_t k, std::size_t coalition_size) {
  // (K-1) / (C(K,|z|) * |z| * (K-|z|))
  double binom = 1.0;
  for (std::size_t i = 0; i < coalition_size; ++i) {
    binom *= static_cast<double>(k - i) / static_cast<double>(i + 1);
  }
  return static_cast<double>(k - 1) /
         (binom * static_cast<double>(coalition_size) *
          static_cast<double>(k - coalition_size));
}

namespace {

struct MaskSet {
  std::vector<std::uint64_t> masks;
  std::vector<double> weights;
};

MaskSet enumerate_masks(std::size_t k) {
  MaskSet set;
  std::uint64_t full = (1ULL << k) - 1;
  std::vector<double> by_size(k);
  for (std::size_t c = 1; c < k; ++c) by_size[c] = shapley_kernel_weight(k, c);
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    set.masks.push_back(mask);
    set.weights.push_back(by_size[static_cast<std::size_t>(std::popcount(mask))]);
  }
  return set;
}

MaskSet sample_masks(std::size_t k, std::size_t nsamples, std::uint64_t seed) {
  // size distribution proportional to the total kernel mass per size,
  // q(c) ∝ 1/(c(K−c)); masks uniform within a size; each draw adds its
  // complement (antithetic pairing)
  std::vector<double> cumulative(k, 0.0);
  double total = 0.0;
  for (std::size_t c = 1; c < k; ++c) {
    total += 1.0 / (static_cast<double>(c) * static_cast<double>(k - c));
    cumulative[c] = total;
  }
  Rng rng(seed);
  std::map<std::uint64_t, double> counts;
  std::uint64_t full = (1ULL << k) - 1;
  std::size_t pairs = nsamples / 2;
  for (std::size_t p = 0; p < pairs; ++p) {
    double u = rng.uniform() * total;
    std::size_t c = 1;
    while (c < k - 1 && cumulative[c] < u) ++c;
    std::uint64_t mask = 0;
    for (std::size_t j : rng.sample_without_replacement(k, c)) mask |= 1ULL << j;
    counts[mask] += 1.0;
    counts[full & ~mask] += 1.0;
  }
  MaskSet set;
  for (const auto& [mask, count] : counts) {
    set.masks.push_back(mask);
    set.weights.push_back(count);
  }
  return set;
}

// Kernel WLS system with the efficiency constraint eliminated: the last
// feature's attribution is substituted out, leaving a (K-1)-dim solve whose
// right-hand side depends on the instance.
class KernelSystem {
 public:
  KernelSystem(const MaskSet& set, std::size_t k) : set_(set), k_(k) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k - 1, k - 1);
    Eigen::VectorXd z2(k - 1);
    for (std::size_t m = 0; m < set.masks.size(); ++m) {
      fill_z2(set.masks[m], z2);
      A.selfadjointView<Eigen::Lower>().rankUpdate(z2, set.weights[m]);
    }
    A = A.selfadjointView<Eigen::Lower>();
    factor(A);
    if (!healthy_) {
      for (std::size_t j = 0; j < k - 1; ++j) A(j, j) += 1e-10;
      factor(A);
      if (!healthy_) {
        throw Error(ErrorCode::SolverSingular, "kernel WLS system not solvable");
      }
    }
  }

  std::vector<double> solve(std::span<const double> v, double base, double fx) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k_ - 1);
    Eigen::VectorXd z2(k_ - 1);
    double gap = fx - base;
    for (std::size_t m = 0; m < set_.masks.size(); ++m) {
      std::uint64_t mask = set_.masks[m];
      double zk = (mask >> (k_ - 1)) & 1ULL ? 1.0 : 0.0;
      double y = v[m] - base - zk * gap;
      fill_z2(mask, z2);
      b += set_.weights[m] * y * z2;
    }
    Eigen::VectorXd phi = ldlt_.solve(b);
    std::vector<double> out(k_);
    double sum = 0.0;
    for (std::size_t j = 0; j < k_ - 1; ++j) {
      out[j] = phi(j);
      sum += phi(j);
    }
    out[k_ - 1] = gap - sum;
    for (double p : out) {
      if (!std::isfinite(p)) {
        throw Error(ErrorCode::SolverSingular, "non-finite attribution");
      }
    }
    return out;
  }

 private:
  void fill_z2(std::uint64_t mask, Eigen::VectorXd& z2) const {
    double zk = (mask >> (k_ - 1)) & 1ULL ? 1.0 : 0.0;
    for (std::size_t j = 0; j < k_ - 1; ++j) {
      z2(j) = ((mask >> j) & 1ULL ? 1.0 : 0.0) - zk;
    }
  }

  void factor(const Eigen::MatrixXd& A) {
    ldlt_.compute(A);
    healthy_ = ldlt_.info() == Eigen::Success;
    if (healthy_ && A.rows() > 0) {
      double lo = ldlt_.vectorD().minCoeff();
      double hi = std::max(ldlt_.vectorD().maxCoeff(), 1e-300);
      healthy_ = lo > hi * 1e-14;
    }
  }

  const MaskSet& set_;
  std::size_t k_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  bool healthy_ = false;
};

}  // namespace

std::vector<double> kernel_wls_solve(std::span<const std::uint64_t> masks,
                                     std::span<const double> weights, std::size_t k,
                                     std::span<const double> v, double base, double fx) {
  MaskSet set;
  set.masks.assign(masks.begin(), masks.end());
  set.weights.assign(weights.begin(), weights.end());
  KernelSystem system(set, k);
  return system.solve(v, base, fx);
}

}  // namespace detail

Attribution explain(const Predictor& m, const Matrix& X, const Background& bg,
                    const ShapConfig& config) {
  std::size_t k = m.feature_count();
  if (X.cols() != k || bg.rows.cols() != k) {
    throw Error(ErrorCode::DimensionMismatch, "feature counts disagree");
  }
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "no features");
  if (k > 62) throw Error(ErrorCode::TooManyFeatures, "K > 62 unsupported");

  std::size_t n = X.rows();
  std::size_t B = bg.size();

  Attribution out;
  out.values = Matrix(n, k);

  std::vector<double> bg_pred(B);
  m.predict_proba1(bg.rows, bg_pred);
  double base = 0.0;
  for (double p : bg_pred) base += p;
  base /= static_cast<double>(B);
  out.base = base;

  std::vector<double> fx(n);
  m.predict_proba1(X, fx);

  if (k == 1) {
    for (std::size_t i = 0; i < n; ++i) out.values(i, 0) = fx[i] - base;
    return out;
  }

  detail::MaskSet set;
  bool enumerated = k <= config.enumeration_threshold;
  if (enumerated) {
    set = detail::enumerate_masks(k);
  } else {
    if (config.nsamples < 2 * k + 4) {
      throw Error(ErrorCode::InvalidArgument, "nsamples must be >= 2K+4");
    }
    set = detail::sample_masks(k, config.nsamples, config.seed);
  }
  detail::KernelSystem system(set, k);

  std::size_t n_masks = set.masks.size();
  std::size_t chunk = std::max<std::size_t>(1, 65536 / std::max<std::size_t>(1, B));
  chunk = std::min(chunk, n_masks);
  Matrix buffer(chunk * B, k);
  std::vector<double> pred(chunk * B);
  std::vector<double> v(n_masks);

  for (std::size_t i = 0; i < n; ++i) {
    const double* x = X.data() + i * k;
    for (std::size_t start = 0; start < n_masks; start += chunk) {
      std::size_t count = std::min(chunk, n_masks - start);
      for (std::size_t mi = 0; mi < count; ++mi) {
        std::uint64_t mask = set.masks[start + mi];
        for (std::size_t b = 0; b < B; ++b) {
          double* row = buffer.data() + (mi * B + b) * k;
          const double* bg_row = bg.rows.data() + b * k;
          for (std::size_t j = 0; j < k; ++j) {
            row[j] = (mask >> j) & 1ULL ? x[j] : bg_row[j];
          }
        }
      }
      if (count == chunk) {
        m.predict_proba1(buffer, pred);
      } else {
        Matrix tail(count * B, k);
        std::copy(buffer.data(), buffer.data() + count * B * k, tail.data());
        pred.resize(count * B);
        m.predict_proba1(tail, pred);
        pred.resize(chunk * B);
      }
      for (std::size_t mi = 0; mi < count; ++mi) {
        double s = 0.0;
        for (std::size_t b = 0; b < B; ++b) s += pred[mi * B + b];
        v[start + mi] = s / static_cast<double>(B);
      }
    }
    std::vector<double> phi = system.solve(v, base, fx[i]);
    for (std::size_t j = 0; j < k; ++j) out.values(i, j) = phi[j];
  }
  return out;
}

std::vector<double> exact_shapley_oracle(const Predictor& m, std::span<const double> x,
                                         const Background& bg) {
  std::size_t k = m.feature_count();
  if (k > 12) throw Error(ErrorCode::TooManyFeatures, "oracle limited to K <= 12");
  if (x.size() != k || bg.rows.cols() != k) {
    throw Error(ErrorCode::DimensionMismatch, "feature counts disagree");
  }
  std::size_t B = bg.size();
  std::size_t n_masks = 1ULL << k;

  // coalition values, including empty and full
  std::vector<double> v(n_masks);
  Matrix rows(B, k);
  std::vector<double> pred(B);
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t j = 0; j < k; ++j) {
        rows(b, j) = (mask >> j) & 1ULL ? x[j] : bg.rows(b, j);
      }
    }
    m.predict_proba1(rows, pred);
    double s = 0.0;
    for (double p : pred) s += p;
    v[mask] = s / static_cast<double>(B);
  }

  std::vector<double> factorial(k + 1, 1.0);
  for (std::size_t i = 1; i <= k; ++i) {
    factorial[i] = factorial[i - 1] * static_cast<double>(i);
  }

  std::vector<double> phi(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      if ((mask >> j) & 1ULL) continue;
      std::size_t s = static_cast<std::size_t>(std::popcount(mask));
      double w = factorial[s] * factorial[k - s - 1] / factorial[k];
      phi[j] += w * (v[mask | (1ULL << j)] - v[mask]);
    }
  }
  return phi;
}

GlobalImportance aggregate(const Attribution& a) {
  if (a.values.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "no instances to aggregate");
  }
  GlobalImportance g;
  g.per_feature.assign(a.values.cols(), 0.0);
  for (std::size_t i = 0; i < a.values.rows(); ++i) {
    for (std::size_t j = 0; j < a.values.cols(); ++j) {
      g.per_feature[j] += std::abs(a.values(i, j));
    }
  }
  for (auto& v : g.per_feature) v /= static_cast<double>(a.values.rows());
  return g;
}

}  // namespace rashomon
