#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "model_impls.hpp"
#include "rashomon/errors.hpp"

namespace rashomon::detail {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

struct ClassStats {
  std::vector<std::size_t> rows0, rows1;
  Eigen::VectorXd mean0, mean1;
  double prior1 = 0.5;
};

ClassStats class_stats(const Matrix& X, const std::vector<int>& y) {
  ClassStats s;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    (y[i] == 1 ? s.rows1 : s.rows0).push_back(i);
  }
  std::size_t k = X.cols();
  s.mean0 = Eigen::VectorXd::Zero(k);
  s.mean1 = Eigen::VectorXd::Zero(k);
  for (std::size_t i : s.rows0) {
    for (std::size_t j = 0; j < k; ++j) s.mean0(j) += X(i, j);
  }
  for (std::size_t i : s.rows1) {
    for (std::size_t j = 0; j < k; ++j) s.mean1(j) += X(i, j);
  }
  if (!s.rows0.empty()) s.mean0 /= static_cast<double>(s.rows0.size());
  if (!s.rows1.empty()) s.mean1 /= static_cast<double>(s.rows1.size());
  s.prior1 = static_cast<double>(s.rows1.size()) / static_cast<double>(X.rows());
  return s;
}

void apply_shrinkage(Eigen::MatrixXd& cov, double gamma) {
  if (gamma <= 0.0) return;
  std::size_t k = cov.rows();
  double mu = cov.trace() / static_cast<double>(k);
  cov = (1.0 - gamma) * cov;
  for (std::size_t j = 0; j < k; ++j) cov(j, j) += gamma * mu;
}

// Inverts a covariance matrix, adding ridge mass until it is positive
// definite. Returns the inverse and log determinant; sets `repaired` when
// ridge repair was needed.
void invert_covariance(Eigen::MatrixXd cov, Eigen::MatrixXd& inv, double& logdet,
                       bool& repaired) {
  std::size_t k = cov.rows();
  double scale = std::max(cov.trace() / static_cast<double>(k), 0.0);
  double ridge = 1e-4 * (1.0 + scale);
  for (int attempt = 0; attempt <= 8; ++attempt) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() == Eigen::Success) {
      double lo = eig.eigenvalues().minCoeff();
      double hi = std::max(eig.eigenvalues().maxCoeff(), 1e-300);
      if (lo > 1e-10 * hi && lo > 0.0) {
        inv = eig.eigenvectors() *
              eig.eigenvalues().cwiseInverse().asDiagonal() *
              eig.eigenvectors().transpose();
        logdet = eig.eigenvalues().array().log().sum();
        return;
      }
    }
    repaired = true;
    for (std::size_t j = 0; j < k; ++j) cov(j, j) += ridge;
    ridge *= 10.0;
  }
  throw Error(ErrorCode::SingularCovariance, "covariance not repairable");
}

}  // namespace

void NbModel::predict_raw(const Matrix& X, std::span<double> out) const {
  std::size_t k = mean0.size();
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double* row = X.data() + i * k;
    double ll0 = log_prior0, ll1 = log_prior1;
    for (std::size_t j = 0; j < k; ++j) {
      double d0 = row[j] - mean0[j];
      double d1 = row[j] - mean1[j];
      ll0 -= 0.5 * (kLog2Pi + std::log(var0[j]) + d0 * d0 / var0[j]);
      ll1 -= 0.5 * (kLog2Pi + std::log(var1[j]) + d1 * d1 / var1[j]);
    }
    out[i] = sigmoid(ll1 - ll0);
  }
}

void NbModel::save(ModelState& state) const {
  state.arrays["mean0"] = mean0;
  state.arrays["var0"] = var0;
  state.arrays["mean1"] = mean1;
  state.arrays["var1"] = var1;
  state.arrays["log_priors"] = {log_prior0, log_prior1};
}

std::shared_ptr<const FittedModel> NbModel::from_state(const ModelState& state) {
  auto m = std::make_shared<NbModel>();
  m->mean0 = state.arrays.at("mean0");
  m->var0 = state.arrays.at("var0");
  m->mean1 = state.arrays.at("mean1");
  m->var1 = state.arrays.at("var1");
  m->log_prior0 = state.arrays.at("log_priors").at(0);
  m->log_prior1 = state.arrays.at("log_priors").at(1);
  return m;
}

void QdaModel::predict_raw(const Matrix& X, std::span<double> out) const {
  Eigen::Map<const Eigen::MatrixXd> I0(icov0.data(), k, k);
  Eigen::Map<const Eigen::MatrixXd> I1(icov1.data(), k, k);
  Eigen::Map<const Eigen::VectorXd> m0(mean0.data(), k);
  Eigen::Map<const Eigen::VectorXd> m1(mean1.data(), k);
  Eigen::VectorXd x(k);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t j = 0; j < k; ++j) x(j) = X(i, j);
    Eigen::VectorXd d0 = x - m0;
    Eigen::VectorXd d1 = x - m1;
    double s0 = -0.5 * logdet0 - 0.5 * d0.dot(I0 * d0) + log_prior0;
    double s1 = -0.5 * logdet1 - 0.5 * d1.dot(I1 * d1) + log_prior1;
    out[i] = sigmoid(s1 - s0);
  }
}

void QdaModel::save(ModelState& state) const {
  state.arrays["mean0"] = mean0;
  state.arrays["mean1"] = mean1;
  state.arrays["icov0"] = icov0;
  state.arrays["icov1"] = icov1;
  state.arrays["scalars"] = {static_cast<double>(k), logdet0, logdet1,
                             log_prior0, log_prior1};
}

std::shared_ptr<const FittedModel> QdaModel::from_state(const ModelState& state) {
  auto m = std::make_shared<QdaModel>();
  m->mean0 = state.arrays.at("mean0");
  m->mean1 = state.arrays.at("mean1");
  m->icov0 = state.arrays.at("icov0");
  m->icov1 = state.arrays.at("icov1");
  const auto& s = state.arrays.at("scalars");
  m->k = static_cast<std::size_t>(s.at(0));
  m->logdet0 = s.at(1);
  m->logdet1 = s.at(2);
  m->log_prior0 = s.at(3);
  m->log_prior1 = s.at(4);
  return m;
}

Fitted fit_nb(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y) {
  double smoothing = hyper(spec, "var_smoothing");
  ClassStats s = class_stats(X, y);
  std::size_t k = X.cols();

  // sklearn-style floor: var_smoothing times the largest feature variance
  double max_var = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) mean += X(i, j);
    mean /= static_cast<double>(X.rows());
    double var = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
      double d = X(i, j) - mean;
      var += d * d;
    }
    max_var = std::max(max_var, var / static_cast<double>(X.rows()));
  }
  double eps = smoothing * (max_var > 0.0 ? max_var : 1.0);

  auto moments = [&](const std::vector<std::size_t>& rows, const Eigen::VectorXd& mean,
                     std::vector<double>& out_mean, std::vector<double>& out_var) {
    out_mean.resize(k);
    out_var.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) out_mean[j] = mean(j);
    for (std::size_t i : rows) {
      for (std::size_t j = 0; j < k; ++j) {
        double d = X(i, j) - mean(j);
        out_var[j] += d * d;
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      out_var[j] = out_var[j] / static_cast<double>(rows.size()) + eps;
      if (out_var[j] <= 0.0) out_var[j] = smoothing > 0.0 ? smoothing : 1e-12;
    }
  };

  auto m = std::make_shared<NbModel>();
  moments(s.rows0, s.mean0, m->mean0, m->var0);
  moments(s.rows1, s.mean1, m->mean1, m->var1);
  m->log_prior0 = std::log(1.0 - s.prior1);
  m->log_prior1 = std::log(s.prior1);
  return m;
}

Fitted fit_lda(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y,
               bool& repaired) {
  double gamma = hyper(spec, "shrinkage");
  ClassStats s = class_stats(X, y);
  if (s.rows0.empty() || s.rows1.empty()) {
    throw Error(ErrorCode::DegenerateClass, "lda needs both classes");
  }
  std::size_t k = X.cols();
  std::size_t n = X.rows();

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd d(k);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd& mean = y[i] == 1 ? s.mean1 : s.mean0;
    for (std::size_t j = 0; j < k; ++j) d(j) = X(i, j) - mean(j);
    cov.selfadjointView<Eigen::Upper>().rankUpdate(d, 1.0);
  }
  cov = cov.selfadjointView<Eigen::Upper>();
  cov /= std::max<double>(1.0, static_cast<double>(n) - 2.0);
  apply_shrinkage(cov, gamma);

  Eigen::MatrixXd inv;
  double logdet = 0.0;
  invert_covariance(cov, inv, logdet, repaired);

  Eigen::VectorXd w = inv * (s.mean1 - s.mean0);
  double b = -0.5 * (s.mean1.dot(inv * s.mean1) - s.mean0.dot(inv * s.mean0)) +
             std::log(s.prior1 / (1.0 - s.prior1));

  auto m = std::make_shared<LinearScoreModel>();
  m->w.resize(k);
  for (std::size_t j = 0; j < k; ++j) m->w[j] = w(j);
  m->b = b;
  return m;
}

Fitted fit_qda(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y,
               bool& repaired) {
  double gamma = hyper(spec, "shrinkage");
  ClassStats s = class_stats(X, y);
  if (s.rows0.size() < 2 || s.rows1.size() < 2) {
    throw Error(ErrorCode::DegenerateClass, "qda needs >= 2 instances per class");
  }
  std::size_t k = X.cols();

  auto class_cov = [&](const std::vector<std::size_t>& rows,
                       const Eigen::VectorXd& mean) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd d(k);
    for (std::size_t i : rows) {
      for (std::size_t j = 0; j < k; ++j) d(j) = X(i, j) - mean(j);
      cov.selfadjointView<Eigen::Upper>().rankUpdate(d, 1.0);
    }
    cov = Eigen::MatrixXd(cov.selfadjointView<Eigen::Upper>());
    cov /= static_cast<double>(rows.size() - 1);
    apply_shrinkage(cov, gamma);
    return cov;
  };

  auto m = std::make_shared<QdaModel>();
  m->k = k;
  Eigen::MatrixXd inv0, inv1;
  invert_covariance(class_cov(s.rows0, s.mean0), inv0, m->logdet0, repaired);
  invert_covariance(class_cov(s.rows1, s.mean1), inv1, m->logdet1, repaired);

  m->mean0.resize(k);
  m->mean1.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    m->mean0[j] = s.mean0(j);
    m->mean1[j] = s.mean1(j);
  }
  m->icov0.resize(k * k);
  m->icov1.resize(k * k);
  Eigen::Map<Eigen::MatrixXd>(m->icov0.data(), k, k) = inv0;
  Eigen::Map<Eigen::MatrixXd>(m->icov1.data(), k, k) = inv1;
  m->log_prior0 = std::log(1.0 - s.prior1);
  m->log_prior1 = std::log(s.prior1);
  return m;
}

}  // namespace rashomon::detail
