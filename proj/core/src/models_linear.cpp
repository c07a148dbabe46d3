#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "model_impls.hpp"
#include "rashomon/errors.hpp"

namespace rashomon {

namespace detail {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

void LinearScoreModel::predict_raw(const Matrix& X, std::span<double> out) const {
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double* row = X.data() + i * X.cols();
    double z = b;
    for (std::size_t j = 0; j < X.cols(); ++j) z += w[j] * row[j];
    out[i] = sigmoid(z);
  }
}

void LinearScoreModel::save(ModelState& state) const {
  state.arrays["w"] = w;
  state.arrays["b"] = {b};
}

std::shared_ptr<const FittedModel> LinearScoreModel::from_state(const ModelState& state) {
  auto m = std::make_shared<LinearScoreModel>();
  m->w = state.arrays.at("w");
  m->b = state.arrays.at("b").at(0);
  return m;
}

}  // namespace detail

namespace {

double stable_log1pexp(double z) {
  // log(1 + exp(z)) without overflow
  if (z > 35.0) return z;
  if (z < -35.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

}  // namespace

double logreg_loss(const Matrix& X, const std::vector<int>& y,
                   std::span<const double> w, double l2) {
  if (w.size() != X.cols()) throw Error(ErrorCode::DimensionMismatch, "w size");
  double loss = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double* row = X.data() + i * X.cols();
    double z = 0.0;
    for (std::size_t j = 0; j < X.cols(); ++j) z += w[j] * row[j];
    loss += stable_log1pexp(z) - static_cast<double>(y[i]) * z;
  }
  loss /= static_cast<double>(X.rows());
  double penalty = 0.0;
  for (std::size_t j = 1; j < w.size(); ++j) penalty += w[j] * w[j];
  return loss + 0.5 * l2 * penalty;
}

std::vector<double> logreg_gradient(const Matrix& X, const std::vector<int>& y,
                                    std::span<const double> w, double l2) {
  if (w.size() != X.cols()) throw Error(ErrorCode::DimensionMismatch, "w size");
  std::vector<double> grad(w.size(), 0.0);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double* row = X.data() + i * X.cols();
    double z = 0.0;
    for (std::size_t j = 0; j < X.cols(); ++j) z += w[j] * row[j];
    double resid = detail::sigmoid(z) - static_cast<double>(y[i]);
    for (std::size_t j = 0; j < X.cols(); ++j) grad[j] += resid * row[j];
  }
  double inv_n = 1.0 / static_cast<double>(X.rows());
  for (auto& g : grad) g *= inv_n;
  for (std::size_t j = 1; j < w.size(); ++j) grad[j] += l2 * w[j];
  return grad;
}

namespace detail {

namespace {

Matrix with_bias_column(const Matrix& X) {
  Matrix out(X.rows(), X.cols() + 1);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    out(i, 0) = 1.0;
    for (std::size_t j = 0; j < X.cols(); ++j) out(i, j + 1) = X(i, j);
  }
  return out;
}

double grad_norm(const std::vector<double>& g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

Fitted linear_from_weights(const std::vector<double>& w_aug) {
  auto m = std::make_shared<LinearScoreModel>();
  m->b = w_aug[0];
  m->w.assign(w_aug.begin() + 1, w_aug.end());
  return m;
}

}  // namespace

Fitted fit_lr(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y,
              std::vector<std::string>& warnings) {
  double l2 = hyper(spec, "l2");
  Matrix A = with_bias_column(X);
  std::size_t p = A.cols();
  std::vector<double> w(p, 0.0);

  const double tol = 1e-6;
  const std::size_t max_iter = 1000;
  bool converged = false;

  double loss = logreg_loss(A, y, w, l2);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    std::vector<double> g = logreg_gradient(A, y, w, l2);
    if (grad_norm(g) <= tol) {
      converged = true;
      break;
    }

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t i = 0; i < A.rows(); ++i) {
      const double* row = A.data() + i * p;
      double z = 0.0;
      for (std::size_t j = 0; j < p; ++j) z += w[j] * row[j];
      double s = sigmoid(z);
      double wt = s * (1.0 - s);
      for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j; k < p; ++k) H(j, k) += wt * row[j] * row[k];
      }
    }
    H /= static_cast<double>(A.rows());
    for (std::size_t j = 1; j < p; ++j) H(j, j) += l2;
    for (std::size_t j = 0; j < p; ++j) H(j, j) += 1e-10;
    H = H.selfadjointView<Eigen::Upper>();

    Eigen::VectorXd gv(p);
    for (std::size_t j = 0; j < p; ++j) gv(j) = g[j];
    Eigen::VectorXd step = H.ldlt().solve(gv);

    double eta = 1.0;
    std::vector<double> trial(p);
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      for (std::size_t j = 0; j < p; ++j) trial[j] = w[j] - eta * step(j);
      double trial_loss = logreg_loss(A, y, trial, l2);
      if (trial_loss <= loss - 1e-12) {
        w = trial;
        loss = trial_loss;
        accepted = true;
        break;
      }
      eta /= 2.0;
    }
    if (!accepted) {
      converged = grad_norm(logreg_gradient(A, y, w, l2)) <= 1e-4;
      break;
    }
  }
  if (!converged) {
    std::vector<double> g = logreg_gradient(A, y, w, l2);
    if (grad_norm(g) > tol) {
      warnings.push_back("NonConvergence: lr gradient norm " +
                         std::to_string(grad_norm(g)));
    }
  }
  return linear_from_weights(w);
}

Fitted fit_ridge(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y) {
  double l2 = hyper(spec, "l2");
  Matrix A = with_bias_column(X);
  std::size_t p = A.cols();
  std::size_t n = A.rows();

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      Am(A.data(), n, p);
  Eigen::VectorXd t(n);
  for (std::size_t i = 0; i < n; ++i) t(i) = y[i] == 1 ? 1.0 : -1.0;

  Eigen::MatrixXd gram = Am.transpose() * Am;
  for (std::size_t j = 1; j < p; ++j) gram(j, j) += static_cast<double>(n) * l2;
  gram(0, 0) += 1e-12;
  Eigen::VectorXd beta = gram.ldlt().solve(Am.transpose() * t);

  std::vector<double> w(p);
  for (std::size_t j = 0; j < p; ++j) w[j] = beta(j);
  return linear_from_weights(w);
}

Fitted fit_svm(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y,
               std::vector<std::string>& warnings) {
  double l2 = hyper(spec, "l2");
  Matrix A = with_bias_column(X);
  std::size_t p = A.cols();
  std::size_t n = A.rows();

  auto objective = [&](const std::vector<double>& w) {
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = A.data() + i * p;
      double z = 0.0;
      for (std::size_t j = 0; j < p; ++j) z += w[j] * row[j];
      double yi = y[i] == 1 ? 1.0 : -1.0;
      double margin = 1.0 - yi * z;
      if (margin > 0.0) obj += margin * margin;
    }
    obj /= static_cast<double>(n);
    for (std::size_t j = 1; j < p; ++j) obj += 0.5 * l2 * w[j] * w[j];
    return obj;
  };
  auto gradient = [&](const std::vector<double>& w) {
    std::vector<double> g(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = A.data() + i * p;
      double z = 0.0;
      for (std::size_t j = 0; j < p; ++j) z += w[j] * row[j];
      double yi = y[i] == 1 ? 1.0 : -1.0;
      double margin = 1.0 - yi * z;
      if (margin > 0.0) {
        double c = -2.0 * margin * yi;
        for (std::size_t j = 0; j < p; ++j) g[j] += c * row[j];
      }
    }
    double inv_n = 1.0 / static_cast<double>(n);
    for (auto& v : g) v *= inv_n;
    for (std::size_t j = 1; j < p; ++j) g[j] += l2 * w[j];
    return g;
  };

  std::vector<double> w(p, 0.0);
  double obj = objective(w);
  const double tol = 1e-6;
  bool converged = false;
  for (std::size_t iter = 0; iter < 2000; ++iter) {
    std::vector<double> g = gradient(w);
    double gn = grad_norm(g);
    if (gn <= tol) {
      converged = true;
      break;
    }
    double eta = 1.0;
    std::vector<double> trial(p);
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t j = 0; j < p; ++j) trial[j] = w[j] - eta * g[j];
      double trial_obj = objective(trial);
      if (trial_obj <= obj - 1e-4 * eta * gn * gn) {
        w = trial;
        obj = trial_obj;
        accepted = true;
        break;
      }
      eta /= 2.0;
    }
    if (!accepted) break;
  }
  if (!converged && grad_norm(gradient(w)) > 1e-3) {
    warnings.push_back("NonConvergence: svm gradient norm " +
                       std::to_string(grad_norm(gradient(w))));
  }
  return linear_from_weights(w);
}

}  // namespace detail
}  // namespace rashomon
