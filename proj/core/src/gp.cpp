/*
 * Copyright 2026 the paratune authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "paratune/gp.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace paratune {
namespace {

// Dense kernel matrix over the rows of A and B.
Eigen::MatrixXd kernel_matrix(const KernelParams& params,
                              const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B) {
  const double inv = 1.0 / (2.0 * params.length_scale * params.length_scale);
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      K(i, j) = params.signal_variance *
                std::exp(-(A.row(i) - B.row(j)).squaredNorm() * inv);
    }
  }
  return K;
}

constexpr double kJitterScale = 1e-6;
constexpr int kJitterRetries = 3;

}  // namespace

double kernel_eval(const KernelParams& params, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("kernel arguments differ in dimension");
  }
  const double sq = (a - b).squaredNorm();
  return params.signal_variance *
         std::exp(-sq / (2.0 * params.length_scale * params.length_scale));
}

GaussianProcess::GaussianProcess(KernelParams params)
    : params_(params), jitter_(kJitterScale * params.signal_variance) {}

void GaussianProcess::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) {
    throw std::invalid_argument("fit got " + std::to_string(X.rows()) +
                                " points but " + std::to_string(y.size()) +
                                " targets");
  }
  if (!y.allFinite() || !X.allFinite()) {
    throw std::invalid_argument("fit requires finite points and targets");
  }

  X_ = X;
  y_raw_ = y;
  hallucinated_count_ = 0;

  y_mean_ = y.size() > 0 ? y.mean() : 0.0;
  y_std_ = 1.0;
  if (y.size() >= 2) {
    const double var =
        (y.array() - y_mean_).square().sum() / double(y.size() - 1);
    const double sd = std::sqrt(var);
    if (sd >= 1e-12) {
      y_std_ = sd;
    }
  }
  y_centered_ = (y.array() - y_mean_) / y_std_;

  factorize();
}

void GaussianProcess::factorize() {
  const Eigen::Index n = X_.rows();
  if (n == 0) {
    L_.resize(0, 0);
    alpha_.resize(0);
    jitter_ = kJitterScale * params_.signal_variance;
    return;
  }
  const Eigen::MatrixXd K = kernel_matrix(params_, X_, X_);

  double jitter = kJitterScale * params_.signal_variance;
  for (int attempt = 0;; ++attempt) {
    Eigen::MatrixXd Kn = K;
    Kn.diagonal().array() += params_.noise_variance + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(Kn);
    if (llt.info() == Eigen::Success) {
      L_ = llt.matrixL();
      jitter_ = jitter;
      break;
    }
    if (attempt >= kJitterRetries) {
      throw SingularKernelError(
          "kernel matrix of order " + std::to_string(n) +
          " is not positive definite after jitter escalation");
    }
    jitter *= 10.0;
  }

  alpha_ = L_.triangularView<Eigen::Lower>().solve(y_centered_);
  L_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
}

Posterior GaussianProcess::posterior(const Eigen::VectorXd& x) const {
  const Eigen::Index n = X_.rows();
  Posterior post;
  if (n == 0) {
    post.mean = y_mean_;
    post.variance = y_std_ * y_std_ * params_.signal_variance;
    return post;
  }
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ks[i] = kernel_eval(params_, X_.row(i), x);
  }
  post.mean = y_mean_ + y_std_ * ks.dot(alpha_);
  const Eigen::VectorXd v = L_.triangularView<Eigen::Lower>().solve(ks);
  const double reduced = params_.signal_variance - v.squaredNorm();
  post.variance = y_std_ * y_std_ * std::max(reduced, 0.0);
  return post;
}

void GaussianProcess::posterior(const Eigen::MatrixXd& X, Eigen::VectorXd& mean,
                                Eigen::VectorXd& variance) const {
  const Eigen::Index m = X.rows();
  if (X_.rows() == 0) {
    mean = Eigen::VectorXd::Constant(m, y_mean_);
    variance = Eigen::VectorXd::Constant(
        m, y_std_ * y_std_ * params_.signal_variance);
    return;
  }
  const Eigen::MatrixXd Ks = kernel_matrix(params_, X_, X);  // n x m
  mean = (y_std_ * (Ks.transpose() * alpha_)).array() + y_mean_;
  const Eigen::MatrixXd V = L_.triangularView<Eigen::Lower>().solve(Ks);
  variance = (params_.signal_variance - V.colwise().squaredNorm().array())
                 .max(0.0)
                 .transpose() *
             (y_std_ * y_std_);
}

void GaussianProcess::add_hallucinated(const Eigen::VectorXd& x) {
  const Posterior at = posterior(x);

  const Eigen::Index n = X_.rows();
  if (n == 0) {
    X_.resize(1, x.size());
  } else {
    X_.conservativeResize(n + 1, Eigen::NoChange);
  }
  X_.row(n) = x.transpose();
  y_raw_.conservativeResize(n + 1);
  y_raw_[n] = at.mean;
  y_centered_.conservativeResize(n + 1);
  y_centered_[n] = (at.mean - y_mean_) / y_std_;
  ++hallucinated_count_;

  factorize();
}

double log_marginal_likelihood(const KernelParams& params,
                               const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y) {
  if (X.rows() == 0 || X.rows() != y.size()) {
    throw std::invalid_argument(
        "log marginal likelihood needs matching, non-empty points and "
        "targets");
  }
  Eigen::MatrixXd Kn = kernel_matrix(params, X, X);
  Kn.diagonal().array() += params.noise_variance;
  Eigen::LLT<Eigen::MatrixXd> llt(Kn);
  if (llt.info() != Eigen::Success) {
    throw SingularKernelError(
        "kernel matrix is not positive definite at the requested "
        "hyperparameters");
  }
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::VectorXd v = L.triangularView<Eigen::Lower>().solve(y);
  const double n = static_cast<double>(y.size());
  return -0.5 * v.squaredNorm() - L.diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

KernelParams select_kernel_params(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y) {
  KernelParams params;  // defaults double as the degenerate answer
  if (y.size() < 2 || X.rows() != y.size()) {
    return params;
  }
  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() / double(y.size() - 1);
  const double sd = std::sqrt(var);
  if (sd < 1e-12) {
    return params;
  }
  const Eigen::VectorXd z = (y.array() - mean) / sd;

  double best_lml = -std::numeric_limits<double>::infinity();
  double best_ls = params.length_scale;
  for (double ls : kLengthScaleGrid) {
    const KernelParams trial{ls, 1.0, 1e-6};
    double lml;
    try {
      lml = log_marginal_likelihood(trial, X, z);
    } catch (const SingularKernelError&) {
      continue;  // skip scales the data cannot support
    }
    if (lml > best_lml) {
      best_lml = lml;
      best_ls = ls;
    }
  }
  params.length_scale = best_ls;
  return params;
}

}  // namespace paratune
