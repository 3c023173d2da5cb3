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

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <stdexcept>

namespace paratune {

/// Raised when the kernel matrix stays numerically singular after the
/// jitter escalation policy is exhausted.
class SingularKernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Isotropic squared-exponential kernel hyperparameters plus the assumed
/// observation noise.
struct KernelParams {
  double length_scale = 0.2;
  double signal_variance = 1.0;
  double noise_variance = 1e-6;

  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

/// k(a, b) = signal_variance * exp(-|a - b|^2 / (2 * length_scale^2)).
double kernel_eval(const KernelParams& params, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b);

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

/// Gaussian-process regressor over points on the unit hypercube.
///
/// A default-constructed instance is the prior: posterior mean 0, variance
/// equal to the signal variance everywhere. Targets are standardized
/// internally: fit() records the sample mean and standard deviation of y
/// (std fixed to 1 when fewer than two observations are given or all targets
/// coincide) and conditions on the standardized values; posterior moments
/// are mapped back to the original units. Factoring the kernel matrix adds a
/// diagonal jitter of 1e-6 * signal_variance, escalating tenfold up to three
/// times before SingularKernelError.
class GaussianProcess {
 public:
  explicit GaussianProcess(KernelParams params = {});

  /// Conditions on (X, y). Rows of X are points; y holds one target per row.
  /// An empty set resets to the prior. Throws std::invalid_argument on a
  /// row/target count mismatch or any non-finite input. Replaces any
  /// previous conditioning, including hallucinated points.
  void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

  /// Posterior mean and variance at one point. The variance is clamped to be
  /// non-negative.
  Posterior posterior(const Eigen::VectorXd& x) const;

  /// Posterior moments for each row of X.
  void posterior(const Eigen::MatrixXd& X, Eigen::VectorXd& mean,
                 Eigen::VectorXd& variance) const;

  /// Appends a pseudo-observation at x whose target equals the current
  /// posterior mean there, then refactors. The posterior mean function is
  /// unchanged; the posterior variance shrinks (never grows) near x.
  /// Standardization statistics are those of the real targets only.
  void add_hallucinated(const Eigen::VectorXd& x);

  const KernelParams& params() const { return params_; }
  /// All conditioning points, real observations first.
  const Eigen::MatrixXd& points() const { return X_; }
  /// Lower-triangular Cholesky factor of K + (noise + jitter) * I.
  const Eigen::MatrixXd& cholesky_factor() const { return L_; }
  /// Diagonal jitter that made the factorization succeed.
  double jitter() const { return jitter_; }
  double target_mean() const { return y_mean_; }
  double target_std() const { return y_std_; }
  /// Unstandardized targets, hallucinated entries included.
  const Eigen::VectorXd& raw_targets() const { return y_raw_; }
  std::size_t observation_count() const {
    return static_cast<std::size_t>(X_.rows()) - hallucinated_count_;
  }
  std::size_t hallucinated_count() const { return hallucinated_count_; }

 private:
  void factorize();

  KernelParams params_;
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_raw_;       // original units, hallucinated included
  Eigen::VectorXd y_centered_;  // standardized units
  Eigen::MatrixXd L_;
  Eigen::VectorXd alpha_;  // (K + (noise + jitter) I)^{-1} y_centered
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  double jitter_ = 0.0;
  std::size_t hallucinated_count_ = 0;
};

/// Exact log marginal likelihood of y under the kernel, with K + noise * I
/// and no extra jitter:
///   -1/2 y^T (K + noise I)^{-1} y - 1/2 log det(K + noise I) - n/2 log 2pi.
double log_marginal_likelihood(const KernelParams& params,
                               const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y);

/// Length scales tried by select_kernel_params, in the order tried.
inline constexpr std::array<double, 5> kLengthScaleGrid = {0.05, 0.1, 0.2,
                                                           0.4, 0.8};

/// Picks the grid length scale maximizing the exact log marginal likelihood
/// of the standardized targets with unit signal variance and noise 1e-6.
/// Ties go to the smaller length scale. With fewer than two observations or
/// degenerate (all-equal) targets the default KernelParams are returned.
KernelParams select_kernel_params(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y);

}  // namespace paratune
