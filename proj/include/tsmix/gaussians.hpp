#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tsmix/errors.hpp"

namespace tsmix {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Scale-aware diagonal loading: 1e-8 * trace(cov) / D.
double covariance_regularizer(const Mat &cov);

/// Cholesky factor of a regularized covariance, cached for repeated
/// density evaluations and solves.
class CovFactor {
public:
  /// Throws DegenerateCovarianceError if cov + regularizer is not PD.
  explicit CovFactor(const Mat &cov);

  Index dim() const { return lower_.rows(); }
  const Mat &lower() const { return lower_; }
  double log_det() const { return log_det_; }
  /// -0.5 * (D log(2 pi) + log|cov|)
  double log_normalizer() const;

  double mahalanobis_squared(const Vec &diff) const;
  Mat solve(const Mat &rhs) const;

private:
  Mat lower_;
  double log_det_ = 0.0;
};

class Gaussian {
public:
  Gaussian() = default;
  /// Validates shape and symmetry (1e-12 relative); stores the symmetrized
  /// covariance. Positive definiteness is only required when a density or
  /// solve is requested.
  Gaussian(Vec mean, Mat cov);

  Index dim() const { return mean_.size(); }
  const Vec &mean() const { return mean_; }
  const Mat &cov() const { return cov_; }

  double log_pdf(const Vec &x) const;
  double pdf(const Vec &x) const;

private:
  Vec mean_;
  Mat cov_;
};

class MixtureModel {
public:
  MixtureModel() = default;
  /// Priors must be nonnegative and sum to 1 within 1e-12.
  MixtureModel(Vec priors, std::vector<Gaussian> components);
  /// Normalizes arbitrary nonnegative weights before construction.
  static MixtureModel from_weights(const Vec &weights, std::vector<Gaussian> components);

  Index dim() const { return components_.empty() ? 0 : components_.front().dim(); }
  Index size() const { return static_cast<Index>(components_.size()); }
  const Vec &priors() const { return priors_; }
  const std::vector<Gaussian> &components() const { return components_; }
  const Gaussian &component(Index k) const { return components_[static_cast<std::size_t>(k)]; }

  double log_pdf(const Vec &x) const;
  double pdf(const Vec &x) const;

private:
  Vec priors_;
  std::vector<Gaussian> components_;
};

/// Disjoint input/output index sets into a D-dimensional vector.
class DimensionSplit {
public:
  DimensionSplit(std::vector<int> input_dims, std::vector<int> output_dims, Index dim);

  const std::vector<int> &input() const { return input_; }
  const std::vector<int> &output() const { return output_; }
  Index dim() const { return dim_; }

private:
  std::vector<int> input_;
  std::vector<int> output_;
  Index dim_;
};

/// N(A mu + b, A Sigma A^T)
Gaussian linear_transform(const Gaussian &g, const Mat &a, const Vec &b);
Gaussian linear_transform(const Gaussian &g, const Mat &a);

/// Conditional of the output block given the input block equal to x_in.
Gaussian condition(const Gaussian &g, const DimensionSplit &split, const Vec &x_in);

/// Law of total mean and covariance.
Gaussian moment_match(const MixtureModel &m);

enum class EmInit { binning, kmeans_pp };

struct EmConfig {
  EmInit init = EmInit::binning;
  /// Stop once (L_t - L_{t-1}) < tol * |L_{t-1}|.
  double tol = 1e-10;
  int max_iter = 500;
  std::uint64_t seed = 0;
  /// A component whose responsibility mass falls below empty_fraction * N
  /// is re-seeded.
  double empty_fraction = 1e-8;
};

struct EmDiagnostics {
  /// Log-likelihood of the parameters entering each iteration.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
  /// Iterations (indices into log_likelihood) at whose M-step a component
  /// was re-seeded; monotonicity is not guaranteed across those.
  std::vector<int> reseed_iterations;
};

struct EmResult {
  MixtureModel model;
  EmDiagnostics diagnostics;
};

/// Expectation-maximization with full covariances. Rows of data are points.
EmResult em_fit(const Mat &data, int num_components, const EmConfig &config = {});

/// Log-likelihood sum_n log sum_k pi_k N(x_n | k).
double log_likelihood(const MixtureModel &m, const Mat &data);

/// n draws (rows). Deterministic for a fixed seed.
Mat sample(const MixtureModel &m, Index n, std::uint64_t seed);
Mat sample(const Gaussian &g, Index n, std::uint64_t seed);

/// Symmetric square root factor S with S S^T = cov; falls back to an
/// eigendecomposition for PSD rank-deficient covariances.
Mat covariance_sqrt(const Mat &cov);

} // namespace tsmix
