#pragma once

#include <vector>

#include "tsmix/gaussians.hpp"

namespace tsmix {

/// Radial basis functions exp(-0.5 (x - mu_k)^T Sigma_k^{-1} (x - mu_k)),
/// optionally rescaled to a partition of unity.
class RbfSet {
public:
  RbfSet(std::vector<Vec> centers, std::vector<Mat> bandwidths, bool rescaled);
  /// K centers spread uniformly over [lo, hi] (1-D input) with the shared
  /// isotropic bandwidth ((hi - lo) / K)^2.
  static RbfSet uniform(double lo, double hi, int count, bool rescaled = true);

  Index size() const { return static_cast<Index>(centers_.size()); }
  Index dim() const { return centers_.front().size(); }
  bool rescaled() const { return rescaled_; }
  const std::vector<Vec> &centers() const { return centers_; }
  const std::vector<Mat> &bandwidths() const { return bandwidths_; }
  const std::vector<Mat> &factors() const { return lowers_; }

  /// Activations at x: unnormalized values in (0, 1], or, when rescaled,
  /// normalized in the log domain so they sum to 1 even when every raw
  /// activation underflows.
  Vec activations(const Vec &x) const;
  Vec activations(const Vec &x, bool rescaled) const;

private:
  std::vector<Vec> centers_;
  std::vector<Mat> bandwidths_;
  std::vector<Mat> lowers_;
  bool rescaled_;
};

/// (X^T W X + ridge I)^{-1} X^T W Y with W = diag(weights).
/// Throws SingularSystemError when the normal matrix is rank deficient.
Mat weighted_least_squares(const Mat &x_in, const Mat &x_out, const Vec &weights, double ridge);

/// Polynomial features [1, u, u^2, ..., u^degree] per input dimension, no
/// cross terms; ordering is by power, then dimension.
Vec polynomial_features(const Vec &u, int degree);

class LwrModel {
public:
  LwrModel(RbfSet rbfs, std::vector<Mat> coefficients, int degree);

  const RbfSet &rbfs() const { return rbfs_; }
  const std::vector<Mat> &coefficients() const { return coefficients_; }
  int degree() const { return degree_; }
  Index input_dim() const { return rbfs_.dim(); }
  Index output_dim() const { return coefficients_.front().cols(); }

  /// Local features of basis k: polynomial_features of the input centred on
  /// mu_k and scaled by the per-dimension bandwidth standard deviation.
  Vec local_features(Index k, const Vec &x) const;

  /// sum_k phi_k(x) features_k(x)^T A_k with rescaled activations.
  Vec predict(const Vec &x) const;
  /// Row-wise prediction through the parallel kernel.
  Mat predict_batch(const Mat &queries) const;

private:
  RbfSet rbfs_;
  std::vector<Mat> coefficients_;
  int degree_;
  std::vector<Vec> scales_;
};

/// Default ridge: 1e-12 * N.
double default_lwr_ridge(Index num_points);

/// K weighted regressions, each weighted by one RBF's activations (rescaled
/// or not, per rbfs.rescaled()).
LwrModel lwr_fit(const Mat &x_in, const Mat &x_out, const RbfSet &rbfs, int degree, double ridge);

} // namespace tsmix
