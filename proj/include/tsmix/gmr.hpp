#pragma once

#include <vector>

#include "tsmix/gaussians.hpp"
#include "tsmix/kernels.hpp"

namespace tsmix {

/// Gaussian mixture regression over a fixed joint model and input/output
/// split. The conditional covariances and gains do not depend on the
/// query, so they are computed once at construction.
class GmrRegressor {
public:
  GmrRegressor(MixtureModel joint, DimensionSplit split);

  const MixtureModel &joint() const { return joint_; }
  const DimensionSplit &split() const { return split_; }
  Index input_dim() const { return static_cast<Index>(split_.input().size()); }
  Index output_dim() const { return static_cast<Index>(split_.output().size()); }

  /// Multimodal conditional: components N(mu_k^O(x), Sigma_k^O) weighted by
  /// h_k(x). Throws FarFromSupportError when every input density is below
  /// 1e-300.
  MixtureModel conditional(const Vec &x_in) const;
  /// Moment-matched conditional.
  Gaussian unimodal(const Vec &x_in) const;
  /// Responsibilities h_k(x_in).
  Vec responsibilities(const Vec &x_in) const;

  struct Batch {
    Mat means;                // N x O
    std::vector<Mat> covs;    // N of O x O
    Mat responsibilities;     // N x K
  };
  /// Moment-matched predictions for each query row.
  Batch predict(const Mat &queries) const;

  const std::vector<kernels::RegressionTerm> &terms() const { return terms_; }

private:
  void check_support(double max_log_density) const;

  MixtureModel joint_;
  DimensionSplit split_;
  std::vector<kernels::RegressionTerm> terms_;
};

/// log(1e-300): the far-from-support threshold on max_k log N(x|mu_k^I, Sigma_k^I).
inline constexpr double kFarFromSupportLogDensity = -690.77552789821368;

/// x + dt * E[xdot | x] for a joint model over (x, xdot) with positions in
/// dims [0, D) and velocities in [D, 2D).
Vec gmr_dynamics_step(const GmrRegressor &dynamics, const Vec &x, double dt);

/// Builds the position/velocity regressor for a 2D-dimensional joint model.
GmrRegressor dynamics_regressor(const MixtureModel &joint);

/// Iterates gmr_dynamics_step; returns (steps + 1) x D positions.
Mat synthesize(const GmrRegressor &dynamics, const Vec &x0, double dt, int steps);

} // namespace tsmix
