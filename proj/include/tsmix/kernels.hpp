#pragma once

// Data-parallel inner loops. Every kernel exists twice with the same
// signature: kernels::serial is the reference implementation, kernels::omp
// splits the outer (map) loop across OpenMP threads. Each output element is
// computed by the same sequence of floating-point operations in both, so
// results are bitwise identical; reductions across the parallel index are
// left to the caller.

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tsmix::kernels {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// A Gaussian term prepared for log-density evaluation:
/// log_weight - 0.5 * |lower^{-1} (x - mean)|^2.
struct GaussianTerm {
  Vec mean;
  Mat lower;          // Cholesky factor of the (regularized) covariance
  double log_weight;  // log prior + log normalizer
};

/// out(n, k) = log_weight_k - 0.5 * mahalanobis^2(x_n, k). Rows of points.
/// out is resized to N x K.
void log_density_table(const Mat &points, std::span<const GaussianTerm> terms, Mat &out);

/// A weighted Gaussian of the un-mirrored target density.
struct SpectralComponent {
  double weight;
  Vec mean;
  Mat cov;
};

/// Analytic cosine-series coefficients of the mirrored mixture over the
/// flat index set {0..K-1}^D (row-major, last dimension fastest).
/// `signs` holds the 2^(D-1) sign patterns used (one per row, entries +-1).
void mirrored_gmm_coeffs(std::span<const SpectralComponent> components, const Mat &signs,
                         double period, int dim, int per_dim, Vec &out);

/// phi(x) for all flat indices and, if grad is non-null, the D x K^D
/// gradient matrix. cos_table / sin_table are D x K tables of
/// cos(2 pi k x_d / L) and sin(2 pi k x_d / L).
void cosine_basis(const Mat &cos_table, const Mat &sin_table, double period, Vec &phi,
                  Mat *grad);

/// Precomputed per-component data for Gaussian mixture regression.
struct RegressionTerm {
  GaussianTerm input;  // input-block marginal, log_weight includes log prior
  double log_prior;
  Vec output_mean;
  Mat gain;            // Sigma_OI Sigma_I^{-1}
  Mat cond_cov;        // Sigma_O - Sigma_OI Sigma_I^{-1} Sigma_IO
};

/// Per-query moment-matched GMR outputs. queries: N x I. means: N x O,
/// covs: N x (O*O) (column-major flattening), responsibilities: N x K,
/// max_log_density: per query, the largest unweighted input log-density.
struct RegressionBatch {
  Mat means;
  Mat covs;
  Mat responsibilities;
  Vec max_log_density;
};
void gmr_predict(const Mat &queries, std::span<const RegressionTerm> terms, RegressionBatch &out);

/// One local model of a locally weighted regression.
struct LocalModel {
  Vec center;
  Mat lower;      // Cholesky factor of the bandwidth matrix
  Vec scale;      // per-dimension feature scaling
  Mat coeffs;     // (1 + d * degree) x p
};
/// Prediction with rescaled activations. queries: N x d, out: N x p.
void lwr_predict(const Mat &queries, std::span<const LocalModel> models, int degree, Mat &out);

namespace serial {
void log_density_table(const Mat &points, std::span<const GaussianTerm> terms, Mat &out);
void mirrored_gmm_coeffs(std::span<const SpectralComponent> components, const Mat &signs,
                         double period, int dim, int per_dim, Vec &out);
void cosine_basis(const Mat &cos_table, const Mat &sin_table, double period, Vec &phi,
                  Mat *grad);
void gmr_predict(const Mat &queries, std::span<const RegressionTerm> terms, RegressionBatch &out);
void lwr_predict(const Mat &queries, std::span<const LocalModel> models, int degree, Mat &out);
} // namespace serial

namespace omp {
void log_density_table(const Mat &points, std::span<const GaussianTerm> terms, Mat &out);
void mirrored_gmm_coeffs(std::span<const SpectralComponent> components, const Mat &signs,
                         double period, int dim, int per_dim, Vec &out);
void cosine_basis(const Mat &cos_table, const Mat &sin_table, double period, Vec &phi,
                  Mat *grad);
void gmr_predict(const Mat &queries, std::span<const RegressionTerm> terms, RegressionBatch &out);
void lwr_predict(const Mat &queries, std::span<const LocalModel> models, int degree, Mat &out);
} // namespace omp

// The unqualified kernels forward to kernels::omp.

/// Work items below which the OpenMP variants run on the calling thread.
inline constexpr Index kParallelThreshold = 256;

// Row-level helpers shared by both variants.
namespace detail {
double log_density(const Vec &x, const GaussianTerm &term);
void mirrored_coeff_at(std::span<const SpectralComponent> components, const Mat &signs,
                       double period, int dim, int per_dim, Index flat, double &value);
void cosine_basis_at(const Mat &cos_table, const Mat &sin_table, double period, Index flat,
                     double &phi, Mat *grad);
void gmr_row(const Vec &query, std::span<const RegressionTerm> terms, RegressionBatch &out,
             Index row);
void lwr_row(const Vec &query, std::span<const LocalModel> models, int degree, Mat &out,
             Index row);
} // namespace detail

} // namespace tsmix::kernels
