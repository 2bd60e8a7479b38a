#include "tsmix/kernels.hpp"

#include <cmath>

#include <omp.h>

namespace tsmix::kernels {

namespace omp {

void log_density_table(const Mat &points, std::span<const GaussianTerm> terms, Mat &out) {
  const Index n = points.rows();
  const Index num = static_cast<Index>(terms.size());
  out.resize(n, num);
#pragma omp parallel for schedule(static) if (n * num >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) {
    const Vec x = points.row(i).transpose();
    for (Index k = 0; k < num; ++k)
      out(i, k) = detail::log_density(x, terms[static_cast<std::size_t>(k)]);
  }
}

void mirrored_gmm_coeffs(std::span<const SpectralComponent> components, const Mat &signs,
                         double period, int dim, int per_dim, Vec &out) {
  const Index total = static_cast<Index>(std::pow(per_dim, dim));
  out.resize(total);
  const Index work = total * static_cast<Index>(components.size()) * signs.rows();
#pragma omp parallel for schedule(static) if (work >= kParallelThreshold)
  for (Index i = 0; i < total; ++i)
    detail::mirrored_coeff_at(components, signs, period, dim, per_dim, i, out(i));
}

void cosine_basis(const Mat &cos_table, const Mat &sin_table, double period, Vec &phi,
                  Mat *grad) {
  const Index total = static_cast<Index>(std::pow(cos_table.cols(), cos_table.rows()));
  phi.resize(total);
  if (grad != nullptr)
    grad->resize(cos_table.rows(), total);
#pragma omp parallel for schedule(static) if (total >= 16 * kParallelThreshold)
  for (Index i = 0; i < total; ++i)
    detail::cosine_basis_at(cos_table, sin_table, period, i, phi(i), grad);
}

void gmr_predict(const Mat &queries, std::span<const RegressionTerm> terms, RegressionBatch &out) {
  const Index n = queries.rows();
  const Index o = terms.front().output_mean.size();
  out.means.resize(n, o);
  out.covs.resize(n, o * o);
  out.responsibilities.resize(n, static_cast<Index>(terms.size()));
  out.max_log_density.resize(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold / 8)
  for (Index i = 0; i < n; ++i)
    detail::gmr_row(queries.row(i).transpose(), terms, out, i);
}

void lwr_predict(const Mat &queries, std::span<const LocalModel> models, int degree, Mat &out) {
  const Index n = queries.rows();
  out.resize(n, models.front().coeffs.cols());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold / 8)
  for (Index i = 0; i < n; ++i)
    detail::lwr_row(queries.row(i).transpose(), models, degree, out, i);
}

} // namespace omp

void log_density_table(const Mat &points, std::span<const GaussianTerm> terms, Mat &out) {
  omp::log_density_table(points, terms, out);
}
void mirrored_gmm_coeffs(std::span<const SpectralComponent> components, const Mat &signs,
                         double period, int dim, int per_dim, Vec &out) {
  omp::mirrored_gmm_coeffs(components, signs, period, dim, per_dim, out);
}
void cosine_basis(const Mat &cos_table, const Mat &sin_table, double period, Vec &phi,
                  Mat *grad) {
  omp::cosine_basis(cos_table, sin_table, period, phi, grad);
}
void gmr_predict(const Mat &queries, std::span<const RegressionTerm> terms, RegressionBatch &out) {
  omp::gmr_predict(queries, terms, out);
}
void lwr_predict(const Mat &queries, std::span<const LocalModel> models, int degree, Mat &out) {
  omp::lwr_predict(queries, models, degree, out);
}

} // namespace tsmix::kernels
