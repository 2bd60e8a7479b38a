#include "tsmix/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace tsmix::kernels {

namespace detail {

double log_density(const Vec &x, const GaussianTerm &term) {
  const Vec z = term.lower.triangularView<Eigen::Lower>().solve(x - term.mean);
  return term.log_weight - 0.5 * z.squaredNorm();
}

namespace {
// Row-major decoding, last dimension fastest.
void decode_index(Index flat, int dim, int per_dim, Eigen::VectorXi &k) {
  for (int d = dim - 1; d >= 0; --d) {
    k(d) = static_cast<int>(flat % per_dim);
    flat /= per_dim;
  }
}
} // namespace

void mirrored_coeff_at(std::span<const SpectralComponent> components, const Mat &signs,
                       double period, int dim, int per_dim, Index flat, double &value) {
  using std::numbers::pi;
  Eigen::VectorXi k(dim);
  decode_index(flat, dim, per_dim, k);
  const double pattern_weight = 1.0 / static_cast<double>(signs.rows());
  double sum = 0.0;
  Vec ak(dim);
  for (const auto &c : components) {
    for (Index m = 0; m < signs.rows(); ++m) {
      for (int d = 0; d < dim; ++d)
        ak(d) = signs(m, d) * static_cast<double>(k(d));
      const double phase = 2.0 * pi * ak.dot(c.mean) / period;
      const double quad = ak.dot(c.cov * ak);
      sum += c.weight * pattern_weight * std::cos(phase) *
             std::exp(-2.0 * pi * pi * quad / (period * period));
    }
  }
  value = sum / std::pow(period, dim);
}

void cosine_basis_at(const Mat &cos_table, const Mat &sin_table, double period, Index flat,
                     double &phi, Mat *grad) {
  using std::numbers::pi;
  const int dim = static_cast<int>(cos_table.rows());
  const int per_dim = static_cast<int>(cos_table.cols());
  Eigen::VectorXi k(dim);
  decode_index(flat, dim, per_dim, k);
  const double norm = 1.0 / std::pow(period, dim);
  double prod = norm;
  for (int d = 0; d < dim; ++d)
    prod *= cos_table(d, k(d));
  phi = prod;
  if (grad == nullptr)
    return;
  for (int d = 0; d < dim; ++d) {
    double g = -norm * sin_table(d, k(d)) * 2.0 * pi * k(d) / period;
    for (int e = 0; e < dim; ++e)
      if (e != d)
        g *= cos_table(e, k(e));
    (*grad)(d, flat) = g;
  }
}

void gmr_row(const Vec &query, std::span<const RegressionTerm> terms, RegressionBatch &out,
             Index row) {
  const Index num = static_cast<Index>(terms.size());
  const Index out_dim = terms.front().output_mean.size();
  Vec logd(num);
  double max_unweighted = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < num; ++k) {
    const auto &t = terms[static_cast<std::size_t>(k)];
    logd(k) = log_density(query, t.input);
    max_unweighted = std::max(max_unweighted, logd(k) - t.log_prior);
  }
  const double top = logd.maxCoeff();
  Vec h = (logd.array() - top).exp();
  h /= h.sum();

  Vec mean = Vec::Zero(out_dim);
  Mat second = Mat::Zero(out_dim, out_dim);
  for (Index k = 0; k < num; ++k) {
    const auto &t = terms[static_cast<std::size_t>(k)];
    const Vec mu = t.output_mean + t.gain * (query - t.input.mean);
    mean += h(k) * mu;
    second += h(k) * (t.cond_cov + mu * mu.transpose());
  }
  Mat cov = second - mean * mean.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();

  out.means.row(row) = mean.transpose();
  out.covs.row(row) = Eigen::Map<const Vec>(cov.data(), cov.size()).transpose();
  out.responsibilities.row(row) = h.transpose();
  out.max_log_density(row) = max_unweighted;
}

void lwr_row(const Vec &query, std::span<const LocalModel> models, int degree, Mat &out,
             Index row) {
  const Index num = static_cast<Index>(models.size());
  const Index in_dim = query.size();
  Vec loga(num);
  for (Index k = 0; k < num; ++k) {
    const auto &m = models[static_cast<std::size_t>(k)];
    const Vec z = m.lower.triangularView<Eigen::Lower>().solve(query - m.center);
    loga(k) = -0.5 * z.squaredNorm();
  }
  const double top = loga.maxCoeff();
  Vec act = (loga.array() - top).exp();
  act /= act.sum();

  Vec y = Vec::Zero(models.front().coeffs.cols());
  Vec feat(1 + in_dim * degree);
  for (Index k = 0; k < num; ++k) {
    const auto &m = models[static_cast<std::size_t>(k)];
    feat(0) = 1.0;
    for (Index d = 0; d < in_dim; ++d) {
      const double u = (query(d) - m.center(d)) / m.scale(d);
      double p = 1.0;
      for (int q = 1; q <= degree; ++q) {
        p *= u;
        feat(1 + (q - 1) * in_dim + d) = p;
      }
    }
    y += act(k) * (m.coeffs.transpose() * feat);
  }
  out.row(row) = y.transpose();
}

} // namespace detail

namespace serial {

void log_density_table(const Mat &points, std::span<const GaussianTerm> terms, Mat &out) {
  out.resize(points.rows(), static_cast<Index>(terms.size()));
  for (Index n = 0; n < points.rows(); ++n) {
    const Vec x = points.row(n).transpose();
    for (std::size_t k = 0; k < terms.size(); ++k)
      out(n, static_cast<Index>(k)) = detail::log_density(x, terms[k]);
  }
}

void mirrored_gmm_coeffs(std::span<const SpectralComponent> components, const Mat &signs,
                         double period, int dim, int per_dim, Vec &out) {
  const Index total = static_cast<Index>(std::pow(per_dim, dim));
  out.resize(total);
  for (Index i = 0; i < total; ++i)
    detail::mirrored_coeff_at(components, signs, period, dim, per_dim, i, out(i));
}

void cosine_basis(const Mat &cos_table, const Mat &sin_table, double period, Vec &phi,
                  Mat *grad) {
  const Index total = static_cast<Index>(std::pow(cos_table.cols(), cos_table.rows()));
  phi.resize(total);
  if (grad != nullptr)
    grad->resize(cos_table.rows(), total);
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
  for (Index i = 0; i < n; ++i)
    detail::gmr_row(queries.row(i).transpose(), terms, out, i);
}

void lwr_predict(const Mat &queries, std::span<const LocalModel> models, int degree, Mat &out) {
  out.resize(queries.rows(), models.front().coeffs.cols());
  for (Index i = 0; i < queries.rows(); ++i)
    detail::lwr_row(queries.row(i).transpose(), models, degree, out, i);
}

} // namespace serial

} // namespace tsmix::kernels
