#include "tsmix/lwr.hpp"

#include <cmath>
#include <string>

#include "tsmix/kernels.hpp"

namespace tsmix {

RbfSet::RbfSet(std::vector<Vec> centers, std::vector<Mat> bandwidths, bool rescaled)
    : centers_(std::move(centers)), bandwidths_(std::move(bandwidths)), rescaled_(rescaled) {
  require(!centers_.empty(), "an RBF set needs at least one center");
  if (bandwidths_.size() == 1 && centers_.size() > 1)
    bandwidths_.assign(centers_.size(), bandwidths_.front());
  require(bandwidths_.size() == centers_.size(), "one bandwidth per center required");
  const Index d = centers_.front().size();
  require(d >= 1, "RBF centers must be non-empty vectors");
  for (std::size_t k = 0; k < centers_.size(); ++k) {
    require(centers_[k].size() == d, "RBF centers must share a dimension");
    const Mat &b = bandwidths_[k];
    require(b.rows() == d && b.cols() == d, "bandwidth matrix has the wrong shape");
    Eigen::LLT<Mat> llt(b);
    require(llt.info() == Eigen::Success && (b - b.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * b.cwiseAbs().maxCoeff(),
            "bandwidth matrix " + std::to_string(k) + " is not symmetric positive definite");
    lowers_.emplace_back(llt.matrixL());
  }
}

RbfSet RbfSet::uniform(double lo, double hi, int count, bool rescaled) {
  require(count >= 1, "RBF count must be at least 1");
  require(hi > lo, "RBF input range must be non-empty");
  std::vector<Vec> centers;
  for (int k = 0; k < count; ++k) {
    const double c = count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (count - 1.0);
    centers.push_back(Vec::Constant(1, c));
  }
  const double width = (hi - lo) / count;
  return RbfSet(std::move(centers), {Mat::Constant(1, 1, width * width)}, rescaled);
}

Vec RbfSet::activations(const Vec &x) const { return activations(x, rescaled_); }

Vec RbfSet::activations(const Vec &x, bool rescaled) const {
  require(x.size() == dim(), "RBF input has the wrong dimension");
  Vec loga(size());
  for (Index k = 0; k < size(); ++k) {
    const auto &l = lowers_[static_cast<std::size_t>(k)];
    loga(k) = -0.5 * l.triangularView<Eigen::Lower>().solve(x - centers_[static_cast<std::size_t>(k)]).squaredNorm();
  }
  if (!rescaled)
    return loga.array().exp();
  const double top = loga.maxCoeff();
  Vec a = (loga.array() - top).exp();
  return a / a.sum();
}

Mat weighted_least_squares(const Mat &x_in, const Mat &x_out, const Vec &weights, double ridge) {
  const Index n = x_in.rows();
  require(n >= 1, "weighted least squares needs at least one point");
  require(x_out.rows() == n && weights.size() == n, "inconsistent row counts");
  require(ridge >= 0.0, "ridge must be nonnegative");
  require((weights.array() >= 0.0).all() && weights.sum() > 0.0,
          "weights must be nonnegative and not all zero");
  Mat normal = x_in.transpose() * weights.asDiagonal() * x_in;
  normal.diagonal().array() += ridge;
  const Mat rhs = x_in.transpose() * weights.asDiagonal() * x_out;
  Eigen::LDLT<Mat> ldlt(normal);
  const double scale = normal.diagonal().cwiseAbs().maxCoeff();
  const auto d = ldlt.vectorD().array();
  if (ldlt.info() != Eigen::Success || scale <= 0.0 ||
      d.minCoeff() <= 1e-14 * scale)
    throw SingularSystemError("weighted least squares normal matrix is rank deficient");
  return ldlt.solve(rhs);
}

Vec polynomial_features(const Vec &u, int degree) {
  const Index d = u.size();
  Vec f(1 + d * degree);
  f(0) = 1.0;
  for (Index j = 0; j < d; ++j) {
    double p = 1.0;
    for (int q = 1; q <= degree; ++q) {
      p *= u(j);
      f(1 + (q - 1) * d + j) = p;
    }
  }
  return f;
}

LwrModel::LwrModel(RbfSet rbfs, std::vector<Mat> coefficients, int degree)
    : rbfs_(std::move(rbfs)), coefficients_(std::move(coefficients)), degree_(degree) {
  require(degree_ >= 0, "polynomial degree must be nonnegative");
  require(static_cast<Index>(coefficients_.size()) == rbfs_.size(), "one coefficient matrix per basis");
  const Index rows = 1 + rbfs_.dim() * degree_;
  for (const auto &c : coefficients_)
    require(c.rows() == rows && c.cols() == coefficients_.front().cols() && c.cols() > 0,
            "coefficient matrix has the wrong shape");
  for (const auto &b : rbfs_.bandwidths())
    scales_.push_back(b.diagonal().cwiseSqrt());
}

Vec LwrModel::local_features(Index k, const Vec &x) const {
  const auto ku = static_cast<std::size_t>(k);
  const Vec u = (x - rbfs_.centers()[ku]).cwiseQuotient(scales_[ku]);
  return polynomial_features(u, degree_);
}

Vec LwrModel::predict(const Vec &x) const {
  const Vec act = rbfs_.activations(x, true);
  Vec y = Vec::Zero(output_dim());
  for (Index k = 0; k < rbfs_.size(); ++k)
    y += act(k) * (coefficients_[static_cast<std::size_t>(k)].transpose() * local_features(k, x));
  return y;
}

Mat LwrModel::predict_batch(const Mat &queries) const {
  require(queries.cols() == input_dim(), "query dimension does not match the model");
  std::vector<kernels::LocalModel> models;
  for (Index k = 0; k < rbfs_.size(); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    models.push_back({rbfs_.centers()[ku], rbfs_.factors()[ku], scales_[ku], coefficients_[ku]});
  }
  Mat out;
  kernels::lwr_predict(queries, models, degree_, out);
  return out;
}

double default_lwr_ridge(Index num_points) { return 1e-12 * static_cast<double>(num_points); }

LwrModel lwr_fit(const Mat &x_in, const Mat &x_out, const RbfSet &rbfs, int degree, double ridge) {
  require(degree >= 0, "polynomial degree must be nonnegative");
  require(x_in.rows() == x_out.rows() && x_in.rows() >= 1, "inconsistent row counts");
  require(x_in.cols() == rbfs.dim(), "input dimension does not match the RBF set");
  const Index n = x_in.rows();
  Mat act(n, rbfs.size());
  for (Index i = 0; i < n; ++i)
    act.row(i) = rbfs.activations(x_in.row(i).transpose()).transpose();

  // A throwaway model gives access to the local feature map.
  const Index rows = 1 + x_in.cols() * degree;
  LwrModel shape(rbfs, std::vector<Mat>(static_cast<std::size_t>(rbfs.size()), Mat::Zero(rows, x_out.cols())), degree);
  std::vector<Mat> coeffs;
  for (Index k = 0; k < rbfs.size(); ++k) {
    Mat features(n, rows);
    for (Index i = 0; i < n; ++i)
      features.row(i) = shape.local_features(k, x_in.row(i).transpose()).transpose();
    try {
      coeffs.push_back(weighted_least_squares(features, x_out, act.col(k), ridge));
    } catch (const SingularSystemError &) {
      throw SingularSystemError("local regression " + std::to_string(k) + " is rank deficient");
    } catch (const ValidationError &) {
      throw SingularSystemError("basis " + std::to_string(k) + " has no weight on the data");
    }
  }
  return LwrModel(rbfs, std::move(coeffs), degree);
}

} // namespace tsmix
