#include "tsmix/bezier.hpp"

#include <cmath>
#include <string>

namespace tsmix {

double binomial(int n, int i) {
  require(n >= 0 && i >= 0 && i <= n, "binomial index out of range");
  i = std::min(i, n - i);
  double c = 1.0;
  for (int j = 1; j <= i; ++j)
    c = c * static_cast<double>(n - i + j) / static_cast<double>(j);
  return c;
}

double bernstein(int n, int i, double t) {
  require(n >= 0, "Bernstein degree must be nonnegative");
  require(i >= 0 && i <= n,
          "Bernstein index " + std::to_string(i) + " out of range for degree " + std::to_string(n));
  return binomial(n, i) * std::pow(1.0 - t, n - i) * std::pow(t, i);
}

Vec bernstein_all(int n, double t) {
  Vec b(n + 1);
  for (int i = 0; i <= n; ++i)
    b(i) = bernstein(n, i, t);
  return b;
}

BezierCurve::BezierCurve(Mat control_points) : points_(std::move(control_points)) {
  require(points_.rows() >= 2, "a Bezier curve needs at least two control points");
  require(points_.cols() >= 1, "control points must have a positive dimension");
  require(points_.allFinite(), "control points must be finite");
}

Vec BezierCurve::eval(double t, BezierMethod method) const {
  require(t >= 0.0 && t <= 1.0, "Bezier parameter must lie in [0, 1]");
  if (method == BezierMethod::direct)
    return points_.transpose() * bernstein_all(degree(), t);
  // de Casteljau: repeated linear interpolation of adjacent points.
  Mat work = points_;
  for (int level = degree(); level > 0; --level)
    for (int i = 0; i < level; ++i)
      work.row(i) = (1.0 - t) * work.row(i) + t * work.row(i + 1);
  return work.row(0).transpose();
}

BezierCurve BezierCurve::elevated() const {
  const int n = degree();
  Mat q(n + 2, dim());
  q.row(0) = points_.row(0);
  q.row(n + 1) = points_.row(n);
  for (int i = 1; i <= n; ++i) {
    const double a = static_cast<double>(i) / (n + 1);
    q.row(i) = a * points_.row(i - 1) + (1.0 - a) * points_.row(i);
  }
  return BezierCurve(std::move(q));
}

BezierCurve BezierCurve::reversed() const { return BezierCurve(points_.colwise().reverse()); }

BezierCurve bezier_fit(const Vec &times, const Mat &samples, int degree, bool clamp_ends) {
  require(degree >= 1, "Bezier degree must be at least 1");
  require(times.size() == samples.rows(), "one time stamp per sample required");
  require(samples.rows() >= degree + 1, "need at least degree + 1 samples");
  const double lo = times.minCoeff();
  const double hi = times.maxCoeff();
  if (!(hi > lo))
    throw SingularSystemError("Bezier fit is rank deficient: all time stamps are identical");
  const Index n = samples.rows();
  Mat basis(n, degree + 1);
  for (Index r = 0; r < n; ++r)
    basis.row(r) = bernstein_all(degree, (times(r) - lo) / (hi - lo)).transpose();

  Mat points(degree + 1, samples.cols());
  if (!clamp_ends) {
    Eigen::ColPivHouseholderQR<Mat> qr(basis);
    if (qr.rank() < degree + 1)
      throw SingularSystemError("Bezier fit is rank deficient");
    points = qr.solve(samples);
    return BezierCurve(std::move(points));
  }

  Index first = 0, last = 0;
  times.minCoeff(&first);
  times.maxCoeff(&last);
  points.row(0) = samples.row(first);
  points.row(degree) = samples.row(last);
  if (degree >= 2) {
    const Mat inner = basis.middleCols(1, degree - 1);
    const Mat rhs = samples - basis.col(0) * points.row(0) - basis.col(degree) * points.row(degree);
    Eigen::ColPivHouseholderQR<Mat> qr(inner);
    if (qr.rank() < degree - 1)
      throw SingularSystemError("clamped Bezier fit is rank deficient");
    points.middleRows(1, degree - 1) = qr.solve(rhs);
  }
  return BezierCurve(std::move(points));
}

} // namespace tsmix
