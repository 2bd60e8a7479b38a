#pragma once

#include <vector>

#include "tsmix/gaussians.hpp"

namespace tsmix {

/// Binomial coefficient by multiplicative recurrence in floating point.
double binomial(int n, int i);

/// b_{i,n}(t) = C(n,i) (1-t)^(n-i) t^i
double bernstein(int n, int i, double t);

/// All n+1 Bernstein polynomials of degree n at t.
Vec bernstein_all(int n, double t);

enum class BezierMethod { de_casteljau, direct };

class BezierCurve {
public:
  /// Control points as rows (n+1) x D, n >= 1.
  explicit BezierCurve(Mat control_points);

  int degree() const { return static_cast<int>(points_.rows()) - 1; }
  Index dim() const { return points_.cols(); }
  const Mat &control_points() const { return points_; }

  /// t in [0, 1]; no extrapolation.
  Vec eval(double t, BezierMethod method = BezierMethod::de_casteljau) const;

  /// Same curve with degree + 1.
  BezierCurve elevated() const;
  /// Control polygon in reverse order: reversed().eval(1 - t) == eval(t).
  BezierCurve reversed() const;

private:
  Mat points_;
};

/// Least-squares control points for samples (rows) at the given time
/// stamps, which are first mapped affinely to [0, 1]. With clamp_ends the
/// first and last control points are pinned to the first and last samples.
BezierCurve bezier_fit(const Vec &times, const Mat &samples, int degree, bool clamp_ends = false);

} // namespace tsmix
