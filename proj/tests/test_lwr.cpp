#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "tsmix/lwr.hpp"

using namespace tsmix;

namespace {

Mat column(const Vec &v) { return Mat(v); }

double rms(const Mat &a, const Mat &b) { return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size())); }

} // namespace

TEST_CASE("weighted least squares") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  SUBCASE("square consistent system") {
    const Mat x = Mat::NullaryExpr(4, 4, [&] { return n(rng); });
    const Mat a0 = Mat::NullaryExpr(4, 2, [&] { return n(rng); });
    const Mat a = weighted_least_squares(x, x * a0, Vec::Ones(4), 0.0);
    CHECK((x * a - x * a0).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("noise-free linear data with positive weights") {
    const Mat x = Mat::NullaryExpr(50, 3, [&] { return n(rng); });
    const Mat a0 = Mat::NullaryExpr(3, 2, [&] { return n(rng); });
    const Vec w = Vec::NullaryExpr(50, [&] { return 0.1 + std::abs(n(rng)); });
    CHECK((weighted_least_squares(x, x * a0, w, 0.0) - a0).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("overdetermined system against the pseudo-inverse") {
    const Mat x = Mat::NullaryExpr(60, 4, [&] { return n(rng); });
    const Mat y = Mat::NullaryExpr(60, 2, [&] { return n(rng); });
    const Vec w = Vec::NullaryExpr(60, [&] { return std::abs(n(rng)); });
    const Vec sw = w.cwiseSqrt();
    const Mat ref = (sw.asDiagonal() * x).completeOrthogonalDecomposition().pseudoInverse() * (sw.asDiagonal() * y);
    CHECK((weighted_least_squares(x, y, w, 0.0) - ref).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("errors") {
    Mat x(3, 2);
    x << 1, 2, 2, 4, 3, 6;
    CHECK_THROWS_AS(weighted_least_squares(x, Mat::Ones(3, 1), Vec::Ones(3), 0.0), SingularSystemError);
    CHECK_THROWS_AS(weighted_least_squares(x, Mat::Ones(3, 1), Vec::Zero(3), 0.0), ValidationError);
    CHECK_THROWS_AS(weighted_least_squares(x, Mat::Ones(3, 1), -Vec::Ones(3), 0.0), ValidationError);
  }
}

TEST_CASE("RBF activations") {
  const RbfSet rbfs = RbfSet::uniform(0.0, 1.0, 4, false);
  CHECK(rbfs.activations(rbfs.centers()[2])(2) == 1.0);
  const RbfSet pair({Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)}, {Mat::Constant(1, 1, 0.3)}, true);
  const Vec h = pair.activations(Vec::Zero(1));
  CHECK(h(0) == doctest::Approx(0.5));
  CHECK(h(1) == doctest::Approx(0.5));
  const RbfSet r = RbfSet::uniform(0.0, 1.0, 7, true);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int i = 0; i < 100; ++i)
    CHECK(std::abs(r.activations(Vec::Constant(1, u(rng))).sum() - 1.0) <= 1e-12);
  // Far outside the support every raw activation underflows; the rescaled
  // ones still form a partition of unity.
  const Vec far = r.activations(Vec::Constant(1, 1e3));
  CHECK(far.allFinite());
  CHECK(std::abs(far.sum() - 1.0) <= 1e-12);
  CHECK_THROWS_AS(RbfSet({Vec::Zero(1)}, {Mat::Constant(1, 1, -1.0)}, true), ValidationError);
}

TEST_CASE("LWR fitting and prediction") {
  const Vec t = Vec::LinSpaced(100, 0.0, 1.0);
  SUBCASE("constant signal, degree 0") {
    const auto m = lwr_fit(column(t), Mat::Constant(100, 1, 2.5), RbfSet::uniform(0, 1, 6), 0, 0.0);
    for (const auto &a : m.coefficients())
      CHECK(std::abs(a(0, 0) - 2.5) < 1e-10);
  }
  SUBCASE("linear data, degree 1, any K") {
    const Mat y = column((3.0 * t).array() - 1.0);
    for (int k : {1, 2, 5, 13}) {
      const auto m = lwr_fit(column(t), y, RbfSet::uniform(0, 1, k), 1, 0.0);
      CHECK((m.predict_batch(column(t)) - y).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("K = 1 is plain polynomial regression") {
    const Mat y = column(t.array().sin());
    const auto m = lwr_fit(column(t), y, RbfSet::uniform(0, 1, 1), 2, 0.0);
    Mat f(100, 3);
    f << Vec::Ones(100), t, t.array().square().matrix();
    Vec raw(100);
    for (Index i = 0; i < 100; ++i)
      raw(i) = m.rbfs().activations(Vec::Constant(1, t(i)))(0);
    CHECK(raw.isOnes(0.0));
    const Vec sw = raw.cwiseSqrt();
    const Mat coef = (sw.asDiagonal() * f).completeOrthogonalDecomposition().pseudoInverse() * (sw.asDiagonal() * y);
    CHECK((m.predict_batch(column(t)) - f * coef).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("in-span signal is exact at training points") {
    const Mat y = column(t.array().square() - 0.5 * t.array());
    const auto m = lwr_fit(column(t), y, RbfSet::uniform(0, 1, 8), 2, default_lwr_ridge(100));
    for (Index i = 0; i < 100; i += 7)
      CHECK(std::abs(m.predict(Vec::Constant(1, t(i)))(0) - y(i, 0)) < 1e-9);
  }
  SUBCASE("batch prediction equals pointwise prediction") {
    const Mat y = column((6.0 * t).array().sin());
    const auto m = lwr_fit(column(t), y, RbfSet::uniform(0, 1, 8), 1, default_lwr_ridge(100));
    const Vec grid = Vec::LinSpaced(200, 0.0, 1.0);
    const Mat batch = m.predict_batch(column(grid));
    for (Index i = 0; i < 200; ++i) {
      const Vec phi = m.rbfs().activations(Vec::Constant(1, grid(i)), true);
      double ref = 0.0;
      for (Index k = 0; k < 8; ++k)
        ref += phi(k) * m.local_features(k, Vec::Constant(1, grid(i))).dot(m.coefficients()[static_cast<std::size_t>(k)].col(0));
      CHECK(std::abs(batch(i, 0) - ref) < 1e-12);
    }
  }
  SUBCASE("noisy sine against a raw-feature oracle") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0.0, 0.05);
    Mat y(100, 1);
    for (Index i = 0; i < 100; ++i)
      y(i, 0) = std::sin(2 * oracle::pi * t(i)) + n(rng);
    const auto rbfs = RbfSet::uniform(0, 1, 8, false);
    const auto m = lwr_fit(column(t), y, rbfs, 1, default_lwr_ridge(100));
    oracle::RawLwr ref;
    for (const auto &c : rbfs.centers())
      ref.centers.push_back(c(0));
    ref.var = rbfs.bandwidths()[0](0, 0);
    ref.degree = 1;
    ref.fit(t, y, false);
    Mat pred_ref(100, 1);
    for (Index i = 0; i < 100; ++i)
      pred_ref(i, 0) = ref.predict(t(i))(0);
    CHECK(rms(m.predict_batch(column(t)), y) <= rms(pred_ref, y) + 1e-9);
  }
  SUBCASE("locality") {
    Vec x = Vec::LinSpaced(200, 0.0, 10.0);
    Mat y = column(x.array().cos());
    const auto rbfs = RbfSet::uniform(0, 10, 20, false);
    const auto m1 = lwr_fit(column(x), y, rbfs, 1, 0.0);
    y(0, 0) += 1.0;
    const auto m2 = lwr_fit(column(x), y, rbfs, 1, 0.0);
    const Vec q = Vec::Constant(1, 10.0);
    CHECK(std::abs(m1.predict(q)(0) - m2.predict(q)(0)) < 1e-9);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(lwr_fit(column(t), Mat::Ones(99, 1), RbfSet::uniform(0, 1, 3), 1, 0.0), ValidationError);
    CHECK_THROWS_AS(lwr_fit(column(t), Mat::Ones(100, 1), RbfSet::uniform(0, 1, 3), -1, 0.0), ValidationError);
    // Two distinct inputs cannot determine a cubic.
    Mat x2(4, 1);
    x2 << 0.0, 0.0, 1.0, 1.0;
    try {
      lwr_fit(x2, Mat::Ones(4, 1), RbfSet::uniform(0, 1, 2), 3, 0.0);
      FAIL("expected a singular system");
    } catch (const SingularSystemError &e) {
      CHECK(std::string(e.what()).find("regression 0") != std::string::npos);
    }
  }
}

TEST_CASE("polynomial reproduction") {
  const Vec t = Vec::LinSpaced(120, -1.0, 2.0);
  const Vec grid = Vec::LinSpaced(301, -1.0, 2.0);
  for (int p = 0; p <= 3; ++p)
    for (int k : {2, 3, 6, 12, 25}) {
      auto poly = [&](double x) {
        double s = 0.7;
        for (int i = 1; i <= p; ++i)
          s += (i % 2 ? -1.3 : 0.4) * std::pow(x, i);
        return s;
      };
      Mat y(120, 1), yg(301, 1);
      for (Index i = 0; i < 120; ++i)
        y(i, 0) = poly(t(i));
      for (Index i = 0; i < 301; ++i)
        yg(i, 0) = poly(grid(i));
      const auto m = lwr_fit(column(t), y, RbfSet::uniform(-1, 2, k), p, default_lwr_ridge(120));
      CHECK_MESSAGE((m.predict_batch(column(grid)) - yg).cwiseAbs().maxCoeff() <= 1e-8, "p=", p, " K=", k);
    }
}
