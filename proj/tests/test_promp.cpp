#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "tsmix/promp.hpp"

using namespace tsmix;

namespace {

Trajectory from_weights(const PsiMatrix &psi, const Vec &times, const Vec &w) {
  return unstack(psi.values * w, times, psi.dim);
}

Vec stacked(const Trajectory &t) {
  Vec x(t.values.size());
  for (Index s = 0; s < t.values.rows(); ++s)
    x.segment(s * t.values.cols(), t.values.cols()) = t.values.row(s).transpose();
  return x;
}

/// Random ProMP with a full-rank weight covariance.
ProMP random_promp(Index steps, Index dim, int count, double sigma2, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  const Index nw = dim * count;
  const Vec mu = Vec::NullaryExpr(nw, [&] { return n01(rng); });
  const Mat a = Mat::NullaryExpr(nw, nw, [&] { return n01(rng); });
  const Mat sigma = a * a.transpose() / static_cast<double>(nw) + 0.1 * Mat::Identity(nw, nw);
  return ProMP(BasisFamily::radial(count), steps, dim, mu, sigma, sigma2);
}

} // namespace

TEST_CASE("basis matrices") {
  const Vec times = uniform_times(30);
  for (const auto &fam : {BasisFamily::radial(6), BasisFamily::bernstein(5), BasisFamily::fourier(4)}) {
    const auto psi1 = build_psi(fam, times, 1);
    CHECK(psi1.values == psi1.phi);
    const auto psi = build_psi(fam, times, 3);
    CHECK(psi.values.rows() == 90);
    CHECK(psi.values.cols() == 3 * fam.count);
    for (Index t = 0; t < 30; ++t)
      for (Index k = 0; k < fam.count; ++k)
        CHECK(psi.values.block(t * 3, k * 3, 3, 3) == Mat(psi.phi(t, k) * Mat::Identity(3, 3)));
  }
  const Mat bern = BasisFamily::bernstein(8).evaluate(times);
  CHECK((bern.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  const Mat rbf = BasisFamily::radial(8).evaluate(times);
  CHECK((rbf.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  const Mat fourier = BasisFamily::fourier(3, 2.0).evaluate(times);
  CHECK(fourier(10, 2) == doctest::Approx(std::cos(2.0 * oracle::pi * 2 * times(10) / 2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(BasisFamily::radial(0), ValidationError);
  CHECK_THROWS_AS(BasisFamily::fourier(3, -1.0).validate(), ValidationError);
  CHECK_THROWS_AS(build_psi(BasisFamily::radial(3), Vec(0), 1), ValidationError);
}

TEST_CASE("fitting") {
  const Index steps = 50, dim = 2;
  const auto fam = BasisFamily::radial(7);
  const Vec times = uniform_times(steps);
  const auto psi = build_psi(fam, times, dim);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;

  SUBCASE("single in-span demo") {
    const Vec w = Vec::NullaryExpr(dim * 7, [&] { return n01(rng); });
    const auto demo = from_weights(psi, times, w);
    const auto p = promp_fit({demo}, fam);
    CHECK((psi.values * p.mu_w() - stacked(demo)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(p.sigma2() <= 1e-16);
    CHECK((p.sigma_w() - Mat(p.sigma_w().diagonal().asDiagonal())).norm() == 0.0);
  }
  SUBCASE("identical demos") {
    const Vec w = Vec::NullaryExpr(dim * 7, [&] { return n01(rng); });
    const auto demo = from_weights(psi, times, w);
    const auto one = promp_fit({demo}, fam);
    const auto many = promp_fit({demo, demo, demo, demo}, fam);
    CHECK((many.mu_w() - one.mu_w()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(many.sigma_w().cwiseAbs().maxCoeff() <= 1e-20);
  }
  SUBCASE("generative round trip") {
    const Index nw = dim * 7;
    const Vec mu = Vec::NullaryExpr(nw, [&] { return n01(rng); });
    const Mat a = 0.3 * Mat::NullaryExpr(nw, nw, [&] { return n01(rng); });
    const Mat cov = a * a.transpose();
    const Eigen::LLT<Mat> llt(cov);
    TrajectorySet demos;
    for (int m = 0; m < 20; ++m)
      demos.push_back(from_weights(psi, times, mu + llt.matrixL() * Vec::NullaryExpr(nw, [&] { return n01(rng); })));
    const auto p = promp_fit(demos, fam);
    for (Index i = 0; i < nw; ++i)
      CHECK(std::abs(p.mu_w()(i) - mu(i)) <= 3.0 * std::sqrt(cov(i, i) / 20.0));
  }
  SUBCASE("unequal lengths are rescaled in time") {
    Trajectory a{uniform_times(40), Mat(40, 1)}, b{Vec::LinSpaced(25, 2.0, 7.0), Mat(25, 1)};
    a.values.col(0) = a.times;
    b.values.col(0) = (b.times.array() - 2.0) / 5.0;
    const auto p = promp_fit({a, b}, BasisFamily::bernstein(2), 30);
    CHECK(p.steps() == 30);
    CHECK((p.psi().values * p.mu_w() - uniform_times(30)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("too many basis functions") {
    Trajectory a{uniform_times(4), Mat::Zero(4, 1)};
    CHECK_THROWS_WITH_AS(promp_fit({a}, BasisFamily::bernstein(6)), doctest::Contains("bernstein"),
                         SingularSystemError);
  }
}

TEST_CASE("trajectory distribution") {
  SUBCASE("rank structure") {
    const ProMP one(BasisFamily::radial(1), 30, 1, Vec::Ones(1), Mat::Identity(1, 1), 0.0);
    CHECK(oracle::numerical_rank(trajectory_distribution(one).cov(), 1e-9) == 1);
    const auto p = random_promp(40, 2, 5, 0.0, 3);
    const Mat cov = trajectory_distribution(p).cov();
    CHECK(oracle::numerical_rank(cov, 1e-9) <= 10);
    CHECK(Eigen::SelfAdjointEigenSolver<Mat>(cov).eigenvalues().minCoeff() >= -1e-10);
  }
  SUBCASE("marginal mean") {
    const auto p = random_promp(25, 2, 4, 0.01, 8);
    const auto g = trajectory_distribution(p);
    for (Index t = 0; t < 25; ++t)
      for (Index d = 0; d < 2; ++d) {
        double m = 0.0;
        for (Index k = 0; k < 4; ++k)
          m += p.psi().phi(t, k) * p.mu_w()(k * 2 + d);
        CHECK(g.mean()(t * 2 + d) == doctest::Approx(m).epsilon(1e-12));
        CHECK(g.cov()(t * 2 + d, t * 2 + d) >= 0.01);
      }
  }
  SUBCASE("Monte-Carlo moments") {
    const auto p = random_promp(15, 2, 4, 0.05, 21);
    const auto g = trajectory_distribution(p);
    const auto draws = sample_trajectories(p, 10000, 99);
    Mat rows(10000, 30);
    for (Index i = 0; i < 10000; ++i)
      rows.row(i) = stacked(draws[static_cast<std::size_t>(i)]).transpose();
    Vec mean;
    Mat cov;
    oracle::sample_moments(rows, mean, cov);
    for (Index i = 0; i < 30; ++i) {
      CHECK(std::abs(mean(i) - g.mean()(i)) <= 5.0 * std::sqrt(g.cov()(i, i) / 10000.0));
      for (Index j = 0; j < 30; ++j) {
        const double se = std::sqrt((g.cov()(i, i) * g.cov()(j, j) + g.cov()(i, j) * g.cov()(i, j)) / 10000.0);
        CHECK(std::abs(cov(i, j) - g.cov()(i, j)) <= 5.0 * se);
      }
    }
    CHECK(stacked(sample_trajectories(p, 3, 7)[2]) == stacked(sample_trajectories(p, 3, 7)[2]));
    CHECK_THROWS_AS(sample_trajectories(p, 0, 1), ValidationError);
    const ProMP tight(p.family(), 15, 2, p.mu_w(), 1e-24 * Mat::Identity(8, 8), 0.0);
    CHECK((stacked(sample_trajectories(tight, 1, 3)[0]) - g.mean()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("via-point conditioning") {
  const auto p = random_promp(20, 2, 5, 0.02, 17);
  const auto prior = trajectory_distribution(p);
  SUBCASE("uninformative observation") {
    const auto c = condition_via_points(p, {{7, {0, 1}, (Vec(2) << 3.0, -2.0).finished(), 1e12}});
    const auto g = trajectory_distribution(c);
    CHECK((g.mean() - prior.mean()).norm() <= 1e-6 * prior.mean().norm());
    CHECK((g.cov() - prior.cov()).norm() <= 1e-6 * prior.cov().norm());
  }
  SUBCASE("near-hard constraint") {
    const auto c = condition_via_points(p, {{12, {1}, Vec::Constant(1, 0.8), 1e-10}});
    const auto g = trajectory_distribution(c);
    CHECK(std::abs(g.mean()(12 * 2 + 1) - 0.8) <= 1e-4);
    const auto twice = condition_via_points(c, {{12, {1}, Vec::Constant(1, 0.8), 1e-10}});
    CHECK((trajectory_distribution(twice).mean() - g.mean()).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("weight space equals trajectory space") {
    const std::vector<ViaPoint> via = {{0, {0, 1}, (Vec(2) << 0.5, -0.5).finished(), 1e-4},
                                       {19, {0}, Vec::Constant(1, 1.5), 1e-3},
                                       {9, {1}, Vec::Constant(1, -1.0), 0.01}};
    const auto g = trajectory_distribution(condition_via_points(p, via));
    // The noise-free trajectory is observed: condition N(Psi mu, Psi Sigma Psi^T)
    // and add sigma^2 I afterwards.
    const Mat &psi = p.psi().values;
    const Vec mean = psi * p.mu_w();
    const Mat cov = psi * p.sigma_w() * psi.transpose();
    Mat s = Mat::Zero(4, 40);
    s(0, 0) = 1;
    s(1, 1) = 1;
    s(2, 38) = 1;
    s(3, 19) = 1;
    const Vec z = (Vec(4) << 0.5, -0.5, 1.5, -1.0).finished();
    const Mat r = (Vec(4) << 1e-4, 1e-4, 1e-3, 0.01).finished().asDiagonal();
    Vec m_out;
    Mat c_out;
    oracle::condition_full(mean, cov, s, z, r, m_out, c_out);
    c_out.diagonal().array() += p.sigma2();
    CHECK((g.mean() - m_out).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((g.cov() - c_out).cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(condition_via_points(p, {{20, {0}, Vec::Zero(1), 1.0}}), ValidationError);
    CHECK_THROWS_AS(condition_via_points(p, {{0, {2}, Vec::Zero(1), 1.0}}), ValidationError);
    CHECK_THROWS_AS(condition_via_points(p, {{0, {0}, Vec::Zero(1), -1.0}}), ValidationError);
    const ProMP flat(BasisFamily::radial(1), 5, 1, Vec::Zero(1), Mat::Zero(1, 1), 0.0);
    CHECK_THROWS_AS(condition_via_points(flat, {{0, {0}, Vec::Zero(1), 0.0}}), NumericalError);
  }
}

TEST_CASE("principal components") {
  const Index steps = 30;
  const Vec times = uniform_times(steps);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n01;
  const Mat modes = Mat::NullaryExpr(steps, 2, [&] { return n01(rng); });
  TrajectorySet demos;
  for (int m = 0; m < 40; ++m) {
    Trajectory t{times, Mat(steps, 1)};
    t.values.col(0) = times + modes * Vec::NullaryExpr(2, [&] { return n01(rng); }) +
                      1e-6 * Vec::NullaryExpr(steps, [&] { return n01(rng); });
    demos.push_back(t);
  }
  std::vector<std::string> warnings;
  set_warning_handler([&](std::string_view w) { warnings.emplace_back(w); });
  const auto pca = pca_distribution(demos, steps);
  set_warning_handler(nullptr);
  for (Index i = 1; i < pca.eigenvalues.size(); ++i)
    CHECK(pca.eigenvalues(i) <= pca.eigenvalues(i - 1));
  CHECK(pca.eigenvalues(2) <= 1e-9 * pca.eigenvalues(0));
  CHECK(pca.weights.mean().norm() == 0.0);
  CHECK(pca.weights.cov() == Mat::Identity(pca.psi.cols(), pca.psi.cols()));
  CHECK(warnings.size() == 1);
  for (const auto &d : {demos[0], demos[17]}) {
    const Vec x = stacked(d);
    CHECK((pca.reconstruct(pca.project(x)) - x).cwiseAbs().maxCoeff() <= 1e-5);
  }

  TrajectorySet noisy;
  for (int m = 0; m < 40; ++m) {
    Trajectory t{times, Mat(steps, 1)};
    t.values.col(0) = Vec::NullaryExpr(steps, [&] { return n01(rng); });
    noisy.push_back(t);
  }
  const auto full = pca_distribution(noisy, steps);
  CHECK(full.psi.cols() == steps);
  const Vec x = stacked(noisy[3]);
  CHECK((full.reconstruct(full.project(x)) - x).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK_THROWS_AS(pca_distribution({noisy[0]}, 2), ValidationError);
}

TEST_CASE("mixtures of primitives") {
  const Index steps = 40;
  const Vec times = uniform_times(steps);
  const auto fam = BasisFamily::radial(6);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n01;
  TrajectorySet demos;
  for (int m = 0; m < 12; ++m) {
    Trajectory t{times, Mat(steps, 1)};
    const double base = m < 6 ? 5.0 : -5.0;
    for (Index s = 0; s < steps; ++s)
      t.values(s, 0) = base * std::sin(3.0 * times(s)) + 0.1 * n01(rng);
    demos.push_back(t);
  }
  SUBCASE("one component equals the plain fit") {
    const auto plain = promp_fit(demos, fam);
    const auto mix = promp_mixture(demos, fam, 1, {});
    CHECK(mix.weights.priors()(0) == 1.0);
    CHECK((mix.weights.component(0).mean() - plain.mu_w()).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((mix.weights.component(0).cov() - plain.sigma_w()).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(mix.sigma2 == doctest::Approx(plain.sigma2()).epsilon(1e-12));
  }
  SUBCASE("separated clusters") {
    EmConfig cfg;
    cfg.init = EmInit::kmeans_pp;
    cfg.seed = 3;
    const auto mix = promp_mixture(demos, fam, 2, cfg);
    CHECK(mix.weights.priors().sum() == doctest::Approx(1.0).epsilon(1e-14));
    const auto traj = mix.trajectory_mixture();
    for (const TrajectorySet &cluster : {TrajectorySet(demos.begin(), demos.begin() + 6),
                                         TrajectorySet(demos.begin() + 6, demos.end())}) {
      const Vec target = promp_fit(cluster, fam).psi().values * promp_fit(cluster, fam).mu_w();
      double best = 1e300;
      for (Index j = 0; j < 2; ++j)
        best = std::min(best, (traj.component(j).mean() - target).norm() / target.norm());
      CHECK(best <= 0.05);
    }
  }
}

TEST_CASE("nested radial bases never increase the residual") {
  const Index steps = 80;
  const Vec times = uniform_times(steps);
  Mat y(steps, 1);
  for (Index s = 0; s < steps; ++s)
    y(s, 0) = std::sin(7.0 * times(s)) + 0.3 * std::cos(19.0 * times(s));
  double prev = 1e300;
  for (int level = 1; level <= 4; ++level) {
    const int count = (1 << level) + 1;
    auto fam = BasisFamily::radial(count, 0.004, false);
    const auto psi = build_psi(fam, times, 1);
    const Mat w = projection_weights(y.transpose(), psi, fam);
    const double r = (y.col(0) - psi.values * w.row(0).transpose()).squaredNorm();
    CHECK(r <= prev + 1e-10);
    prev = r;
  }
}
