#include "doctest.h"

#include <random>

#include "tsmix/kernels.hpp"

using namespace tsmix::kernels;

namespace {

std::mt19937_64 rng(77);
std::normal_distribution<double> n01;

Mat random_mat(Index r, Index c) {
  return Mat::NullaryExpr(r, c, [] { return n01(rng); });
}

Mat random_lower(Index d) {
  Mat l = random_mat(d, d).triangularView<Eigen::Lower>();
  l.diagonal() = l.diagonal().cwiseAbs().array() + 0.5;
  return l;
}

} // namespace

TEST_CASE("log-density table") {
  const Mat pts = random_mat(1000, 3);
  std::vector<GaussianTerm> terms;
  for (int k = 0; k < 5; ++k)
    terms.push_back({random_mat(3, 1).col(0), random_lower(3), n01(rng)});
  Mat a, b;
  serial::log_density_table(pts, terms, a);
  omp::log_density_table(pts, terms, b);
  CHECK(a.rows() == 1000);
  CHECK(a == b);
}

TEST_CASE("mirrored coefficients") {
  std::vector<SpectralComponent> comps;
  for (int k = 0; k < 3; ++k) {
    const Mat a = random_mat(2, 2);
    comps.push_back({1.0 / 3.0, random_mat(2, 1).col(0), a * a.transpose() * 0.01});
  }
  Mat signs(2, 2);
  signs << -1, -1, -1, 1;
  Vec a, b;
  serial::mirrored_gmm_coeffs(comps, signs, 2.0, 2, 30, a);
  omp::mirrored_gmm_coeffs(comps, signs, 2.0, 2, 30, b);
  CHECK(a.size() == 900);
  CHECK(a == b);
}

TEST_CASE("cosine basis") {
  const Mat x = random_mat(2, 1);
  Mat c(2, 25), s(2, 25);
  for (Index d = 0; d < 2; ++d)
    for (Index k = 0; k < 25; ++k) {
      c(d, k) = std::cos(2.0 * 3.14159 * k * x(d, 0) / 2.0);
      s(d, k) = std::sin(2.0 * 3.14159 * k * x(d, 0) / 2.0);
    }
  Vec pa, pb;
  Mat ga, gb;
  serial::cosine_basis(c, s, 2.0, pa, &ga);
  omp::cosine_basis(c, s, 2.0, pb, &gb);
  CHECK(pa == pb);
  CHECK(ga == gb);
}

TEST_CASE("regression") {
  std::vector<RegressionTerm> terms;
  for (int k = 0; k < 4; ++k)
    terms.push_back({{random_mat(2, 1).col(0), random_lower(2), -1.0}, std::log(0.25), random_mat(2, 1).col(0),
                     random_mat(2, 2), 0.1 * Mat::Identity(2, 2)});
  const Mat q = random_mat(700, 2);
  RegressionBatch a, b;
  serial::gmr_predict(q, terms, a);
  omp::gmr_predict(q, terms, b);
  CHECK(a.means == b.means);
  CHECK(a.covs == b.covs);
  CHECK(a.responsibilities == b.responsibilities);
  CHECK(a.max_log_density == b.max_log_density);
}

TEST_CASE("local regression") {
  std::vector<LocalModel> models;
  for (int k = 0; k < 6; ++k)
    models.push_back({random_mat(1, 1).col(0), Mat::Constant(1, 1, 0.4), Vec::Constant(1, 2.5), random_mat(3, 2)});
  const Mat q = random_mat(900, 1);
  Mat a, b;
  serial::lwr_predict(q, models, 2, a);
  omp::lwr_predict(q, models, 2, b);
  CHECK(a.rows() == 900);
  CHECK(a == b);
}
