// Serial reference kernels against their OpenMP counterparts.
// Usage: tsmix_bench [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>

#include <omp.h>

#include "tsmix/fourier.hpp"
#include "tsmix/gmr.hpp"
#include "tsmix/kernels.hpp"

using namespace tsmix;

namespace {

double best_of(int repeats, const std::function<void()> &fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

template <typename Out>
void report(const char *name, int repeats, const std::function<void(Out &)> &serial,
            const std::function<void(Out &)> &parallel, const std::function<bool(const Out &, const Out &)> &same) {
  Out a, b;
  const double ts = best_of(repeats, [&] { serial(a); });
  const double tp = best_of(repeats, [&] { parallel(b); });
  std::printf("%-22s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   identical %s\n", name, ts, tp,
              ts / tp, same(a, b) ? "yes" : "NO");
}

bool same_mat(const Mat &a, const Mat &b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; }

MixtureModel random_mixture(int k, int dim, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Gaussian> comps;
  Vec w(k);
  for (int j = 0; j < k; ++j) {
    Mat a = Mat::NullaryExpr(dim, dim, [&] { return u(rng) - 0.5; });
    comps.emplace_back(Vec::NullaryExpr(dim, [&] { return u(rng); }),
                       Mat(0.05 * a * a.transpose() + 0.01 * Mat::Identity(dim, dim)));
    w(j) = 0.5 + u(rng);
  }
  return MixtureModel::from_weights(w, std::move(comps));
}

} // namespace

int main(int argc, char **argv) {
  const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;

  {
    const auto m = random_mixture(8, 4, rng);
    std::vector<kernels::GaussianTerm> terms;
    for (Index k = 0; k < m.size(); ++k) {
      const CovFactor f(m.component(k).cov());
      terms.push_back({m.component(k).mean(), f.lower(), std::log(m.priors()(k)) + f.log_normalizer()});
    }
    const Mat pts = Mat::NullaryExpr(200000, 4, [&] { return n01(rng); });
    report<Mat>("log_density_table", repeats,
                [&](Mat &o) { kernels::serial::log_density_table(pts, terms, o); },
                [&](Mat &o) { kernels::omp::log_density_table(pts, terms, o); }, same_mat);
  }
  {
    const FourierDomain dom(2.0, 2, 64);
    const auto m = random_mixture(6, 2, rng);
    std::vector<kernels::SpectralComponent> comps;
    for (Index k = 0; k < m.size(); ++k)
      comps.push_back({m.priors()(k), m.component(k).mean(), m.component(k).cov()});
    const Mat signs = sign_patterns(2).topRows(2);
    report<Vec>("mirrored_gmm_coeffs", repeats,
                [&](Vec &o) { kernels::serial::mirrored_gmm_coeffs(comps, signs, 2.0, 2, 64, o); },
                [&](Vec &o) { kernels::omp::mirrored_gmm_coeffs(comps, signs, 2.0, 2, 64, o); },
                [](const Vec &a, const Vec &b) { return a == b; });
  }
  {
    const int k = 128;
    Mat c(2, k), s(2, k);
    for (int d = 0; d < 2; ++d)
      for (int i = 0; i < k; ++i) {
        c(d, i) = std::cos(0.3 * i * (d + 1));
        s(d, i) = std::sin(0.3 * i * (d + 1));
      }
    struct Out {
      Vec phi;
      Mat grad;
    };
    report<Out>("cosine_basis", repeats,
                [&](Out &o) { kernels::serial::cosine_basis(c, s, 2.0, o.phi, &o.grad); },
                [&](Out &o) { kernels::omp::cosine_basis(c, s, 2.0, o.phi, &o.grad); },
                [](const Out &a, const Out &b) { return a.phi == b.phi && a.grad == b.grad; });
  }
  {
    const GmrRegressor reg(random_mixture(10, 4, rng), DimensionSplit({0, 1}, {2, 3}, 4));
    const Mat q = Mat::NullaryExpr(100000, 2, [&] { return 0.5 + 0.2 * n01(rng); });
    report<kernels::RegressionBatch>(
        "gmr_predict", repeats, [&](auto &o) { kernels::serial::gmr_predict(q, reg.terms(), o); },
        [&](auto &o) { kernels::omp::gmr_predict(q, reg.terms(), o); },
        [](const auto &a, const auto &b) {
          return a.means == b.means && a.covs == b.covs && a.responsibilities == b.responsibilities;
        });
  }
  {
    const int degree = 3, k = 20;
    std::vector<kernels::LocalModel> models;
    for (int i = 0; i < k; ++i)
      models.push_back({Vec::Constant(1, (i + 0.5) / k), Mat::Constant(1, 1, 1.0 / k),
                        Vec::Constant(1, static_cast<double>(k)),
                        Mat::NullaryExpr(1 + degree, 2, [&] { return n01(rng); })});
    const Mat q = Mat::NullaryExpr(200000, 1, [&] { return std::abs(n01(rng)); });
    report<Mat>("lwr_predict", repeats, [&](Mat &o) { kernels::serial::lwr_predict(q, models, degree, o); },
                [&](Mat &o) { kernels::omp::lwr_predict(q, models, degree, o); }, same_mat);
  }
  return 0;
}
