#include "tsmix/gaussians.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "tsmix/kernels.hpp"

namespace tsmix {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_sum_exp(const Eigen::Ref<const Vec> &v) {
  const double top = v.maxCoeff();
  if (!std::isfinite(top))
    return top;
  return top + std::log((v.array() - top).exp().sum());
}

Mat symmetrized(const Mat &m) { return 0.5 * (m + m.transpose()); }

kernels::GaussianTerm make_term(const Gaussian &g, double log_prior) {
  const CovFactor f(g.cov());
  return {g.mean(), f.lower(), log_prior + f.log_normalizer()};
}

} // namespace

double covariance_regularizer(const Mat &cov) {
  if (cov.rows() == 0)
    return 0.0;
  return 1e-8 * cov.trace() / static_cast<double>(cov.rows());
}

CovFactor::CovFactor(const Mat &cov) {
  require(cov.rows() == cov.cols() && cov.rows() > 0, "covariance must be square and non-empty");
  const double reg = std::max(0.0, covariance_regularizer(cov));
  Mat loaded = cov;
  loaded.diagonal().array() += reg;
  Eigen::LLT<Mat> llt(loaded);
  if (llt.info() != Eigen::Success)
    throw DegenerateCovarianceError("covariance is not positive definite after regularization");
  lower_ = llt.matrixL();
  const auto diag = lower_.diagonal().array();
  if ((diag <= 0.0).any() || !diag.allFinite())
    throw DegenerateCovarianceError("covariance is singular after regularization");
  log_det_ = 2.0 * diag.log().sum();
}

double CovFactor::log_normalizer() const {
  return -0.5 * (static_cast<double>(dim()) * kLog2Pi + log_det_);
}

double CovFactor::mahalanobis_squared(const Vec &diff) const {
  return lower_.triangularView<Eigen::Lower>().solve(diff).squaredNorm();
}

Mat CovFactor::solve(const Mat &rhs) const {
  const Mat y = lower_.triangularView<Eigen::Lower>().solve(rhs);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Gaussian::Gaussian(Vec mean, Mat cov) : mean_(std::move(mean)) {
  require(cov.rows() == cov.cols(), "covariance must be square");
  require(cov.rows() == mean_.size(), "mean and covariance dimensions differ");
  require(mean_.size() > 0, "Gaussian dimension must be positive");
  require(mean_.allFinite() && cov.allFinite(), "Gaussian parameters must be finite");
  const double scale = std::max(cov.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  require((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "covariance is not symmetric");
  cov_ = symmetrized(cov);
}

double Gaussian::log_pdf(const Vec &x) const {
  require(x.size() == dim(), "point dimension does not match the Gaussian");
  const CovFactor f(cov_);
  return f.log_normalizer() - 0.5 * f.mahalanobis_squared(x - mean_);
}

double Gaussian::pdf(const Vec &x) const { return std::exp(log_pdf(x)); }

MixtureModel::MixtureModel(Vec priors, std::vector<Gaussian> components)
    : priors_(std::move(priors)), components_(std::move(components)) {
  require(!components_.empty(), "mixture needs at least one component");
  require(priors_.size() == size(), "one prior per component required");
  require((priors_.array() >= 0.0).all(), "priors must be nonnegative");
  require(std::abs(priors_.sum() - 1.0) <= 1e-12, "priors must sum to 1");
  for (const auto &c : components_)
    require(c.dim() == dim(), "mixture components must share a dimension");
}

MixtureModel MixtureModel::from_weights(const Vec &weights, std::vector<Gaussian> components) {
  require(weights.size() > 0 && (weights.array() >= 0.0).all() && weights.sum() > 0.0,
          "mixture weights must be nonnegative and not all zero");
  Vec priors = weights / weights.sum();
  // Absorb the rounding residue so the sum is within 1e-12.
  priors /= priors.sum();
  return MixtureModel(std::move(priors), std::move(components));
}

double MixtureModel::log_pdf(const Vec &x) const {
  Vec terms(size());
  for (Index k = 0; k < size(); ++k)
    terms(k) = (priors_(k) > 0.0 ? std::log(priors_(k)) : -std::numeric_limits<double>::infinity()) +
               component(k).log_pdf(x);
  return log_sum_exp(terms);
}

double MixtureModel::pdf(const Vec &x) const { return std::exp(log_pdf(x)); }

DimensionSplit::DimensionSplit(std::vector<int> input_dims, std::vector<int> output_dims, Index dim)
    : input_(std::move(input_dims)), output_(std::move(output_dims)), dim_(dim) {
  require(!input_.empty() && !output_.empty(), "input and output dimension lists must be non-empty");
  std::vector<bool> seen(static_cast<std::size_t>(std::max<Index>(dim, 0)), false);
  for (const auto *list : {&input_, &output_}) {
    for (int i : *list) {
      require(i >= 0 && i < dim, "dimension index " + std::to_string(i) + " out of range");
      require(!seen[static_cast<std::size_t>(i)],
              "dimension index " + std::to_string(i) + " repeated across the split");
      seen[static_cast<std::size_t>(i)] = true;
    }
  }
}

Gaussian linear_transform(const Gaussian &g, const Mat &a, const Vec &b) {
  require(a.cols() == g.dim(), "transform has " + std::to_string(a.cols()) +
                                   " columns, Gaussian has dimension " + std::to_string(g.dim()));
  require(b.size() == a.rows(), "offset length must match transform rows");
  return Gaussian(a * g.mean() + b, symmetrized(a * g.cov() * a.transpose()));
}

Gaussian linear_transform(const Gaussian &g, const Mat &a) {
  return linear_transform(g, a, Vec::Zero(a.rows()));
}

Gaussian condition(const Gaussian &g, const DimensionSplit &split, const Vec &x_in) {
  require(split.dim() == g.dim(), "split dimension does not match the Gaussian");
  const auto &in = split.input();
  const auto &out = split.output();
  require(x_in.size() == static_cast<Index>(in.size()), "conditioning value has wrong length");
  const Mat s_in = g.cov()(in, in);
  const Mat s_oi = g.cov()(out, in);
  const CovFactor f(s_in);
  const Mat gain = f.solve(s_oi.transpose()).transpose();
  const Vec mean = g.mean()(out) + gain * (x_in - g.mean()(in));
  const Mat cov = g.cov()(out, out) - gain * s_oi.transpose();
  return Gaussian(mean, symmetrized(cov));
}

Gaussian moment_match(const MixtureModel &m) {
  require(m.size() > 0, "moment matching needs a non-empty mixture");
  const Index d = m.dim();
  Vec mean = Vec::Zero(d);
  Mat second = Mat::Zero(d, d);
  for (Index k = 0; k < m.size(); ++k) {
    const auto &c = m.component(k);
    mean += m.priors()(k) * c.mean();
    second += m.priors()(k) * (c.cov() + c.mean() * c.mean().transpose());
  }
  if (m.size() == 1)
    return m.component(0);
  return Gaussian(mean, symmetrized(second - mean * mean.transpose()));
}

double log_likelihood(const MixtureModel &m, const Mat &data) {
  std::vector<kernels::GaussianTerm> terms;
  for (Index k = 0; k < m.size(); ++k)
    terms.push_back(make_term(m.component(k), std::log(m.priors()(k))));
  Mat table;
  kernels::log_density_table(data, terms, table);
  double total = 0.0;
  for (Index n = 0; n < table.rows(); ++n)
    total += log_sum_exp(table.row(n).transpose());
  return total;
}

namespace {

struct Moments {
  Vec mean;
  Mat cov;
};

Moments weighted_moments(const Mat &data, const Vec &weights) {
  const double mass = weights.sum();
  const Vec mean = data.transpose() * weights / mass;
  const Mat centered = data.rowwise() - mean.transpose();
  Mat cov = centered.transpose() * weights.asDiagonal() * centered / mass;
  return {mean, symmetrized(cov)};
}

Mat regularized(Mat cov) {
  cov.diagonal().array() += covariance_regularizer(cov);
  return cov;
}

// Initial hard assignment of points to components.
std::vector<int> initial_labels(const Mat &data, int num, const EmConfig &config) {
  const Index n = data.rows();
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  if (config.init == EmInit::binning) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return data(a, 0) < data(b, 0); });
    for (Index i = 0; i < n; ++i)
      labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] =
          static_cast<int>(i * num / n);
    return labels;
  }

  // k-means++ seeding followed by a few Lloyd iterations.
  std::mt19937_64 rng(config.seed);
  Mat centers(num, data.cols());
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centers.row(0) = data.row(pick(rng));
  Vec dist2 = (data.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < num; ++c) {
    const double total = dist2.sum();
    Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      for (chosen = 0; chosen < n - 1; ++chosen) {
        r -= dist2(chosen);
        if (r <= 0.0)
          break;
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(c) = data.row(chosen);
    dist2 = dist2.cwiseMin((data.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  for (int iter = 0; iter < 10; ++iter) {
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      (centers.rowwise() - data.row(i)).rowwise().squaredNorm().minCoeff(&best);
      labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    Mat sums = Mat::Zero(num, data.cols());
    Vec counts = Vec::Zero(num);
    for (Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += data.row(i);
      counts(labels[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (int c = 0; c < num; ++c)
      if (counts(c) > 0.0)
        centers.row(c) = sums.row(c) / counts(c);
  }
  return labels;
}

} // namespace

EmResult em_fit(const Mat &data, int num_components, const EmConfig &config) {
  const Index n = data.rows();
  const Index d = data.cols();
  require(num_components >= 1, "number of components must be at least 1");
  require(n >= num_components, "need at least as many points as components");
  require(d >= 1, "data dimension must be positive");
  require(data.allFinite(), "data must be finite");
  require(config.max_iter >= 1, "max_iter must be at least 1");

  const Moments global = weighted_moments(data, Vec::Ones(n));

  // Initialization from hard labels.
  const auto labels = initial_labels(data, num_components, config);
  Vec priors(num_components);
  std::vector<Gaussian> comps;
  for (int k = 0; k < num_components; ++k) {
    Vec w = Vec::Zero(n);
    for (Index i = 0; i < n; ++i)
      if (labels[static_cast<std::size_t>(i)] == k)
        w(i) = 1.0;
    const double count = w.sum();
    if (count < static_cast<double>(d + 1)) {
      // Too few points for a covariance estimate: borrow the global one.
      const Vec mean = count > 0.0 ? Vec(data.transpose() * w / count) : global.mean;
      comps.emplace_back(mean, regularized(global.cov));
    } else {
      const Moments mo = weighted_moments(data, w);
      comps.emplace_back(mo.mean, regularized(mo.cov));
    }
    priors(k) = std::max(count, 1.0);
  }
  MixtureModel model = MixtureModel::from_weights(priors, comps);

  EmDiagnostics diag;
  Mat table;
  Vec row_ll(n);
  for (int iter = 0; iter < config.max_iter; ++iter) {
    // E-step in the log domain.
    std::vector<kernels::GaussianTerm> terms;
    terms.reserve(static_cast<std::size_t>(num_components));
    for (int k = 0; k < num_components; ++k) {
      const double p = model.priors()(k);
      terms.push_back(make_term(model.component(k),
                                p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity()));
    }
    kernels::log_density_table(data, terms, table);
    double ll = 0.0;
    for (Index i = 0; i < n; ++i) {
      row_ll(i) = log_sum_exp(table.row(i).transpose());
      ll += row_ll(i);
    }
    diag.log_likelihood.push_back(ll);
    diag.iterations = iter;

    if (iter > 0) {
      const double prev = diag.log_likelihood[diag.log_likelihood.size() - 2];
      const bool reseeded_last = !diag.reseed_iterations.empty() &&
                                 diag.reseed_iterations.back() == iter - 1;
      if (!reseeded_last && ll - prev < config.tol * std::abs(prev)) {
        diag.converged = true;
        break;
      }
    }

    const Mat resp = (table.colwise() - row_ll).array().exp().matrix();

    // M-step.
    Vec mass = resp.colwise().sum().transpose();
    std::vector<Gaussian> next;
    next.reserve(static_cast<std::size_t>(num_components));
    bool reseeded = false;
    for (int k = 0; k < num_components; ++k) {
      if (mass(k) < config.empty_fraction * static_cast<double>(n)) {
        // Re-seed at the worst-explained point (lowest total responsibility
        // mass sum_k pi_k N(x|k)); ties resolve to the lowest index.
        Index worst = 0;
        row_ll.minCoeff(&worst);
        next.emplace_back(data.row(worst).transpose(), regularized(global.cov));
        mass(k) = static_cast<double>(n) / num_components;
        row_ll(worst) = std::numeric_limits<double>::infinity();
        reseeded = true;
        continue;
      }
      const Moments mo = weighted_moments(data, resp.col(k));
      next.emplace_back(mo.mean, regularized(mo.cov));
    }
    if (reseeded)
      diag.reseed_iterations.push_back(iter);
    model = MixtureModel::from_weights(mass, std::move(next));
    diag.iterations = iter + 1;
  }
  if (!diag.converged && diag.iterations >= config.max_iter) {
    // The final M-step produced parameters that were not scored yet.
    diag.log_likelihood.push_back(log_likelihood(model, data));
  }
  return {std::move(model), std::move(diag)};
}

Mat covariance_sqrt(const Mat &cov) {
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() == Eigen::Success && (Mat(llt.matrixL()).diagonal().array() > 0.0).all())
    return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
  const Vec vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * vals.asDiagonal();
}

Mat sample(const MixtureModel &m, Index n, std::uint64_t seed) {
  require(n >= 1, "sample count must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<double> weights(m.priors().data(), m.priors().data() + m.size());
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Mat> roots;
  for (const auto &c : m.components())
    roots.push_back(covariance_sqrt(c.cov()));
  Mat out(n, m.dim());
  Vec z(m.dim());
  for (Index i = 0; i < n; ++i) {
    const int k = pick(rng);
    for (Index j = 0; j < z.size(); ++j)
      z(j) = normal(rng);
    out.row(i) = (m.component(k).mean() + roots[static_cast<std::size_t>(k)] * z).transpose();
  }
  return out;
}

Mat sample(const Gaussian &g, Index n, std::uint64_t seed) {
  return sample(MixtureModel(Vec::Ones(1), {g}), n, seed);
}

} // namespace tsmix
