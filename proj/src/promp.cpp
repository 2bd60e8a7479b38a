#include "tsmix/promp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "tsmix/bezier.hpp"

namespace tsmix {

BasisFamily BasisFamily::radial(int count, double bandwidth, bool rescaled) {
  BasisFamily f;
  f.kind = BasisKind::radial;
  f.count = count;
  require(count >= 1, "basis count must be at least 1");
  for (int k = 0; k < count; ++k)
    f.centers.push_back(count == 1 ? 0.5 : static_cast<double>(k) / (count - 1));
  f.bandwidth = bandwidth > 0.0 ? bandwidth : 1.0 / (static_cast<double>(count) * count);
  f.rescaled = rescaled;
  return f;
}

BasisFamily BasisFamily::bernstein(int count) {
  BasisFamily f;
  f.kind = BasisKind::bernstein;
  f.count = count;
  return f;
}

BasisFamily BasisFamily::fourier(int count, double period) {
  BasisFamily f;
  f.kind = BasisKind::fourier;
  f.count = count;
  f.period = period;
  return f;
}

void BasisFamily::validate() const {
  require(count >= 1, "basis count must be at least 1");
  switch (kind) {
  case BasisKind::radial:
    require(static_cast<int>(centers.size()) == count, "radial family needs one center per basis");
    require(bandwidth > 0.0 && std::isfinite(bandwidth), "radial bandwidth must be positive");
    break;
  case BasisKind::bernstein:
    break;
  case BasisKind::fourier:
    require(period > 0.0 && std::isfinite(period), "Fourier period must be positive");
    break;
  }
}

std::string to_string(BasisKind kind) {
  switch (kind) {
  case BasisKind::radial: return "radial";
  case BasisKind::bernstein: return "bernstein";
  case BasisKind::fourier: return "fourier";
  }
  return "unknown";
}

BasisKind basis_kind_from_string(const std::string &name) {
  if (name == "radial" || name == "rbf")
    return BasisKind::radial;
  if (name == "bernstein")
    return BasisKind::bernstein;
  if (name == "fourier")
    return BasisKind::fourier;
  throw ValidationError("unknown basis family '" + name + "'");
}

std::string BasisFamily::name() const {
  std::ostringstream s;
  s << to_string(kind) << " family with K=" << count;
  return s.str();
}

Mat BasisFamily::evaluate(const Vec &times) const {
  validate();
  Mat phi(times.size(), count);
  for (Index t = 0; t < times.size(); ++t) {
    const double x = times(t);
    switch (kind) {
    case BasisKind::radial: {
      Vec loga(count);
      for (int k = 0; k < count; ++k) {
        const double d = x - centers[static_cast<std::size_t>(k)];
        loga(k) = -0.5 * d * d / bandwidth;
      }
      if (rescaled) {
        const double top = loga.maxCoeff();
        Vec a = (loga.array() - top).exp();
        phi.row(t) = (a / a.sum()).transpose();
      } else {
        phi.row(t) = loga.array().exp().transpose();
      }
      break;
    }
    case BasisKind::bernstein:
      if (count == 1)
        phi(t, 0) = 1.0;
      else
        phi.row(t) = bernstein_all(count - 1, std::clamp(x, 0.0, 1.0)).transpose();
      break;
    case BasisKind::fourier:
      for (int k = 0; k < count; ++k)
        phi(t, k) = std::cos(2.0 * std::numbers::pi * k * x / period);
      break;
    }
  }
  return phi;
}

PsiMatrix build_psi(const BasisFamily &family, const Vec &times, Index dim) {
  require(times.size() >= 1, "need at least one time sample");
  require(dim >= 1, "trajectory dimension must be at least 1");
  PsiMatrix psi;
  psi.phi = family.evaluate(times);
  psi.steps = times.size();
  psi.dim = dim;
  psi.count = family.count;
  psi.values = Mat::Zero(psi.steps * dim, psi.count * dim);
  for (Index t = 0; t < psi.steps; ++t)
    for (Index k = 0; k < psi.count; ++k)
      for (Index d = 0; d < dim; ++d)
        psi.values(t * dim + d, k * dim + d) = psi.phi(t, k);
  return psi;
}

Vec uniform_times(Index steps) {
  require(steps >= 1, "need at least one time sample");
  if (steps == 1)
    return Vec::Zero(1);
  return Vec::LinSpaced(steps, 0.0, 1.0);
}

Trajectory resample(const Trajectory &traj, Index steps) {
  const Index n = traj.times.size();
  require(n >= 1 && traj.values.rows() == n, "trajectory needs matching times and samples");
  require(steps >= 1, "resampling length must be at least 1");
  Trajectory out;
  out.times = uniform_times(steps);
  out.values.resize(steps, traj.values.cols());
  if (n == 1) {
    out.values.rowwise() = traj.values.row(0);
    return out;
  }
  const double t0 = traj.times(0);
  const double span = traj.times(n - 1) - t0;
  require(span > 0.0, "trajectory time stamps must be increasing");
  Index seg = 0;
  for (Index j = 0; j < steps; ++j) {
    const double s = out.times(j);
    while (seg < n - 2 && (traj.times(seg + 1) - t0) / span <= s)
      ++seg;
    const double a = (traj.times(seg) - t0) / span;
    const double b = (traj.times(seg + 1) - t0) / span;
    const double w = std::clamp((s - a) / (b - a), 0.0, 1.0);
    out.values.row(j) = (1.0 - w) * traj.values.row(seg) + w * traj.values.row(seg + 1);
  }
  return out;
}

Mat stack_trajectories(const TrajectorySet &demos, Index steps, Index &dim_out, Index &steps_out) {
  require(!demos.empty(), "need at least one demonstration");
  const Index dim = demos.front().values.cols();
  require(dim >= 1, "demonstrations must have at least one dimension");
  if (steps == 0)
    steps = demos.front().values.rows();
  Mat stacked(static_cast<Index>(demos.size()), steps * dim);
  for (std::size_t m = 0; m < demos.size(); ++m) {
    require(demos[m].values.cols() == dim, "demonstrations must share a dimension");
    const Trajectory r = resample(demos[m], steps);
    for (Index t = 0; t < steps; ++t)
      stacked.row(static_cast<Index>(m)).segment(t * dim, dim) = r.values.row(t);
  }
  dim_out = dim;
  steps_out = steps;
  return stacked;
}

Trajectory unstack(const Vec &x, const Vec &times, Index dim) {
  require(x.size() == times.size() * dim, "vector length does not match T x D");
  Trajectory t;
  t.times = times;
  t.values.resize(times.size(), dim);
  for (Index s = 0; s < times.size(); ++s)
    t.values.row(s) = x.segment(s * dim, dim).transpose();
  return t;
}

ProMP::ProMP(BasisFamily family, Index steps, Index dim, Vec mu_w, Mat sigma_w, double sigma2)
    : family_(std::move(family)), times_(uniform_times(steps)),
      psi_(build_psi(family_, times_, dim)), mu_w_(std::move(mu_w)), sigma_w_(std::move(sigma_w)),
      sigma2_(sigma2) {
  const Index n = psi_.values.cols();
  require(mu_w_.size() == n, "weight mean has the wrong length");
  require(sigma_w_.rows() == n && sigma_w_.cols() == n, "weight covariance has the wrong shape");
  require(sigma2_ >= 0.0 && std::isfinite(sigma2_), "observation noise must be nonnegative");
  const double scale = std::max(sigma_w_.cwiseAbs().maxCoeff(), 1e-300);
  require((sigma_w_ - sigma_w_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "weight covariance must be symmetric");
}

Mat projection_weights(const Mat &stacked, const PsiMatrix &psi, const BasisFamily &family) {
  const Index dim = psi.dim;
  const Index steps = psi.steps;
  const Index count = psi.count;
  require(stacked.cols() == steps * dim, "stacked trajectories do not match the basis matrix");
  // (Psi^T Psi)^{-1} Psi^T x factors through the T x K basis: per dimension
  // the weights are (phi^T phi)^{-1} phi^T x_d.
  const Mat gram = psi.phi.transpose() * psi.phi;
  Eigen::LDLT<Mat> ldlt(gram);
  const double scale = gram.diagonal().cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
      ldlt.vectorD().minCoeff() <= 1e-13 * scale)
    throw SingularSystemError("basis matrix is rank deficient for the " + family.name() + " on " +
                              std::to_string(steps) + " time steps");
  Mat weights(stacked.rows(), count * dim);
  Mat samples(steps, dim);
  for (Index m = 0; m < stacked.rows(); ++m) {
    for (Index t = 0; t < steps; ++t)
      samples.row(t) = stacked.row(m).segment(t * dim, dim);
    const Mat w = ldlt.solve(psi.phi.transpose() * samples);  // K x D
    for (Index k = 0; k < count; ++k)
      weights.row(m).segment(k * dim, dim) = w.row(k);
  }
  return weights;
}

namespace {

double pooled_residual(const Mat &stacked, const Mat &weights, const PsiMatrix &psi) {
  const Mat recon = weights * psi.values.transpose();
  return (stacked - recon).squaredNorm() / static_cast<double>(stacked.size());
}

} // namespace

ProMP promp_fit(const TrajectorySet &demos, const BasisFamily &family, Index steps) {
  family.validate();
  Index dim = 0;
  Index t_common = 0;
  const Mat stacked = stack_trajectories(demos, steps, dim, t_common);
  const PsiMatrix psi = build_psi(family, uniform_times(t_common), dim);
  const Mat weights = projection_weights(stacked, psi, family);
  const Vec mu = weights.colwise().mean().transpose();
  const Mat centered = weights.rowwise() - mu.transpose();
  Mat sigma = centered.transpose() * centered / static_cast<double>(weights.rows());
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  sigma.diagonal().array() += covariance_regularizer(sigma);
  return ProMP(family, t_common, dim, mu, sigma, pooled_residual(stacked, weights, psi));
}

Gaussian trajectory_distribution(const ProMP &p) {
  const Mat &psi = p.psi().values;
  Mat cov = psi * p.sigma_w() * psi.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  cov.diagonal().array() += p.sigma2();
  return Gaussian(psi * p.mu_w(), cov);
}

ProMP condition_via_points(const ProMP &p, const std::vector<ViaPoint> &via) {
  const Index dim = p.dim();
  std::vector<Index> rows;
  std::vector<double> values;
  std::vector<double> noise;
  for (const auto &v : via) {
    require(v.time_index >= 0 && v.time_index < p.steps(),
            "via-point time index " + std::to_string(v.time_index) + " out of range");
    require(!v.dims.empty() && static_cast<Index>(v.dims.size()) == v.value.size(),
            "via-point needs one value per constrained dimension");
    require(v.noise >= 0.0 && std::isfinite(v.noise), "via-point noise must be nonnegative");
    for (std::size_t j = 0; j < v.dims.size(); ++j) {
      require(v.dims[j] >= 0 && v.dims[j] < dim,
              "via-point dimension " + std::to_string(v.dims[j]) + " out of range");
      rows.push_back(v.time_index * dim + v.dims[j]);
      values.push_back(v.value(static_cast<Index>(j)));
      noise.push_back(v.noise);
    }
  }
  if (rows.empty())
    return p;
  const Mat h = p.psi().values(rows, Eigen::all);
  const Vec y = Eigen::Map<const Vec>(values.data(), static_cast<Index>(values.size()));
  const Mat sh = p.sigma_w() * h.transpose();
  Mat s = h * sh;
  s.diagonal() += Eigen::Map<const Vec>(noise.data(), static_cast<Index>(noise.size()));
  Eigen::LLT<Mat> llt(s);
  if (llt.info() != Eigen::Success)
    throw NumericalError("constrained block is singular; add via-point noise");
  const Mat gain = llt.solve(sh.transpose()).transpose();
  const Vec mu = p.mu_w() + gain * (y - h * p.mu_w());
  Mat sigma = p.sigma_w() - gain * sh.transpose();
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return ProMP(p.family(), p.steps(), dim, mu, sigma, p.sigma2());
}

TrajectorySet sample_trajectories(const ProMP &p, Index n, std::uint64_t seed) {
  require(n >= 1, "sample count must be at least 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Mat root = covariance_sqrt(p.sigma_w());
  const double noise = std::sqrt(p.sigma2());
  const Index nw = p.mu_w().size();
  const Index nx = p.psi().values.rows();
  TrajectorySet out;
  Vec z(nw), e(nx);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < nw; ++j)
      z(j) = normal(rng);
    for (Index j = 0; j < nx; ++j)
      e(j) = normal(rng);
    const Vec w = p.mu_w() + root * z;
    out.push_back(unstack(p.psi().values * w + noise * e, p.times(), p.dim()));
  }
  return out;
}

Vec PcaModel::project(const Vec &x) const {
  require(x.size() == mean.size(), "trajectory vector has the wrong length");
  // psi has orthogonal columns: z_i = v_i^T (x - mean) / sqrt(lambda_i).
  const Vec norms = psi.colwise().squaredNorm().transpose();
  return (psi.transpose() * (x - mean)).cwiseQuotient(norms);
}

Vec PcaModel::reconstruct(const Vec &z) const {
  require(z.size() == psi.cols(), "latent vector has the wrong length");
  return mean + psi * z;
}

PcaModel pca_distribution(const TrajectorySet &demos, Index components, Index steps) {
  require(demos.size() >= 2, "PCA needs at least two demonstrations");
  require(components >= 1, "component count must be at least 1");
  PcaModel model;
  const Mat stacked = stack_trajectories(demos, steps, model.dim, model.steps);
  model.mean = stacked.colwise().mean().transpose();
  const Mat centered = stacked.rowwise() - model.mean.transpose();
  const Mat cov = centered.transpose() * centered / static_cast<double>(stacked.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
  if (eig.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the trajectory covariance failed");
  // Eigen returns ascending order.
  model.eigenvalues = eig.eigenvalues().reverse();
  const Mat vectors = eig.eigenvectors().rowwise().reverse();
  const double top = std::max(model.eigenvalues(0), 0.0);
  Index positive = 0;
  while (positive < model.eigenvalues.size() && model.eigenvalues(positive) > 1e-10 * top &&
         model.eigenvalues(positive) > 0.0)
    ++positive;
  Index keep = std::min(components, model.eigenvalues.size());
  if (keep > positive) {
    std::ostringstream msg;
    msg << "requested " << components << " components but only " << positive
        << " eigenvalues are positive; truncating";
    warn(msg.str());
    keep = positive;
  }
  require(keep >= 1, "trajectory covariance has no positive eigenvalue");
  model.psi = vectors.leftCols(keep) * model.eigenvalues.head(keep).cwiseSqrt().asDiagonal();
  model.weights = Gaussian(Vec::Zero(keep), Mat::Identity(keep, keep));
  return model;
}

MixtureModel ProMPMixture::trajectory_mixture() const {
  std::vector<Gaussian> comps;
  for (const auto &c : weights.components()) {
    const Gaussian g = linear_transform(c, psi.values);
    Mat cov = g.cov();
    cov.diagonal().array() += sigma2;
    comps.emplace_back(g.mean(), cov);
  }
  return MixtureModel(weights.priors(), std::move(comps));
}

ProMPMixture promp_mixture(const TrajectorySet &demos, const BasisFamily &family, int components,
                           const EmConfig &config, Index steps) {
  family.validate();
  require(components >= 1, "mixture needs at least one component");
  require(static_cast<Index>(demos.size()) >= components,
          "need at least as many demonstrations as mixture components");
  Index dim = 0;
  Index t_common = 0;
  const Mat stacked = stack_trajectories(demos, steps, dim, t_common);
  ProMPMixture mix;
  mix.family = family;
  mix.times = uniform_times(t_common);
  mix.psi = build_psi(family, mix.times, dim);
  const Mat weights = projection_weights(stacked, mix.psi, family);
  mix.weights = em_fit(weights, components, config).model;
  mix.sigma2 = pooled_residual(stacked, weights, mix.psi);
  return mix;
}

} // namespace tsmix
