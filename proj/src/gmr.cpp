#include "tsmix/gmr.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace tsmix {

GmrRegressor::GmrRegressor(MixtureModel joint, DimensionSplit split)
    : joint_(std::move(joint)), split_(std::move(split)) {
  require(split_.dim() == joint_.dim(), "split dimension does not match the joint model");
  const auto &in = split_.input();
  const auto &out = split_.output();
  for (Index k = 0; k < joint_.size(); ++k) {
    const auto &c = joint_.component(k);
    const Mat s_in = c.cov()(in, in);
    const Mat s_oi = c.cov()(out, in);
    const CovFactor f(s_in);
    const Mat gain = f.solve(s_oi.transpose()).transpose();
    Mat cond = c.cov()(out, out) - gain * s_oi.transpose();
    cond = 0.5 * (cond + cond.transpose()).eval();
    const double prior = joint_.priors()(k);
    const double log_prior = prior > 0.0 ? std::log(prior) : -std::numeric_limits<double>::infinity();
    terms_.push_back({{c.mean()(in), f.lower(), log_prior + f.log_normalizer()},
                      log_prior,
                      c.mean()(out),
                      gain,
                      cond});
  }
}

void GmrRegressor::check_support(double max_log_density) const {
  if (max_log_density < kFarFromSupportLogDensity) {
    std::ostringstream msg;
    msg << "query is far from the model support (max input log-density " << max_log_density << ")";
    throw FarFromSupportError(msg.str(), max_log_density);
  }
}

Vec GmrRegressor::responsibilities(const Vec &x_in) const {
  require(x_in.size() == input_dim(), "query has the wrong input dimension");
  kernels::RegressionBatch b;
  kernels::serial::gmr_predict(x_in.transpose(), terms_, b);
  check_support(b.max_log_density(0));
  return b.responsibilities.row(0).transpose();
}

MixtureModel GmrRegressor::conditional(const Vec &x_in) const {
  const Vec h = responsibilities(x_in);
  std::vector<Gaussian> comps;
  for (const auto &t : terms_)
    comps.emplace_back(t.output_mean + t.gain * (x_in - t.input.mean), t.cond_cov);
  return MixtureModel::from_weights(h, std::move(comps));
}

Gaussian GmrRegressor::unimodal(const Vec &x_in) const {
  if (joint_.size() == 1) {
    // One component: exactly the conditional Gaussian.
    const auto &t = terms_.front();
    responsibilities(x_in); // support check
    return Gaussian(t.output_mean + t.gain * (x_in - t.input.mean), t.cond_cov);
  }
  return moment_match(conditional(x_in));
}

GmrRegressor::Batch GmrRegressor::predict(const Mat &queries) const {
  require(queries.cols() == input_dim(), "queries have the wrong input dimension");
  kernels::RegressionBatch b;
  kernels::gmr_predict(queries, terms_, b);
  for (Index i = 0; i < queries.rows(); ++i)
    check_support(b.max_log_density(i));
  Batch out{b.means, {}, b.responsibilities};
  const Index o = output_dim();
  for (Index i = 0; i < queries.rows(); ++i)
    out.covs.push_back(Eigen::Map<const Mat>(b.covs.row(i).eval().data(), o, o));
  return out;
}

GmrRegressor dynamics_regressor(const MixtureModel &joint) {
  require(joint.dim() % 2 == 0 && joint.dim() >= 2,
          "a dynamics model needs an even dimension (positions then velocities)");
  const int d = static_cast<int>(joint.dim() / 2);
  std::vector<int> in(static_cast<std::size_t>(d)), out(static_cast<std::size_t>(d));
  std::iota(in.begin(), in.end(), 0);
  std::iota(out.begin(), out.end(), d);
  return GmrRegressor(joint, DimensionSplit(in, out, joint.dim()));
}

Vec gmr_dynamics_step(const GmrRegressor &dynamics, const Vec &x, double dt) {
  require(dt >= 0.0, "time step must be nonnegative");
  require(dynamics.output_dim() == dynamics.input_dim() && x.size() == dynamics.input_dim(),
          "dynamics model must map positions to velocities of the same size");
  return x + dt * dynamics.unimodal(x).mean();
}

Mat synthesize(const GmrRegressor &dynamics, const Vec &x0, double dt, int steps) {
  require(steps >= 0, "step count must be nonnegative");
  Mat path(steps + 1, x0.size());
  Vec x = x0;
  path.row(0) = x.transpose();
  for (int s = 1; s <= steps; ++s) {
    x = gmr_dynamics_step(dynamics, x, dt);
    path.row(s) = x.transpose();
  }
  return path;
}

} // namespace tsmix
