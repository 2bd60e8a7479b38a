#include "tsmix/ergodic.hpp"

#include <cmath>

namespace tsmix {

namespace {

// Returns true if anything was clamped.
bool clamp_to_domain(Vec &x, const FourierDomain &dom) {
  const double half = 0.5 * dom.period();
  const Vec clamped = x.cwiseMax(-half).cwiseMin(half);
  const bool changed = (clamped.array() != x.array()).any();
  x = clamped;
  return changed;
}

} // namespace

CoeffArray smc_lambda(const FourierDomain &dom) {
  CoeffArray lambda(dom.size());
  const double power = -0.5 * (dom.dim() + 1);
  for (Index f = 0; f < dom.size(); ++f) {
    const auto k = dom.index(f);
    lambda(f) = std::pow(1.0 + k.cast<double>().squaredNorm(), power);
  }
  return lambda;
}

double ergodic_metric(const CoeffArray &w, const CoeffArray &target, const CoeffArray &lambda) {
  require(w.size() == target.size() && w.size() == lambda.size(), "coefficient arrays differ in size");
  return 0.5 * (lambda.array() * (w - target).array().square()).sum();
}

CoeffArray ErgodicState::coeffs() const {
  if (step == 0)
    return CoeffArray::Zero(coeff_sum.size());
  return coeff_sum / static_cast<double>(step);
}

ErgodicState make_ergodic_state(const FourierDomain &dom, const Vec &position, bool keep_history) {
  require(position.size() == dom.dim(), "position dimension does not match the domain");
  ErgodicState s;
  s.position = position;
  s.coeff_sum = CoeffArray::Zero(dom.size());
  s.keep_history = keep_history;
  return s;
}

void update_coeffs_in_place(ErgodicState &state, const Vec &x_new, const FourierDomain &dom) {
  require(x_new.size() == dom.dim(), "position dimension does not match the domain");
  require(state.coeff_sum.size() == dom.size(), "state does not match the domain");
  Vec x = x_new;
  if (clamp_to_domain(x, dom))
    warn("position outside [-L/2, L/2]^D was clamped");
  Vec phi;
  basis_all(x, dom, phi);
  state.coeff_sum += phi;
  ++state.step;
  state.position = x;
  if (state.keep_history)
    state.history.push_back(x);
}

ErgodicState update_coeffs(ErgodicState state, const Vec &x_new, const FourierDomain &dom) {
  update_coeffs_in_place(state, x_new, dom);
  return state;
}

void ErgodicConfig::validate() const {
  require(target.size() == dom.size(), "target coefficients do not match the domain");
  require(lambda.size() == dom.size(), "lambda weights do not match the domain");
  require((lambda.array() > 0.0).all() && (lambda.array() <= 1.0).all(),
          "lambda weights must lie in (0, 1]");
  require(std::isfinite(u_max) && u_max > 0.0, "u_max must be positive");
  require(std::isfinite(dt) && dt >= 0.0, "dt must be nonnegative");
  require(steps >= 0, "step count must be nonnegative");
}

ControlCommand control_step(const ErgodicState &state, const ErgodicConfig &cfg) {
  require(state.position.size() == cfg.dom.dim(), "state does not match the domain");
  const CoeffArray w = state.coeffs();
  const CoeffArray weighted = cfg.lambda.array() * (w - cfg.target).array();
  Vec phi;
  Mat grad;
  basis_all(state.position, cfg.dom, phi, &grad);
  ControlCommand cmd;
  cmd.u_raw = -(grad * weighted);
  cmd.epsilon = ergodic_metric(w, cfg.target, cfg.lambda);
  const double norm = cmd.u_raw.norm();
  cmd.u = norm < 1e-12 ? Vec::Zero(cfg.dom.dim()) : Vec(cmd.u_raw * (cfg.u_max / norm));
  return cmd;
}

SimulationResult simulate(const ErgodicConfig &cfg, const Vec &x0, bool keep_history) {
  cfg.validate();
  require(x0.size() == cfg.dom.dim(), "initial position dimension does not match the domain");
  SimulationResult r;
  r.trajectory.resize(cfg.steps, cfg.dom.dim());
  r.epsilon.resize(cfg.steps);
  Vec x = x0;
  if (clamp_to_domain(x, cfg.dom))
    warn("initial position outside [-L/2, L/2]^D was clamped");
  ErgodicState state = make_ergodic_state(cfg.dom, x, keep_history);
  for (int s = 0; s < cfg.steps; ++s) {
    update_coeffs_in_place(state, x, cfg.dom);
    const ControlCommand cmd = control_step(state, cfg);
    r.trajectory.row(s) = x.transpose();
    r.epsilon(s) = cmd.epsilon;
    x += cmd.u * cfg.dt;
    clamp_to_domain(x, cfg.dom);
  }
  state.position = x;
  r.final_state = std::move(state);
  return r;
}

} // namespace tsmix
