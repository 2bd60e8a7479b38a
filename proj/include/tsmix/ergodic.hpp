#pragma once

#include <cstdint>
#include <vector>

#include "tsmix/fourier.hpp"

namespace tsmix {

/// Lambda_k = (1 + |k|^2)^(-(D+1)/2) over the index set.
CoeffArray smc_lambda(const FourierDomain &dom);

/// 0.5 * sum_k Lambda_k (w_k - target_k)^2
double ergodic_metric(const CoeffArray &w, const CoeffArray &target, const CoeffArray &lambda);

/// Running Fourier statistics of a trajectory. The coefficients are kept as
/// a running sum so that coeffs() is exactly the mean of phi over the
/// visited points.
struct ErgodicState {
  Vec position;
  Index step = 0;
  CoeffArray coeff_sum;
  bool keep_history = false;
  std::vector<Vec> history;

  /// Running average (1/t) sum_s phi(x_s); zeros before the first point.
  CoeffArray coeffs() const;
};

ErgodicState make_ergodic_state(const FourierDomain &dom, const Vec &position,
                                bool keep_history = false);

/// Adds x_new (clamped into [-L/2, L/2]^D with a warning) to the running
/// average and makes it the current position.
void update_coeffs_in_place(ErgodicState &state, const Vec &x_new, const FourierDomain &dom);
ErgodicState update_coeffs(ErgodicState state, const Vec &x_new, const FourierDomain &dom);

struct ErgodicConfig {
  FourierDomain dom;
  CoeffArray target;  // analytic coefficients of the target density
  CoeffArray lambda;
  double u_max;       // speed bound
  double dt;
  int steps;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ControlCommand {
  Vec u;        // clamped command, |u| = u_max unless the raw command vanishes
  Vec u_raw;    // -sum_k Lambda_k (w_k - target_k) grad phi_k(x)
  double epsilon;
};

/// Control from the current state. Before the first point the trajectory
/// coefficients are taken as zeros.
ControlCommand control_step(const ErgodicState &state, const ErgodicConfig &cfg);

struct SimulationResult {
  Mat trajectory;  // steps x D, the position at which each step's command was computed
  Vec epsilon;     // metric after each step's position was added
  ErgodicState final_state;
};

/// Closed loop x <- clamp(x + u dt). Deterministic for a given config.
SimulationResult simulate(const ErgodicConfig &cfg, const Vec &x0, bool keep_history = false);

} // namespace tsmix
