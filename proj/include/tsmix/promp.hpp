#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsmix/gaussians.hpp"

namespace tsmix {

enum class BasisKind { radial, bernstein, fourier };

/// Basis functions of normalized time t in [0, 1].
///  - radial: Gaussian RBFs at `centers` with shared variance `bandwidth`,
///    rescaled to a partition of unity unless `rescaled` is false;
///  - bernstein: Bernstein polynomials of degree count - 1;
///  - fourier: cos(2 pi k t / period) for k = 0..count-1.
struct BasisFamily {
  BasisKind kind = BasisKind::radial;
  int count = 1;
  std::vector<double> centers;
  double bandwidth = 0.0;
  bool rescaled = true;
  double period = 2.0;

  /// Centers uniform on [0, 1]; bandwidth <= 0 selects (1/K)^2.
  static BasisFamily radial(int count, double bandwidth = 0.0, bool rescaled = true);
  static BasisFamily bernstein(int count);
  static BasisFamily fourier(int count, double period = 2.0);

  void validate() const;
  std::string name() const;
  /// T x K matrix of basis values.
  Mat evaluate(const Vec &times) const;
};

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string &name);

/// Block basis matrix phi (x) I_D: row t*D + d, column k*D + d.
struct PsiMatrix {
  Mat values;  // DT x DK
  Mat phi;     // T x K
  Index steps = 0;
  Index dim = 0;
  Index count = 0;
};

PsiMatrix build_psi(const BasisFamily &family, const Vec &times, Index dim);

/// One demonstration: time stamps and T x D samples.
struct Trajectory {
  Vec times;
  Mat values;
};
using TrajectorySet = std::vector<Trajectory>;

/// Linear time rescaling onto `steps` uniform samples over [0, 1].
Trajectory resample(const Trajectory &traj, Index steps);
/// Resamples every demonstration to a common length (0 selects the first
/// demonstration's length) and stacks them as rows of time-major vectors.
Mat stack_trajectories(const TrajectorySet &demos, Index steps, Index &dim_out, Index &steps_out);
/// Inverse of the stacking for one DT vector.
Trajectory unstack(const Vec &x, const Vec &times, Index dim);

Vec uniform_times(Index steps);

class ProMP {
public:
  ProMP(BasisFamily family, Index steps, Index dim, Vec mu_w, Mat sigma_w, double sigma2);

  const BasisFamily &family() const { return family_; }
  const PsiMatrix &psi() const { return psi_; }
  const Vec &times() const { return times_; }
  const Vec &mu_w() const { return mu_w_; }
  const Mat &sigma_w() const { return sigma_w_; }
  double sigma2() const { return sigma2_; }
  Index steps() const { return psi_.steps; }
  Index dim() const { return psi_.dim; }

private:
  BasisFamily family_;
  Vec times_;
  PsiMatrix psi_;
  Vec mu_w_;
  Mat sigma_w_;
  double sigma2_;
};

/// Least-squares weights of each stacked trajectory (rows), M x DK.
Mat projection_weights(const Mat &stacked, const PsiMatrix &psi, const BasisFamily &family);

/// Weight-space Gaussian with covariance loading 1e-8 trace / (DK), and
/// sigma^2 as the pooled mean squared reconstruction residual.
ProMP promp_fit(const TrajectorySet &demos, const BasisFamily &family, Index steps = 0);

/// N(Psi mu_w, Psi Sigma_w Psi^T + sigma^2 I)
Gaussian trajectory_distribution(const ProMP &p);

struct ViaPoint {
  Index time_index;
  std::vector<int> dims;
  Vec value;
  double noise;  // observation variance
};

/// Gaussian conditioning in weight space on noisy observations of the
/// noise-free trajectory Psi w; the result carries the original sigma^2.
ProMP condition_via_points(const ProMP &p, const std::vector<ViaPoint> &via);

TrajectorySet sample_trajectories(const ProMP &p, Index n, std::uint64_t seed);

/// Principal-component trajectory model: x = mean + psi z, z ~ N(0, I).
struct PcaModel {
  Vec mean;
  Mat psi;          // DT x r, columns v_i * sqrt(lambda_i)
  Vec eigenvalues;  // all DT eigenvalues of the sample covariance, non-increasing
  Index steps = 0;
  Index dim = 0;
  Gaussian weights;

  Vec project(const Vec &x) const;
  Vec reconstruct(const Vec &z) const;
};

PcaModel pca_distribution(const TrajectorySet &demos, Index components, Index steps = 0);

struct ProMPMixture {
  BasisFamily family;
  Vec times;
  PsiMatrix psi;
  MixtureModel weights;
  double sigma2 = 0.0;

  /// Each weight component mapped through Psi, plus sigma^2 I.
  MixtureModel trajectory_mixture() const;
};

ProMPMixture promp_mixture(const TrajectorySet &demos, const BasisFamily &family, int components,
                           const EmConfig &config, Index steps = 0);

} // namespace tsmix
