#pragma once

#include <complex>

#include "tsmix/gaussians.hpp"

namespace tsmix {

/// Period L over [-L/2, L/2]^D with K coefficients per dimension. The index
/// set {0..K-1}^D is flattened row-major (last dimension fastest), so flat
/// index 0 is the zero vector.
class FourierDomain {
public:
  FourierDomain(double period, int dim, int per_dim);

  double period() const { return period_; }
  int dim() const { return dim_; }
  int per_dim() const { return per_dim_; }
  /// K^D
  Index size() const { return size_; }

  Eigen::VectorXi index(Index flat) const;
  Index flat(const Eigen::VectorXi &k) const;
  bool contains(const Eigen::VectorXi &k) const;

private:
  double period_;
  int dim_;
  int per_dim_;
  Index size_;
};

/// Real coefficient array over the flat index set.
using CoeffArray = Vec;
using ComplexCoeffs = Eigen::VectorXcd;

/// (1/L) exp(-i 2 pi k x / L)
std::complex<double> basis_1d(double x, int k, double period);

/// (1/L^D) prod_d cos(2 pi k_d x_d / L), the real part of the complex
/// exponential basis, used for densities that are even in every coordinate.
double basis_nd(const Vec &x, const Eigen::VectorXi &k, const FourierDomain &dom);
Vec grad_basis_nd(const Vec &x, const Eigen::VectorXi &k, const FourierDomain &dom);

/// basis_nd for every flat index and, optionally, the D x K^D gradient.
void basis_all(const Vec &x, const FourierDomain &dom, Vec &phi, Mat *grad = nullptr);

/// The 2^D sign patterns (rows) in {-1,+1}^D with the first dimension most
/// significant and -1 before +1: for D = 2, (-1,-1), (-1,+1), (+1,-1), (+1,+1).
Mat sign_patterns(int dim);

/// Even extension of a mixture on [0, L/2]^D: 2^D J components with weights
/// alpha_j / 2^D, means A_m mu_j and covariances A_m Sigma_j A_m^T, ordered
/// by component then sign pattern. Warns (without rejecting) about means
/// outside [0, L/2]^D.
MixtureModel mirror_gmm(const MixtureModel &m, const FourierDomain &dom);

/// Analytic coefficients of the mirrored mixture, real-valued:
/// (1/L^D) sum_j sum_{m < 2^(D-1)} alpha_j / 2^(D-1) cos(2 pi k^T A_m mu_j / L)
///   exp(-2 pi^2 k^T A_m Sigma_j A_m^T k / L^2).
CoeffArray gmm_coeffs(const MixtureModel &m, const FourierDomain &dom);

/// Shift property (1-D): exp(-i 2 pi k mu / L) w_k are the coefficients of
/// g(x - mu).
ComplexCoeffs shift_coeffs(const ComplexCoeffs &w, double shift, const FourierDomain &dom);

/// Combination property: a1 w1 + a2 w2.
CoeffArray combine_coeffs(const CoeffArray &w1, const CoeffArray &w2, double a1, double a2);

/// Even-function series value sum_k w_k prod_d (k_d == 0 ? 1 : 2 cos(2 pi k_d x_d / L)).
double reconstruct(const CoeffArray &w, const Vec &x, const FourierDomain &dom);

} // namespace tsmix
