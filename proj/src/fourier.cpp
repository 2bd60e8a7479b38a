#include "tsmix/fourier.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tsmix/kernels.hpp"

namespace tsmix {

using std::numbers::pi;

FourierDomain::FourierDomain(double period, int dim, int per_dim)
    : period_(period), dim_(dim), per_dim_(per_dim) {
  require(std::isfinite(period) && period > 0.0, "Fourier period must be positive");
  require(dim >= 1, "Fourier dimension must be at least 1");
  require(per_dim >= 1, "coefficients per dimension must be at least 1");
  const double total = std::pow(static_cast<double>(per_dim), dim);
  require(total <= 1e8, "Fourier index set is too large");
  size_ = static_cast<Index>(total);
}

Eigen::VectorXi FourierDomain::index(Index flat) const {
  require(flat >= 0 && flat < size_, "flat Fourier index out of range");
  Eigen::VectorXi k(dim_);
  for (int d = dim_ - 1; d >= 0; --d) {
    k(d) = static_cast<int>(flat % per_dim_);
    flat /= per_dim_;
  }
  return k;
}

bool FourierDomain::contains(const Eigen::VectorXi &k) const {
  return k.size() == dim_ && (k.array() >= 0).all() && (k.array() < per_dim_).all();
}

Index FourierDomain::flat(const Eigen::VectorXi &k) const {
  require(contains(k), "index vector outside the Fourier index set");
  Index f = 0;
  for (int d = 0; d < dim_; ++d)
    f = f * per_dim_ + k(d);
  return f;
}

std::complex<double> basis_1d(double x, int k, double period) {
  require(period > 0.0, "Fourier period must be positive");
  const double a = 2.0 * pi * k * x / period;
  return std::complex<double>(std::cos(a), -std::sin(a)) / period;
}

double basis_nd(const Vec &x, const Eigen::VectorXi &k, const FourierDomain &dom) {
  require(x.size() == dom.dim() && dom.contains(k), "basis arguments do not match the domain");
  double v = 1.0 / std::pow(dom.period(), dom.dim());
  for (int d = 0; d < dom.dim(); ++d)
    v *= std::cos(2.0 * pi * k(d) * x(d) / dom.period());
  return v;
}

Vec grad_basis_nd(const Vec &x, const Eigen::VectorXi &k, const FourierDomain &dom) {
  require(x.size() == dom.dim() && dom.contains(k), "basis arguments do not match the domain");
  const double l = dom.period();
  const double norm = 1.0 / std::pow(l, dom.dim());
  Vec g(dom.dim());
  for (int d = 0; d < dom.dim(); ++d) {
    double v = -norm * std::sin(2.0 * pi * k(d) * x(d) / l) * 2.0 * pi * k(d) / l;
    for (int e = 0; e < dom.dim(); ++e)
      if (e != d)
        v *= std::cos(2.0 * pi * k(e) * x(e) / l);
    g(d) = v;
  }
  return g;
}

void basis_all(const Vec &x, const FourierDomain &dom, Vec &phi, Mat *grad) {
  require(x.size() == dom.dim(), "point dimension does not match the domain");
  Mat cos_table(dom.dim(), dom.per_dim());
  Mat sin_table(dom.dim(), dom.per_dim());
  for (int d = 0; d < dom.dim(); ++d)
    for (int k = 0; k < dom.per_dim(); ++k) {
      const double a = 2.0 * pi * k * x(d) / dom.period();
      cos_table(d, k) = std::cos(a);
      sin_table(d, k) = std::sin(a);
    }
  kernels::cosine_basis(cos_table, sin_table, dom.period(), phi, grad);
}

Mat sign_patterns(int dim) {
  require(dim >= 1 && dim <= 20, "sign patterns need 1 <= D <= 20");
  const Index count = Index{1} << dim;
  Mat s(count, dim);
  for (Index m = 0; m < count; ++m)
    for (int d = 0; d < dim; ++d)
      s(m, d) = ((m >> (dim - 1 - d)) & 1) ? 1.0 : -1.0;
  return s;
}

MixtureModel mirror_gmm(const MixtureModel &m, const FourierDomain &dom) {
  require(m.dim() == dom.dim(), "mixture dimension does not match the Fourier domain");
  const double half = 0.5 * dom.period();
  for (Index j = 0; j < m.size(); ++j) {
    const Vec &mu = m.component(j).mean();
    if ((mu.array() < 0.0).any() || (mu.array() > half).any()) {
      std::ostringstream msg;
      msg << "component " << j << " mean lies outside [0, L/2]^D";
      warn(msg.str());
    }
  }
  const Mat signs = sign_patterns(dom.dim());
  const double share = 1.0 / static_cast<double>(signs.rows());
  std::vector<Gaussian> comps;
  Vec weights(m.size() * signs.rows());
  Index idx = 0;
  for (Index j = 0; j < m.size(); ++j) {
    for (Index s = 0; s < signs.rows(); ++s) {
      const Mat a = signs.row(s).transpose().asDiagonal();
      comps.push_back(linear_transform(m.component(j), a));
      weights(idx++) = m.priors()(j) * share;
    }
  }
  return MixtureModel::from_weights(weights, std::move(comps));
}

CoeffArray gmm_coeffs(const MixtureModel &m, const FourierDomain &dom) {
  require(m.dim() == dom.dim(), "mixture dimension does not match the Fourier domain");
  std::vector<kernels::SpectralComponent> comps;
  for (Index j = 0; j < m.size(); ++j)
    comps.push_back({m.priors()(j), m.component(j).mean(), m.component(j).cov()});
  // Patterns A and -A contribute equally; keep the half with a leading -1.
  const Mat signs = sign_patterns(dom.dim()).topRows(Index{1} << (dom.dim() - 1));
  CoeffArray out;
  kernels::mirrored_gmm_coeffs(comps, signs, dom.period(), dom.dim(), dom.per_dim(), out);
  return out;
}

ComplexCoeffs shift_coeffs(const ComplexCoeffs &w, double shift, const FourierDomain &dom) {
  require(dom.dim() == 1, "the shift property is defined for 1-D coefficients");
  require(w.size() == dom.size(), "coefficient array does not match the domain");
  ComplexCoeffs out(w.size());
  for (Index k = 0; k < w.size(); ++k) {
    const double a = 2.0 * pi * static_cast<double>(k) * shift / dom.period();
    out(k) = std::complex<double>(std::cos(a), -std::sin(a)) * w(k);
  }
  return out;
}

CoeffArray combine_coeffs(const CoeffArray &w1, const CoeffArray &w2, double a1, double a2) {
  require(w1.size() == w2.size(), "coefficient arrays must share a domain");
  return a1 * w1 + a2 * w2;
}

double reconstruct(const CoeffArray &w, const Vec &x, const FourierDomain &dom) {
  require(w.size() == dom.size() && x.size() == dom.dim(), "reconstruction arguments do not match");
  Mat factor(dom.dim(), dom.per_dim());
  for (int d = 0; d < dom.dim(); ++d)
    for (int k = 0; k < dom.per_dim(); ++k)
      factor(d, k) = k == 0 ? 1.0 : 2.0 * std::cos(2.0 * pi * k * x(d) / dom.period());
  double g = 0.0;
  for (Index f = 0; f < dom.size(); ++f) {
    const auto k = dom.index(f);
    double term = w(f);
    for (int d = 0; d < dom.dim(); ++d)
      term *= factor(d, k(d));
    g += term;
  }
  return g;
}

} // namespace tsmix
