#pragma once

// Independent reference implementations used only by the tests. They follow
// the defining sums literally and share no code with the library beyond the
// basic types.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

inline std::vector<double> grid(std::size_t n) {
  const long nn = static_cast<long>(n);
  const long lo = -((nn + 1) / 2) + 1;
  std::vector<double> w;
  for (long k = lo; k <= nn / 2; ++k) w.push_back(2.0 * pi * static_cast<double>(k) / static_cast<double>(nn));
  return w;
}

/// N^{-1/2} sum_t x_t e^{-i w t} at every grid frequency.
inline std::vector<cplx> dft(const std::vector<cplx>& x) {
  const auto w = grid(x.size());
  std::vector<cplx> out;
  for (double f : w) {
    cplx s = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) s += x[t] * std::polar(1.0, -f * static_cast<double>(t));
    out.push_back(s / std::sqrt(static_cast<double>(x.size())));
  }
  return out;
}

/// (1/N) sum_{t=0}^{N-1-tau} conj(g_t) g_{t+tau}.
inline std::vector<cplx> cg(const std::vector<cplx>& g) {
  const std::size_t n = g.size();
  std::vector<cplx> c(n);
  for (std::size_t tau = 0; tau < n; ++tau) {
    cplx s = 0.0;
    for (std::size_t t = 0; t + tau < n; ++t) s += std::conj(g[t]) * g[t + tau];
    c[tau] = s / static_cast<double>(n);
  }
  return c;
}

/// sum_{|tau|<N} cbar(tau) e^{-i w tau} with the Hermitian extension.
inline std::vector<double> expected_periodogram(const std::vector<cplx>& cbar) {
  const auto w = grid(cbar.size());
  const long n = static_cast<long>(cbar.size());
  std::vector<double> out;
  for (double f : w) {
    cplx s = 0.0;
    for (long tau = -(n - 1); tau <= n - 1; ++tau) {
      const cplx c = tau >= 0 ? cbar[static_cast<std::size_t>(tau)] : std::conj(cbar[static_cast<std::size_t>(-tau)]);
      s += c * std::polar(1.0, -f * static_cast<double>(tau));
    }
    out.push_back(s.real());
  }
  return out;
}

/// Real AR(1) autocovariance sigma^2 a^|tau| / (1 - a^2).
inline double ar1_acv(double a, double sigma, long tau) {
  return sigma * sigma * std::pow(a, std::abs(static_cast<double>(tau))) / (1.0 - a * a);
}

/// Complex AR(1) autocovariance E{conj(X_t) X_{t+tau}}.
inline cplx car1_acv(double r, double sigma, double rot, long tau) {
  const double v = sigma * sigma / (1.0 - r * r) * std::pow(r, std::abs(static_cast<double>(tau)));
  return std::polar(v, rot * static_cast<double>(tau));
}

/// log det C + y^H C^{-1} y divided by N, by determinant and inverse.
inline double dense_nll(const Eigen::MatrixXcd& c, const Eigen::VectorXcd& y) {
  const cplx det = c.determinant();
  const Eigen::MatrixXcd inv = c.inverse();
  const cplx quad = y.adjoint() * inv * y;
  return (std::log(std::abs(det)) + quad.real()) / static_cast<double>(y.size());
}

/// (1/N) sum_w [log f + I / f] with I from the literal DFT.
inline double whittle(const std::vector<cplx>& x, const std::vector<double>& f) {
  const auto j = dft(x);
  double s = 0.0;
  for (std::size_t i = 0; i < j.size(); ++i) s += std::log(f[i]) + std::norm(j[i]) / f[i];
  return s / static_cast<double>(x.size());
}

}  // namespace oracle
