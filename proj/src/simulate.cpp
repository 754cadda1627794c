#include "modwhittle/simulate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "modwhittle/fft.hpp"
#include "modwhittle/random.hpp"

namespace modwhittle {

namespace {

constexpr std::size_t kCholeskyCap = 2048;

Series cholesky_draw(std::span<const cplx> acv, std::size_t n, std::uint64_t seed,
                     bool complex_valued) {
  if (n > kCholeskyCap) throw SimulationError("circulant embedding failed and N exceeds the Cholesky cap");
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd cov(m, m);
  for (Eigen::Index s = 0; s < m; ++s)
    for (Eigen::Index t = 0; t < m; ++t) {
      const long lag = static_cast<long>(s - t);
      cov(s, t) = lag >= 0 ? acv[static_cast<std::size_t>(lag)]
                           : std::conj(acv[static_cast<std::size_t>(-lag)]);
    }
  Eigen::LLT<Eigen::MatrixXcd> llt(cov);
  if (llt.info() != Eigen::Success) {
    // Semi-definite covariances: a tiny ridge keeps the factorisation usable.
    const double ridge = 1e-12 * std::max(1.0, std::abs(acv[0]));
    cov.diagonal().array() += ridge;
    llt.compute(cov);
    if (llt.info() != Eigen::Success)
      throw SimulationError("autocovariance is not positive semi-definite");
  }
  Rng rng(seed);
  Eigen::VectorXcd xi(m);
  for (Eigen::Index t = 0; t < m; ++t)
    xi(t) = complex_valued ? rng.complex_normal(1.0) : cplx{rng.normal(), 0.0};
  const Eigen::VectorXcd x = llt.matrixL() * xi;
  std::vector<cplx> out(x.data(), x.data() + m);
  if (!complex_valued) {
    for (auto& v : out) v = v.real();
    return Series(std::move(out), 1.0, SeriesKind::real);
  }
  return Series::complex(std::move(out));
}

}  // namespace

Series simulate_ar(const LatentModel& model, std::size_t n, std::uint64_t seed) {
  if (model.family() != Family::ar && model.family() != Family::ma)
    throw InvalidArgument("simulate_ar needs an AR or MA model");
  model.validate();
  const auto& v = model.params().values();
  const double sigma = v.back();
  std::vector<double> x(n, 0.0);
  if (sigma == 0.0 || n == 0) return Series::real(x);
  Rng rng(seed);
  const std::size_t order = v.size() - 1;
  if (model.family() == Family::ma) {
    std::vector<double> eps(n + order);
    for (auto& e : eps) e = rng.normal();
    for (std::size_t t = 0; t < n; ++t) {
      double s = eps[t + order];
      for (std::size_t j = 1; j <= order; ++j) s += v[j - 1] * eps[t + order - j];
      x[t] = sigma * s;
    }
    return Series::real(x);
  }
  const std::size_t p = std::min(order, n);
  if (p > 0) {
    const auto c = model.autocov_sequence(p);
    const auto m = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd cov(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) cov(a, b) = c[static_cast<std::size_t>(std::abs(a - b))].real();
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw DomainError("AR start covariance is not positive definite");
    Eigen::VectorXd xi(m);
    for (Eigen::Index a = 0; a < m; ++a) xi(a) = rng.normal();
    const Eigen::VectorXd x0 = llt.matrixL() * xi;
    for (std::size_t t = 0; t < p; ++t) x[t] = x0(static_cast<Eigen::Index>(t));
  }
  for (std::size_t t = p; t < n; ++t) {
    double s = sigma * rng.normal();
    for (std::size_t j = 1; j <= order; ++j) s += v[j - 1] * x[t - j];
    x[t] = s;
  }
  return Series::real(x);
}

Series simulate_complex_ar1(double r, double sigma, std::span<const double> beta, std::size_t n,
                            std::uint64_t seed) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("complex AR(1) needs 0 <= r < 1");
  if (!(sigma >= 0.0)) throw DomainError("complex AR(1) needs sigma >= 0");
  if (!beta.empty() && beta.size() != n) throw InvalidArgument("frequency path length differs from N");
  std::vector<cplx> z(n);
  if (n == 0) return Series::complex(z);
  Rng rng(seed);
  const double s2 = sigma * sigma;
  z[0] = rng.complex_normal(s2 / (1.0 - r * r));
  for (std::size_t t = 1; t < n; ++t) {
    const double b = beta.empty() ? 0.0 : beta[t];
    z[t] = std::polar(r, b) * z[t - 1] + rng.complex_normal(s2);
  }
  return Series::complex(std::move(z));
}

Series simulate_from_acv(std::span<const cplx> acv, std::size_t n, std::uint64_t seed,
                         bool complex_valued) {
  if (acv.size() < n) throw InvalidArgument("autocovariance shorter than the requested length");
  if (n == 0) throw InvalidArgument("simulation length must be positive");
  if (!complex_valued)
    for (std::size_t t = 0; t < n; ++t)
      if (acv[t].imag() != 0.0) throw InvalidArgument("real simulation needs a real autocovariance");
  if (n == 1) {
    Rng rng(seed);
    const double var = acv[0].real();
    if (var < 0.0) throw SimulationError("negative variance");
    const cplx x = complex_valued ? rng.complex_normal(var) : cplx{std::sqrt(var) * rng.normal(), 0.0};
    return complex_valued ? Series::complex({x}) : Series(std::vector<cplx>{x}, 1.0, SeriesKind::real);
  }
  const std::size_t m = 2 * (n - 1);
  std::vector<cplx> row(m);
  for (std::size_t k = 0; k < n; ++k) row[k] = acv[k];
  for (std::size_t k = n; k < m; ++k) row[k] = std::conj(acv[m - k]);
  auto lambda = fft::forward(row);
  double lmax = 0.0, lmin = 0.0;
  for (const auto& l : lambda) {
    lmax = std::max(lmax, l.real());
    lmin = std::min(lmin, l.real());
  }
  if (lmin < -1e-10 * std::max(lmax, 1e-300)) return cholesky_draw(acv, n, seed, complex_valued);

  Rng rng(seed);
  std::vector<cplx> w(m);
  const double xi_var = complex_valued ? 1.0 : 2.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double l = std::max(lambda[k].real(), 0.0);
    w[k] = std::sqrt(l / static_cast<double>(m)) * rng.complex_normal(xi_var);
  }
  fft::backward_inplace(w);
  std::vector<cplx> out(w.begin(), w.begin() + static_cast<long>(n));
  if (!complex_valued) {
    for (auto& v : out) v = v.real();
    return Series(std::move(out), 1.0, SeriesKind::real);
  }
  return Series::complex(std::move(out));
}

Series simulate_latent(const LatentModel& model, std::size_t n, std::uint64_t seed) {
  model.validate();
  const auto& v = model.params().values();
  switch (model.family()) {
    case Family::ar:
    case Family::ma:
      return simulate_ar(model, n, seed);
    case Family::complex_ar1: {
      std::vector<double> beta(n, v[2]);
      return simulate_complex_ar1(v[0], v[1], beta, n, seed);
    }
    case Family::ou: {
      const auto ar = ou_to_ar(v[0], v[1], model.delta());
      std::vector<double> beta(n, 2.0 * std::numbers::pi * v[2] * model.delta());
      auto s = simulate_complex_ar1(ar.r, ar.sigma, beta, n, seed);
      return Series::complex(s.values(), model.delta());
    }
    case Family::matern: {
      auto s = simulate_from_acv(model.autocov_sequence(n), n, seed, true);
      return Series::complex(s.values(), model.delta());
    }
  }
  throw InvalidArgument("unknown model family");
}

Series simulate_modulated(const LatentModel& model, const Modulator& mod, std::uint64_t seed) {
  auto x = simulate_latent(model, mod.size(), seed);
  std::vector<cplx> y = x.values();
  for (std::size_t t = 0; t < y.size(); ++t) y[t] *= mod[t];
  const bool real = !x.is_complex() && !mod.is_complex();
  return Series(std::move(y), x.delta(), real ? SeriesKind::real : SeriesKind::complex);
}

std::vector<double> bounded_random_walk_beta(double gamma, double span, double step,
                                             std::size_t n, std::uint64_t seed) {
  if (!(span > 0.0)) throw InvalidArgument("bounded random walk needs Delta > 0");
  if (!(step >= 0.0)) throw InvalidArgument("bounded random walk needs A >= 0");
  const double lo = gamma - span, hi = gamma + span;
  auto clamp = [&](double x) { return std::max(std::min(x, hi), lo); };
  Rng rng(seed);
  std::vector<double> beta(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double base = t == 0 ? gamma : beta[t - 1];
    beta[t] = clamp(base + step * rng.normal());
  }
  return beta;
}

}  // namespace modwhittle
