#include <algorithm>
#include <numbers>

#include "doctest.h"
#include "modwhittle/random.hpp"
#include "modwhittle/simulate.hpp"
#include "oracles.hpp"

using namespace modwhittle;
using std::numbers::pi;

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("zero innovation variance gives zeros") {
    auto y = simulate_ar(LatentModel::ar({0.5}, 0.0), 20, 1);
    for (auto v : y.values()) CHECK(v == cplx(0.0));
  }

  TEST_CASE("white noise variance") {
    auto y = simulate_ar(LatentModel::ar({0.0}, 2.0), 100000, 3).real_part();
    double m = mean_of(y), s2 = 0.0;
    for (double x : y) s2 += x * x;
    s2 /= y.size();
    CHECK(std::abs(s2 - 4.0) <= 3.0 * 4.0 * std::sqrt(2.0 / 100000.0));
    CHECK(std::abs(m) <= 3.0 * 2.0 / std::sqrt(100000.0));
  }

  TEST_CASE("ar1 lag-one autocorrelation") {
    auto y = simulate_ar(LatentModel::ar({0.8}, 1.0), 100000, 4).real_part();
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
      c0 += y[t] * y[t];
      if (t + 1 < y.size()) c1 += y[t] * y[t + 1];
    }
    const double rho = c1 / c0;
    CHECK(std::abs(rho - 0.8) <= 3.0 * std::sqrt((1.0 - 0.64) / 100000.0));
  }

  TEST_CASE("complex ar1 variance constancy and propriety") {
    const double r = 0.8, sigma = 1.0, var = sigma * sigma / (1.0 - r * r);
    const std::size_t n = 16, reps = 10000;
    auto beta = bounded_random_walk_beta(pi / 2.0, 1.0, 0.05, n, 5);
    std::vector<double> power(n, 0.0), p2(n, 0.0);
    std::vector<cplx> rel(n, 0.0);
    for (std::size_t k = 0; k < reps; ++k) {
      auto z = simulate_complex_ar1(r, sigma, beta, n, derive_seed(6, k)).values();
      for (std::size_t t = 0; t < n; ++t) {
        power[t] += std::norm(z[t]);
        p2[t] += std::norm(z[t]) * std::norm(z[t]);
      }
      for (std::size_t tau = 0; tau < n; ++tau) rel[tau] += z[0] * z[tau];
    }
    for (std::size_t t = 0; t < n; ++t) {
      const double m = power[t] / reps;
      const double se = std::sqrt((p2[t] / reps - m * m) / reps);
      CHECK(std::abs(m - var) <= 3.0 * se);
    }
    // |z0 z_tau| has second moment at most E|z|^4 = 2 var^2
    const double se_rel = std::sqrt(2.0 * var * var / reps);
    for (std::size_t tau = 0; tau < n; ++tau) {
      CHECK(std::abs(rel[tau].real() / reps) <= 3.0 * se_rel);
      CHECK(std::abs(rel[tau].imag() / reps) <= 3.0 * se_rel);
    }
  }

  TEST_CASE("demodulated complex ar1 has the stationary autocovariance") {
    const std::size_t n = 200000;
    auto beta = linear_beta(0.8, 1.0, n);
    auto z = simulate_complex_ar1(0.7, 1.0, beta, n, 8).values();
    auto g = frequency_modulator(beta).values();
    cplx c1 = 0.0;
    double c0 = 0.0;
    for (std::size_t t = 0; t + 1 < n; ++t) {
      const cplx x0 = std::conj(g[t]) * z[t], x1 = std::conj(g[t + 1]) * z[t + 1];
      c0 += std::norm(x0);
      c1 += std::conj(x0) * x1;
    }
    const cplx rho = c1 / c0;
    CHECK(std::abs(rho - cplx(0.7)) < 0.01);
  }

  TEST_CASE("circulant embedding") {
    std::vector<cplx> wn(64, 0.0);
    wn[0] = 1.0;
    auto y = simulate_from_acv(wn, 64, 1, false);
    CHECK_FALSE(y.is_complex());

    // AR(1) marginals agree with the recursive simulator.
    auto ar = LatentModel::ar({0.8}, 1.0);
    auto acv = ar.autocov_sequence(32);
    std::vector<double> a, b;
    for (std::uint64_t k = 0; k < 10000; ++k) {
      a.push_back(simulate_from_acv(acv, 32, derive_seed(10, k), false).real_part()[17]);
      b.push_back(simulate_ar(ar, 32, derive_seed(11, k)).real_part()[17]);
    }
    // critical value at p = 0.01 for two samples of 10^4
    CHECK(ks_statistic(a, b) < 1.63 * std::sqrt(2.0 / 10000.0));
  }

  TEST_CASE("simulated paths reproduce their autocovariance") {
    auto mat = LatentModel::matern(1.0, 0.4, 1.0);
    // A Matern with alpha = 1 is an OU with lambda = 2 pi h and a matched variance.
    const double delta = kDefaultDelta, lambda = 2.0 * pi * 0.4, r = std::exp(-lambda * delta);
    const double amp = std::sqrt(2.0 * lambda * delta * (1.0 + r) * pi / 0.4);
    auto ou = LatentModel::ou(amp, lambda, 0.0);
    for (long tau = 0; tau < 10; ++tau)
      CHECK(std::abs(mat.autocov(tau).real() - ou.autocov(tau).real()) <= 1e-4 * mat.autocov(0).real());
    const std::size_t n = 256, reps = 3000;
    std::vector<double> c0(2, 0.0), c5(2, 0.0);
    for (std::uint64_t k = 0; k < reps; ++k) {
      auto x = simulate_latent(mat, n, derive_seed(12, k)).values();
      auto z = simulate_latent(ou, n, derive_seed(13, k)).values();
      c0[0] += std::norm(x[100]);
      c0[1] += std::norm(z[100]);
      c5[0] += (std::conj(x[100]) * x[105]).real();
      c5[1] += (std::conj(z[100]) * z[105]).real();
    }
    const double v = mat.autocov(0).real();
    CHECK(std::abs(c0[0] / reps - v) <= 4.0 * v * std::sqrt(1.0 / reps));
    CHECK(std::abs(c0[1] / reps - v) <= 4.0 * v * std::sqrt(1.0 / reps));
    CHECK(std::abs(c5[0] / reps - mat.autocov(5).real()) <= 4.0 * v * std::sqrt(1.0 / reps));
    CHECK(std::abs(c5[1] / reps - mat.autocov(5).real()) <= 4.0 * v * std::sqrt(1.0 / reps));
  }

  TEST_CASE("bounded random walk") {
    auto flat = bounded_random_walk_beta(0.4, 1.0, 0.0, 50, 1);
    for (double b : flat) CHECK(b == 0.4);
    auto path = bounded_random_walk_beta(pi / 2.0, 1.0, 0.3, 1000000, 2);
    auto [lo, hi] = std::minmax_element(path.begin(), path.end());
    CHECK(*lo >= pi / 2.0 - 1.0);
    CHECK(*hi <= pi / 2.0 + 1.0);
    CHECK(*hi - *lo > 1.9);
    CHECK_THROWS_AS(bounded_random_walk_beta(0.0, 0.0, 0.1, 10, 1), InvalidArgument);
  }

  TEST_CASE("seed determinism") {
    auto model = LatentModel::ar({0.5, 0.2}, 1.0);
    CHECK(simulate_ar(model, 100, 42).values() == simulate_ar(model, 100, 42).values());
    CHECK(simulate_ar(model, 100, 42).values() != simulate_ar(model, 100, 43).values());
  }
}
