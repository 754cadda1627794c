#include <numbers>

#include "doctest.h"
#include "modwhittle/random.hpp"
#include "modwhittle/simulate.hpp"
#include "modwhittle/spectra.hpp"
#include "oracles.hpp"

using namespace modwhittle;
using std::numbers::pi;

namespace {

LatentModel random_model(Rng& rng) {
  switch (static_cast<int>(rng.uniform() * 4.0)) {
    case 0: return LatentModel::ar({1.8 * rng.uniform() - 0.9}, 0.5 + rng.uniform());
    case 1: return LatentModel::ma({2.0 * rng.uniform() - 1.0}, 0.5 + rng.uniform());
    case 2: return LatentModel::complex_ar1(0.95 * rng.uniform(), 0.5 + rng.uniform(), 2.0 * rng.uniform() - 1.0);
    default: return LatentModel::ou(1.0 + 5.0 * rng.uniform(), 0.2 + rng.uniform(), 2.0 * rng.uniform() - 1.0);
  }
}

Modulator random_modulator(Rng& rng, std::size_t n) {
  switch (static_cast<int>(rng.uniform() * 4.0)) {
    case 0: return periodic_missing_mask(2 + n % 3, 1, n);
    case 1: return cosine_bernoulli_mask(0.6, 0.3, 2.0 * pi / 10.0, n, rng.engine()());
    case 2: return frequency_modulator(bounded_random_walk_beta(rng.uniform(), 1.0, 0.05, n, rng.engine()()));
    default: {
      std::vector<cplx> g(n);
      for (auto& v : g) v = rng.complex_normal();
      return Modulator(g);
    }
  }
}

}  // namespace

TEST_SUITE("spectra") {
  TEST_CASE("periodogram examples") {
    std::vector<cplx> c(6, 1.5);
    auto p = periodogram(c);
    const auto z = fourier_grid(6).zero_position();
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(p.values[i] - (i == z ? 6.0 * 2.25 : 0.0)) < 1e-12);
    std::vector<cplx> alt{1.0, -1.0};
    auto q = periodogram(alt);
    CHECK(q.values[0] == doctest::Approx(0.0));
    CHECK(q.values[1] == doctest::Approx(2.0));
    std::vector<cplx> tone(4);
    for (std::size_t t = 0; t < 4; ++t) tone[t] = std::polar(1.0, pi * static_cast<double>(t) / 2.0);
    auto r = periodogram(tone);
    const auto w = fourier_grid(4).frequencies();
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(std::abs(r.values[i] - (std::abs(w[i] - pi / 2) < 1e-12 ? 4.0 : 0.0)) < 1e-12);
  }

  TEST_CASE("expected acv examples") {
    auto wn = LatentModel::ma({}, 2.0);
    auto cg = cg_sequence(periodic_missing_mask(2, 1, 9));
    auto cbar = expected_acv(cg, wn);
    CHECK(std::abs(cbar[0] - 4.0 * cg[0]) < 1e-14);
    for (std::size_t t = 1; t < 9; ++t) CHECK(std::abs(cbar[t]) < 1e-14);
    auto ar = LatentModel::ar({0.5}, 1.0);
    auto st = expected_acv(cg_stationary(10), ar);
    for (std::size_t t = 0; t < 10; ++t)
      CHECK(std::abs(st[t] - (1.0 - t / 10.0) * oracle::ar1_acv(0.5, 1.0, static_cast<long>(t))) < 1e-14);
    std::vector<cplx> g{1.0, 0.0, 1.0, 0.0};
    CHECK(std::abs(expected_acv(cg_sequence(g), ar)[2] - 1.0 / 12.0) < 1e-14);
  }

  TEST_CASE("expected periodogram examples") {
    auto wn = LatentModel::ma({}, 1.0);
    for (double v : expected_periodogram(cg_stationary(16), wn).values) CHECK(v == doctest::Approx(1.0));
    auto zero = expected_periodogram(cg_sequence(constant_modulator(16, 0.0)), LatentModel::ar({0.5}, 1.0));
    CHECK(zero.degenerate);
    auto mod = periodic_missing_mask(3, 2, 64);
    auto ar = LatentModel::ar({0.8}, 1.0);
    auto fast = expected_periodogram(cg_sequence(mod), ar);
    auto slow = brute_force_expected_periodogram(mod, ar);
    for (std::size_t i = 0; i < 64; ++i)
      CHECK(std::abs(fast.values[i] - slow.values[i]) <= 1e-10 * std::abs(slow.values[i]));
    auto one = brute_force_expected_periodogram(Modulator({cplx(2.0)}), ar);
    CHECK(one.values[0] == doctest::Approx(4.0 * oracle::ar1_acv(0.8, 1.0, 0)));
  }

  TEST_CASE("fast transform matches direct hermitian sum") {
    Rng rng(3);
    for (std::size_t n : {1u, 2u, 3u, 7u, 16u, 33u, 100u}) {
      auto model = random_model(rng);
      auto mod = random_modulator(rng, n);
      auto cbar = expected_acv(cg_sequence(mod), model);
      auto fast = expected_periodogram(cbar);
      auto slow = oracle::expected_periodogram(cbar);
      double scale = 0.0;
      for (double v : slow) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(fast.values[i] - slow[i]) <= 1e-12 * scale);
    }
  }

  TEST_CASE("negative spectra are rejected") {
    std::vector<cplx> bad{1.0, 2.0, 0.0, 0.0};
    CHECK_THROWS_AS(expected_periodogram(bad), DomainError);
  }

  TEST_CASE("fejer kernel") {
    CHECK(fejer_kernel(16, 0.0) == doctest::Approx(16.0 / (2.0 * pi)));
    CHECK(fejer_kernel(2, pi / 2.0) == doctest::Approx(1.0 / (2.0 * pi)));
    CHECK(fejer_kernel(16, 2.0 * pi / 16.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fejer_kernel(16, 2.0 * pi) == doctest::Approx(16.0 / (2.0 * pi)));
  }

  TEST_CASE("dunsmuir approximation") {
    auto wn = LatentModel::ma({}, 1.5);
    auto d = dunsmuir_spectrum(wn, constant_modulator(32));
    auto e = expected_periodogram(cg_stationary(32), wn);
    for (std::size_t i = 0; i < 32; ++i) {
      CHECK(d[i] == doctest::Approx(2.25));
      CHECK(d[i] == doctest::Approx(e.values[i]));
    }
    auto ar = LatentModel::ar({0.9}, 1.0);
    auto da = dunsmuir_spectrum(ar, constant_modulator(64));
    auto ea = expected_periodogram(cg_stationary(64), ar);
    double gap = 0.0;
    for (std::size_t i = 0; i < 64; ++i) gap = std::max(gap, std::abs(da[i] - ea.values[i]));
    CHECK(gap > 1e-3);
  }

  TEST_CASE("convolution form") {
    // S(w) = int f(w - l) |G(l)|^2 / (2 pi N) dl, periodic trapezoid on a fine grid.
    Rng rng(12);
    for (int k = 0; k < 4; ++k) {
      const std::size_t n = 16 + 8 * k;
      auto ar = LatentModel::ar({1.2 * rng.uniform() - 0.6}, 1.0);
      auto mod = random_modulator(rng, n);
      auto sbar = expected_periodogram(cg_sequence(mod), ar);
      const auto w = fourier_grid(n).frequencies();
      const std::size_t m = 4096;
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          const double lam = -pi + 2.0 * pi * static_cast<double>(j) / m;
          cplx gl = 0.0;
          for (std::size_t t = 0; t < n; ++t) gl += mod[t] * std::polar(1.0, -lam * static_cast<double>(t));
          s += ar.sampled_sdf(w[i] - lam) * std::norm(gl) / (2.0 * pi * n);
        }
        s *= 2.0 * pi / m;
        CHECK(std::abs(s - sbar.values[i]) <= 1e-4 * std::abs(sbar.values[i]));
      }
    }
  }

  TEST_CASE("boundedness of the expected periodogram") {
    Rng rng(21);
    for (int k = 0; k < 40; ++k) {
      const std::size_t n = 64;
      auto model = random_model(rng);
      auto mod = random_modulator(rng, n);
      auto sbar = expected_periodogram(cg_sequence(mod), model);
      double fmax = 0.0;
      for (std::size_t j = 0; j < 4096; ++j) fmax = std::max(fmax, model.sampled_sdf(-pi + 2.0 * pi * j / 4096.0));
      const double lo = *std::min_element(sbar.values.begin(), sbar.values.end());
      const double hi = *std::max_element(sbar.values.begin(), sbar.values.end());
      CHECK(lo > 0.0);
      CHECK(hi <= mod.gmax() * mod.gmax() * fmax * (1.0 + 1e-9) + 1e-8);
    }
  }

  TEST_CASE("identifiability separation") {
    Rng rng(31);
    for (int k = 0; k < 100; ++k) {
      auto model = random_model(rng);
      auto theta = model.params().values();
      auto other = theta;
      const std::size_t pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(theta.size()));
      if (model.params().fixed()[pick]) continue;
      other[pick] += (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.01 + 0.05 * rng.uniform());
      auto m2 = model.with_values(other);
      if (!m2.is_valid()) continue;
      auto mod = random_modulator(rng, 64);
      auto cg = cg_sequence(mod);
      auto a = expected_periodogram(cg, model), b = expected_periodogram(cg, m2);
      double gap = 0.0;
      for (std::size_t i = 0; i < 64; ++i) gap = std::max(gap, std::abs(a.values[i] - b.values[i]));
      CHECK(gap > 0.0);
    }
  }

  TEST_CASE("variance of the mean periodogram scales as 1/N") {
    auto ar = LatentModel::ar({0.5}, 1.0);
    auto var_at = [&](std::size_t n) {
      auto mod = periodic_missing_mask(3, 1, n);
      std::vector<double> v;
      for (std::uint64_t r = 0; r < 500; ++r) {
        auto y = simulate_modulated(ar, mod, derive_seed(n, r));
        auto p = periodogram(y);
        double s = 0.0;
        for (double x : p.values) s += x;
        v.push_back(s / static_cast<double>(n));
      }
      double m = 0.0, q = 0.0;
      for (double x : v) m += x;
      m /= v.size();
      for (double x : v) q += (x - m) * (x - m);
      return q / (v.size() - 1);
    };
    const double ratio = var_at(256) / var_at(1024);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
  }

  TEST_CASE("exponential qq") {
    ExpectedPeriodogram s{{1.0, 2.0, 3.0}, std::nullopt, false};
    Periodogram p{{1.0, 2.0, 3.0}};
    auto qq = exponential_qq(p, s);
    REQUIRE(qq.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(qq[i].empirical == 1.0);
    CHECK(qq[0].theoretical < qq[1].theoretical);
    CHECK_THROWS(exponential_qq(Periodogram{}, ExpectedPeriodogram{}));

    auto ar = LatentModel::ar({0.8}, 1.0);
    auto mod = cosine_bernoulli_mask(0.5, 0.25, 2.0 * pi / 10.0, 1024, 5);
    const auto sbar = expected_periodogram(cg_sequence(mod), ar);
    // The least-squares slope of one draw is dominated by the top order statistics.
    double slope = 0.0;
    for (std::uint64_t r = 0; r < 50; ++r)
      slope += qq_slope(exponential_qq(periodogram(simulate_modulated(ar, mod, derive_seed(99, r))), sbar)) / 50.0;
    CHECK(slope >= 0.9);
    CHECK(slope <= 1.1);
  }

  TEST_CASE("spectrum csv") {
    auto csv = spectrum_csv(2, {"a"}, {{1.0, 2.0}});
    CHECK(csv.rfind("omega,a\n", 0) == 0);
    CHECK_THROWS_AS(spectrum_csv(2, {"a"}, {{1.0}}), InvalidArgument);
  }
}
