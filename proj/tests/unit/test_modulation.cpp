#include <numbers>

#include "doctest.h"
#include "modwhittle/modulation.hpp"
#include "modwhittle/random.hpp"
#include "modwhittle/simulate.hpp"
#include "oracles.hpp"

using namespace modwhittle;
using std::numbers::pi;

namespace {

std::vector<cplx> g_of(std::initializer_list<double> v) { return {v.begin(), v.end()}; }

Modulator random_modulator(Rng& rng, std::size_t n, int kind) {
  switch (kind % 4) {
    case 0: return periodic_missing_mask(1 + n % 4, n % 3, n);
    case 1: return cosine_bernoulli_mask(0.5, 0.25, 2.0 * pi / 10.0, n, rng.engine()());
    case 2: {
      auto beta = bounded_random_walk_beta(2.0 * rng.uniform() - 1.0, 0.5 + rng.uniform(), 0.1, n, rng.engine()());
      return frequency_modulator(beta);
    }
    default: {
      std::vector<cplx> g(n);
      for (auto& v : g) v = rng.complex_normal();
      return Modulator(g);
    }
  }
}

}  // namespace

TEST_SUITE("modulation") {
  TEST_CASE("cg examples") {
    auto c1 = cg_sequence(constant_modulator(4));
    std::vector<double> expect{1.0, 0.75, 0.5, 0.25};
    for (std::size_t t = 0; t < 4; ++t) CHECK(std::abs(c1[t] - expect[t]) < 1e-15);

    auto c2 = cg_sequence(g_of({1, 0, 1, 0}));
    CHECK(std::abs(c2[0] - 0.5) < 1e-15);
    CHECK(std::abs(c2[1]) < 1e-15);
    CHECK(std::abs(c2[2] - 0.25) < 1e-15);
    CHECK(std::abs(c2[3]) < 1e-15);

    std::vector<cplx> rot(4);
    for (std::size_t t = 0; t < 4; ++t) rot[t] = std::polar(1.0, pi * static_cast<double>(t) / 2.0);
    CHECK(std::abs(cg_sequence(rot)[1] - cplx(0.0, 0.75)) < 1e-15);

    auto s = cg_stationary(4);
    for (std::size_t t = 0; t < 4; ++t) CHECK(s[t] == cplx(expect[t]));
  }

  TEST_CASE("periodic missing mask") {
    auto m = periodic_missing_mask(2, 1, 5);
    CHECK(m.values() == g_of({1, 1, 0, 1, 1}));
    CHECK(periodic_missing_mask(1, 0, 3).values() == g_of({1, 1, 1}));
    auto m3 = periodic_missing_mask(1, 2, 6);
    CHECK(m3.values() == g_of({1, 0, 0, 1, 0, 0}));
    // only t = 0 pairs two observed samples three apart
    CHECK(std::abs(cg_sequence(m3)[3] - 1.0 / 6.0) < 1e-15);
    CHECK_THROWS_AS(periodic_missing_mask(0, 1, 4), InvalidArgument);
  }

  TEST_CASE("bernoulli mask") {
    std::vector<double> ones(50, 1.0), zeros(50, 0.0);
    const auto all = bernoulli_mask(ones, 3), none = bernoulli_mask(zeros, 3);
    for (auto v : all.values()) CHECK(v == cplx(1.0));
    for (auto v : none.values()) CHECK(v == cplx(0.0));
    auto p = cosine_probabilities(0.5, 0.25, 2.0 * pi / 10.0, 20);
    CHECK(p[0] == doctest::Approx(0.75));
    CHECK(p[5] == doctest::Approx(0.25));
    // counter-based draws: a prefix of p gives a prefix of the mask
    auto a = cosine_bernoulli_mask(0.5, 0.25, 2.0 * pi / 10.0, 200, 9);
    auto b = cosine_bernoulli_mask(0.5, 0.25, 2.0 * pi / 10.0, 100, 9);
    for (std::size_t t = 0; t < 100; ++t) CHECK(a[t] == b[t]);
    std::vector<double> bad{0.5, 1.5};
    CHECK_THROWS_AS(bernoulli_mask(bad, 1), InvalidArgument);
  }

  TEST_CASE("bernoulli mask frequency") {
    std::vector<double> p(20000, 0.3);
    double s = 0.0;
    const auto mask = bernoulli_mask(p, 77);
    for (auto v : mask.values()) s += v.real();
    const double se = std::sqrt(0.3 * 0.7 / 20000.0);
    CHECK(std::abs(s / 20000.0 - 0.3) < 4.0 * se);
  }

  TEST_CASE("frequency modulator") {
    std::vector<double> zero(6, 0.0);
    const auto flat = frequency_modulator(zero);
    for (auto v : flat.values()) CHECK(v == cplx(1.0));
    std::vector<double> quarter(4, pi / 2.0);
    auto g = frequency_modulator(quarter).values();
    std::vector<cplx> expect{1.0, {0.0, 1.0}, -1.0, {0.0, -1.0}};
    for (std::size_t t = 0; t < 4; ++t) CHECK(std::abs(g[t] - expect[t]) < 1e-15);
  }

  TEST_CASE("frequency modulator keeps unit modulus over a long path") {
    auto beta = bounded_random_walk_beta(1.3, 1.0, 0.05, 1000000, 5);
    const auto g = frequency_modulator(beta);
    double worst = 0.0;
    for (auto v : g.values()) worst = std::max(worst, std::abs(std::abs(v) - 1.0));
    CHECK(worst < 1e-12);
  }

  TEST_CASE("linear frequency closed form") {
    CHECK(std::abs(cg_linear_closed_form(0.8, 1.0, 8, 0) - 1.0) < 1e-15);
    auto direct = oracle::cg(frequency_modulator(linear_beta(0.8, 1.0, 8)).values());
    CHECK(std::abs(cg_linear_closed_form(0.8, 1.0, 8, 3) - direct[3]) < 1e-12);
    // Delta -> 0 limit
    for (std::size_t tau : {1u, 5u, 30u}) {
      const cplx lim = (1.0 - static_cast<double>(tau) / 64.0) * std::polar(1.0, 0.4 * static_cast<double>(tau));
      CHECK(std::abs(cg_linear_closed_form(0.4, 1e-9, 64, tau) - lim) < 1e-7);
    }
    CHECK_THROWS_AS(cg_linear_closed_form(0.0, pi, 8, 1), DomainError);
  }

  TEST_CASE("fft cg matches direct sum") {
    Rng rng(101);
    for (int k = 0; k < 100; ++k) {
      const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 510.0);
      auto mod = random_modulator(rng, n, k);
      auto fast = cg_sequence(mod);
      auto slow = oracle::cg(mod.values());
      const double scale = std::max(std::abs(slow[0]), 1e-300);
      double err = 0.0;
      for (std::size_t t = 0; t < n; ++t) err = std::max(err, std::abs(fast[t] - slow[t]));
      CHECK(err <= 1e-12 * scale);
      // Cauchy-Schwarz
      for (std::size_t t = 0; t < n; ++t) CHECK(std::abs(fast[t]) <= fast[0].real() * (1.0 + 1e-12) + 1e-15);
    }
  }

  TEST_CASE("bounded frequency lower bound on cg") {
    Rng rng(7);
    for (int k = 0; k < 20; ++k) {
      const double gamma = 2.0 * rng.uniform() - 1.0;
      const double span = (pi / 2.0) * rng.uniform();
      const std::size_t n = 256;
      auto beta = bounded_random_walk_beta(gamma, span, 0.2, n, rng.engine()());
      auto c = cg_sequence(frequency_modulator(beta));
      for (std::size_t tau = 1; static_cast<double>(tau) * span <= pi / 2.0 && tau < n; ++tau) {
        const double bound = (1.0 - static_cast<double>(tau) / n) * std::cos(static_cast<double>(tau) * span);
        CHECK(std::abs(c[tau]) >= bound - 1e-12);
      }
    }
  }

  TEST_CASE("significant correlation diagnostic") {
    const std::vector<std::size_t> lags{0, 1};
    const std::vector<std::size_t> lengths{16, 32, 64};
    auto d = significant_correlation_diagnostic(constant_modulator(64), lags, lengths);
    CHECK(d[1].min_abs_cg == doctest::Approx(1.0 - 1.0 / 16.0));
    CHECK_FALSE(d[1].flagged);
    auto alt = significant_correlation_diagnostic(periodic_missing_mask(1, 1, 64), lags, lengths);
    CHECK(alt[1].min_abs_cg < 1e-12);
    CHECK(alt[1].flagged);
    const double span = 1.0;
    auto beta = bounded_random_walk_beta(0.3, span, 0.3, 64, 4);
    auto fm = significant_correlation_diagnostic(frequency_modulator(beta), lags, lengths);
    CHECK(fm[1].min_abs_cg >= (1.0 - 1.0 / 16.0) * std::cos(span) - 1e-12);
  }

  TEST_CASE("stationarity check") {
    std::vector<cplx> g(40);
    for (std::size_t t = 0; t < g.size(); ++t) g[t] = std::polar(1.0, 0.7 * static_cast<double>(t));
    auto w = stationarity_check(Modulator(g), 1);
    CHECK(w.stationary);
    CHECK(w.gamma == doctest::Approx(0.7));
    auto c = stationarity_check(constant_modulator(10, 2.5), 1);
    CHECK(c.stationary);
    CHECK(c.modulus == doctest::Approx(2.5));
    CHECK(c.gamma == doctest::Approx(0.0));
    std::vector<cplx> grow(10);
    for (std::size_t t = 0; t < 10; ++t) grow[t] = 1.0 + static_cast<double>(t);
    CHECK_FALSE(stationarity_check(Modulator(grow), 1).stationary);
    // phase pattern repeating with period 2 plus drift is stationary for mu = 2 only
    std::vector<cplx> p2(40);
    for (std::size_t t = 0; t < p2.size(); ++t)
      p2[t] = std::polar(1.0, (t % 2 ? 1.1 : 0.0) + 0.3 * static_cast<double>(t / 2));
    CHECK(stationarity_check(Modulator(p2), 2).stationary);
    CHECK_FALSE(stationarity_check(Modulator(p2), 1).stationary);
    // white noise latent: any constant-modulus phase is allowed
    std::vector<cplx> wild(30);
    Rng rng(3);
    for (auto& v : wild) v = std::polar(1.0, 6.0 * rng.uniform());
    CHECK(stationarity_check(Modulator(wild), 0).stationary);
    CHECK_FALSE(stationarity_check(Modulator(wild), 1).stationary);
  }

  TEST_CASE("json round trip") {
    auto m = cosine_bernoulli_mask(0.5, 0.25, 2.0 * pi / 10.0, 64, 11);
    auto back = modulator_from_json(to_json(m));
    CHECK(back.values() == m.values());
    auto v = modulator_from_json(nlohmann::json::parse(R"({"values":[1, [0, 1], 0.5]})"));
    CHECK(v.values() == std::vector<cplx>{1.0, {0.0, 1.0}, 0.5});
    CHECK(v.is_complex());
    CHECK_THROWS_AS(modulator_from_json(nlohmann::json::parse(R"({"generator":"nope","N":4})")), InvalidArgument);
  }

  TEST_CASE("rotation leaves cg unchanged") {
    Rng rng(19);
    auto mod = random_modulator(rng, 50, 3);
    auto a = cg_sequence(mod), b = cg_sequence(mod.rotated(1.234));
    for (std::size_t t = 0; t < 50; ++t) CHECK(std::abs(a[t] - b[t]) < 1e-13);
  }
}
