#include <numbers>

#include "doctest.h"
#include "modwhittle/drifter.hpp"
#include "modwhittle/simulate.hpp"

using namespace modwhittle;
using namespace modwhittle::drifter;
using std::numbers::pi;

TEST_SUITE("drifter") {
  TEST_CASE("inertial frequency") {
    CHECK(inertial_frequency(0.0) == 0.0);
    CHECK(inertial_frequency(90.0) == doctest::Approx(-2.0 * kSolarDay / kSiderealDay).epsilon(1e-14));
    CHECK(inertial_frequency(90.0) == doctest::Approx(-2.00548).epsilon(1e-5));
    CHECK(inertial_frequency(-30.0) == doctest::Approx(1.00274).epsilon(1e-5));
    for (double lat : {0.3, 7.0, 21.5, 45.0, 89.9}) CHECK(inertial_frequency(-lat) == -inertial_frequency(lat));
    CHECK_THROWS_AS(inertial_frequency(91.0), InvalidArgument);
  }

  TEST_CASE("velocities from positions") {
    Trajectory still{"a", {0.0, 1.0, 2.0}, {10.0, 10.0, 10.0}, {5.0, 5.0, 5.0}, {}};
    for (auto v : velocities_from_positions(still)) CHECK(v == cplx(0.0));
    Trajectory east{"b", {0.0, 1.0}, {0.0, 0.0}, {0.0, 1.0}, {}};
    auto v = velocities_from_positions(east);
    CHECK(v[0].real() == doctest::Approx(111.32e5 / 86400.0));
    CHECK(v[0].imag() == 0.0);
    CHECK(v[0].real() == doctest::Approx(128.8).epsilon(1e-3));
    Trajectory north1{"c", {0.0, 0.5}, {1.0, 1.2}, {10.0, 10.0}, {}};
    Trajectory north2{"c", {0.0, 0.5}, {1.0, 1.2}, {-170.0, -170.0}, {}};
    CHECK(velocities_from_positions(north1)[0] == velocities_from_positions(north2)[0]);
    Trajectory wrap{"d", {0.0, 1.0}, {0.0, 0.0}, {179.5, -179.5}, {}};
    CHECK(velocities_from_positions(wrap)[0].real() == doctest::Approx(111.32e5 / 86400.0));
    Trajectory dup{"e", {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {}};
    CHECK_THROWS_AS(velocities_from_positions(dup), InvalidArgument);
  }

  TEST_CASE("drifter modulator") {
    const double delta = kDefaultDelta;
    std::vector<double> flat(50, 0.7);
    auto m = drifter_modulator(flat, delta);
    for (std::size_t t = 0; t < 50; ++t)
      CHECK(std::abs(m.mod[t] - std::polar(1.0, 2.0 * pi * delta * 0.7 * static_cast<double>(t))) < 1e-12);
    CHECK(std::abs(std::abs(stationarity_check(m.mod, 1, 1e-12).gamma) - 2.0 * pi * delta * 0.7) < 1e-12);
    std::vector<double> zero(10, 0.0);
    const auto none = drifter_modulator(zero, delta);
    for (auto g : none.mod.values()) CHECK(g == cplx(1.0));

    // equatorial crossing: the phase increments change sign
    std::vector<double> lat(200);
    for (std::size_t t = 0; t < lat.size(); ++t) lat[t] = -10.0 + 20.0 * static_cast<double>(t) / 199.0;
    auto cross = drifter_modulator(inertial_frequency(lat), delta);
    const auto& g = cross.mod.values();
    CHECK(std::arg(g[10] / g[9]) > 0.0);
    CHECK(std::arg(g[190] / g[189]) < 0.0);
    for (auto v : g) CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
    CHECK(stationarity_check(cross.mod, 0, 1e-12).stationary);
  }

  TEST_CASE("phase increments within twenty degrees") {
    std::vector<double> lat(2001);
    for (std::size_t t = 0; t < lat.size(); ++t) lat[t] = -20.0 + 40.0 * static_cast<double>(t) / 2000.0;
    auto dm = drifter_modulator(inertial_frequency(lat), kDefaultDelta);
    double worst = 0.0;
    for (double f : inertial_frequency(lat)) worst = std::max(worst, std::abs(2.0 * pi * kDefaultDelta * f));
    CHECK(worst <= 0.3592);
    CHECK(worst >= 0.3590);
    CHECK(dm.max_beta_deviation < pi / 2.0);
    CHECK_FALSE(dm.bound_warning);
  }

  TEST_CASE("stationary and modulated objectives coincide for constant frequency") {
    const std::size_t n = 256;
    std::vector<double> wf(n, -0.9);
    DrifterParams p{8.0, 0.6, 1.5, 0.4, 1.3};
    auto a = aggregate_expected_periodogram(drifter_model(wf, kDefaultDelta, Mode::stationary, p, false));
    auto b = aggregate_expected_periodogram(drifter_model(wf, kDefaultDelta, Mode::modulated, p, false));
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-9 * a.values[i]);
  }

  TEST_CASE("inertial side mask") {
    auto north = inertial_side_mask(240, kDefaultDelta, -1.5, 0.0, 0.8);
    auto south = inertial_side_mask(240, kDefaultDelta, 1.5, 0.0, 0.8);
    const auto w = fourier_grid(240).frequencies();
    for (std::size_t i = 0; i < 240; ++i) {
      const double cpd = w[i] / (2.0 * pi * kDefaultDelta);
      CHECK(north.selects(i) == (cpd <= 0.0 && cpd >= -0.8 - 1e-12));
      CHECK(south.selects(i) == (cpd >= 0.0 && cpd <= 0.8 + 1e-12));
    }
    CHECK_THROWS_AS(inertial_side_mask(240, kDefaultDelta, 1.0, 0.0, 7.0), InvalidArgument);
  }

  TEST_CASE("fits on a synthetic segment") {
    SyntheticConfig cfg;
    cfg.n = 480;
    cfg.lat_start = 20.0;
    cfg.lat_end = 20.0;
    cfg.seed = 3;
    auto traj = synthetic_trajectory(cfg);
    CHECK(traj.size() == 480);
    FitSettings s;
    s.hi_cpd = 1.5;
    s.fit.n_starts = 1;
    auto st = fit_drifter(traj, Mode::stationary, s);
    auto mo = fit_drifter(traj, Mode::modulated, s);
    CHECK(std::abs(1.0 / st.params.lambda - 1.0 / mo.params.lambda) <= 0.1 / mo.params.lambda);
    CHECK(st.result.theta_hat.size() == 5 + 1);
    CHECK(st.fitted.size() == 480);
    auto csv = overlay_csv(st, mo, kDefaultDelta);
    CHECK(csv.rfind("omega_cpd,periodogram,stationary_fit,modulated_fit\n", 0) == 0);

    s.no_background = true;
    auto bare = fit_drifter(traj, Mode::modulated, s);
    CHECK(bare.params.B == 0.0);
    CHECK(bare.params.lambda > 0.0);
  }

  TEST_CASE("batch") {
    CHECK(batch_compare({}).empty());
    std::vector<Trajectory> batch;
    for (std::uint64_t k = 0; k < 3; ++k) {
      SyntheticConfig cfg;
      cfg.n = 360;
      cfg.lat_start = cfg.lat_end = 15.0;
      cfg.seed = k;
      batch.push_back(synthetic_trajectory(cfg));
      batch.back().id = "s" + std::to_string(k);
    }
    FitSettings s;
    s.fit.n_starts = 1;
    auto rows = batch_compare(batch, s);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
      CHECK(r.ok);
      CHECK(std::abs(r.difference) < 1e-4);
    }
    CHECK(batch_csv(rows).find("s2,") != std::string::npos);
  }

  TEST_CASE("trajectory csv round trip") {
    SyntheticConfig cfg;
    cfg.n = 20;
    auto t = synthetic_trajectory(cfg);
    auto back = trajectory_from_csv(trajectory_csv(t), "x");
    CHECK(back.size() == 20);
    CHECK(back.id == "x");
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(back.lat[i] == t.lat[i]);
      CHECK(back.velocity[i] == t.velocity[i]);
    }
    auto pos = trajectory_from_csv("time,lat,lon\n0,1,2\n0.5,1.1,2\n");
    CHECK(pos.velocity.empty());
    CHECK_THROWS(trajectory_from_csv("time,lat\n0,1\n"));
  }

  TEST_CASE("segment windows") {
    std::vector<double> lat(8000);
    for (std::size_t t = 0; t < lat.size(); ++t) lat[t] = 10.0 + 10.0 * static_cast<double>(t) / 7999.0;
    auto segs = segment_windows(inertial_frequency(lat), kDefaultDelta);
    REQUIRE(segs.size() >= 2);
    for (std::size_t i = 1; i < segs.size(); ++i) CHECK(segs[i - 1].variability >= segs[i].variability);
    for (const auto& s : segs) CHECK(s.start + s.length <= lat.size());
  }
}
