#include "modwhittle/drifter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "modwhittle/io.hpp"
#include "modwhittle/random.hpp"
#include "modwhittle/simulate.hpp"
#include "modwhittle/spectra.hpp"

namespace modwhittle::drifter {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCmPerDegree = kKmPerDegree * 1e5;

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

}  // namespace

double inertial_frequency(double latitude_deg) {
  if (!(std::abs(latitude_deg) <= 90.0)) throw InvalidArgument("latitude must lie in [-90, 90]");
  const double omega = 2.0 * kPi / kSiderealDay;
  const double f = 2.0 * omega * std::sin(latitude_deg * kPi / 180.0);
  return -f * kSolarDay / (2.0 * kPi);
}

std::vector<double> inertial_frequency(std::span<const double> latitude_deg) {
  std::vector<double> out(latitude_deg.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = inertial_frequency(latitude_deg[i]);
  return out;
}

double Trajectory::delta() const {
  if (times.size() < 2) return kDefaultDelta;
  return (times.back() - times.front()) / static_cast<double>(times.size() - 1);
}

void Trajectory::validate() const {
  const std::size_t n = times.size();
  if (n == 0) throw InvalidArgument("trajectory is empty");
  if (lat.size() != n || lon.size() != n) throw InvalidArgument("trajectory columns differ in length");
  if (!velocity.empty() && velocity.size() != n)
    throw InvalidArgument("trajectory velocity length differs from the positions");
  for (double l : lat)
    if (!(std::abs(l) <= 90.0)) throw InvalidArgument("latitude must lie in [-90, 90]");
  if (n < 2) return;
  const double d = delta();
  if (!(d > 0.0)) throw InvalidArgument("trajectory times must increase");
  for (std::size_t t = 1; t < n; ++t)
    if (std::abs(times[t] - times[t - 1] - d) > 1e-9 * std::max(1.0, std::abs(times[t])))
      throw InvalidArgument("trajectory times are not uniformly spaced");
}

std::vector<cplx> velocities_from_positions(const Trajectory& traj) {
  const std::size_t n = traj.size();
  if (n < 2) throw InvalidArgument("velocities need at least two positions");
  if (traj.lat.size() != n || traj.lon.size() != n)
    throw InvalidArgument("trajectory columns differ in length");
  std::vector<cplx> v(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const double dt = (traj.times[t + 1] - traj.times[t]) * kSolarDay;
    if (!(dt > 0.0)) throw InvalidArgument("duplicate or decreasing timestamps");
    double dlon = traj.lon[t + 1] - traj.lon[t];
    if (dlon > 180.0) dlon -= 360.0;
    if (dlon < -180.0) dlon += 360.0;
    const double u = dlon * kCmPerDegree * std::cos(traj.lat[t] * kPi / 180.0) / dt;
    const double w = (traj.lat[t + 1] - traj.lat[t]) * kCmPerDegree / dt;
    v[t] = {u, w};
  }
  return v;
}

DrifterModulator drifter_modulator(std::span<const double> omega_f_cpd, double delta) {
  if (omega_f_cpd.empty()) throw InvalidArgument("inertial frequency series is empty");
  if (!(delta > 0.0)) throw InvalidArgument("sampling interval must be positive");
  std::vector<double> beta(omega_f_cpd.size());
  for (std::size_t t = 0; t < beta.size(); ++t) beta[t] = 2.0 * kPi * delta * omega_f_cpd[t];
  DrifterModulator out{frequency_modulator(beta)};
  out.min_cpd = *std::min_element(omega_f_cpd.begin(), omega_f_cpd.end());
  out.max_cpd = *std::max_element(omega_f_cpd.begin(), omega_f_cpd.end());
  out.mean_cpd = mean_of(omega_f_cpd);
  const double mean_beta = 2.0 * kPi * delta * out.mean_cpd;
  for (double b : beta) out.max_beta_deviation = std::max(out.max_beta_deviation, std::abs(b - mean_beta));
  out.bound_warning = out.max_beta_deviation > kPi / 2.0;
  return out;
}

std::string to_string(Mode m) { return m == Mode::stationary ? "stationary" : "modulated"; }

Mode mode_from_string(const std::string& s) {
  if (s == "stationary") return Mode::stationary;
  if (s == "modulated") return Mode::modulated;
  throw InvalidArgument("unknown drifter mode '" + s + "'");
}

FrequencyMask inertial_side_mask(std::size_t n, double delta, double mean_omega_f, double lo_cpd,
                                 double hi_cpd) {
  if (!(lo_cpd >= 0.0) || !(hi_cpd > lo_cpd)) throw InvalidArgument("invalid frequency band");
  if (hi_cpd > 0.5 / delta + 1e-12) throw InvalidArgument("frequency band exceeds the Nyquist frequency");
  if (mean_omega_f < 0.0) return FrequencyMask::band_cpd(n, delta, -hi_cpd, -lo_cpd);
  return FrequencyMask::band_cpd(n, delta, lo_cpd, hi_cpd);
}

AggregateModel drifter_model(std::span<const double> omega_f_cpd, double delta, Mode mode,
                             const DrifterParams& p, bool no_background) {
  const std::size_t n = omega_f_cpd.size();
  std::vector<AggregateModel::Component> comps;
  if (mode == Mode::stationary) {
    comps.push_back({LatentModel::ou(p.A, p.lambda, mean_of(omega_f_cpd), delta), std::nullopt});
  } else {
    const auto dm = drifter_modulator(omega_f_cpd, delta);
    comps.push_back({LatentModel::ou(p.A, p.lambda, 0.0, delta), cg_sequence(dm.mod)});
  }
  if (!no_background) comps.push_back({LatentModel::matern(p.B, p.h, p.alpha, delta), std::nullopt});
  return AggregateModel(n, std::move(comps));
}

DrifterParams initial_params(std::span<const cplx> velocity, std::span<const double> omega_f_cpd,
                             double delta, const FrequencyMask& mask, bool no_background) {
  const std::size_t n = velocity.size();
  const auto pgram = periodogram(velocity);
  const FourierGrid grid(n);
  // Running mean over 9 bins tames the chi-squared scatter.
  const long half = 4;
  std::vector<double> smooth(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    long c = 0;
    for (long k = -half; k <= half; ++k) {
      const long j = static_cast<long>(i) + k;
      if (j < 0 || j >= static_cast<long>(n)) continue;
      s += pgram.values[static_cast<std::size_t>(j)];
      ++c;
    }
    smooth[i] = s / static_cast<double>(c);
  }
  std::size_t peak = n;
  for (std::size_t i = 0; i < n; ++i)
    if (mask.selects(i) && (peak == n || smooth[i] > smooth[peak])) peak = i;
  if (peak == n) throw InvalidArgument("frequency mask is empty");
  const double top = smooth[peak];
  std::size_t left = peak, right = peak;
  while (left > 0 && smooth[left - 1] > top / 2.0) --left;
  while (right + 1 < n && smooth[right + 1] > top / 2.0) ++right;
  const double bin_cpd = 1.0 / (static_cast<double>(n) * delta);
  const double width_cpd = static_cast<double>(right - left + 1) * bin_cpd;

  DrifterParams p;
  p.lambda = std::clamp(kPi * width_cpd, 0.05, 5.0);
  const auto unit = LatentModel::ou(1.0, p.lambda, 0.0, delta);
  const double unit_peak = unit.sampled_sdf(0.0);
  double background = 0.0;
  if (!no_background) {
    // Level of the lowest non-zero frequencies on the fitted side.
    double s = 0.0;
    int c = 0;
    const std::size_t z = grid.zero_position();
    for (std::size_t k = 1; k <= 5; ++k) {
      for (std::size_t i : {z + k, z >= k ? z - k : n}) {
        if (i < n && mask.selects(i)) {
          s += smooth[i];
          ++c;
        }
      }
    }
    background = c ? s / c : top / 10.0;
    p.h = 0.5;
    p.alpha = 1.0;
    const double unit_matern = LatentModel::matern(1.0, p.h, p.alpha, delta).sampled_sdf(0.0);
    p.B = std::sqrt(std::max(background, 1e-12) / unit_matern);
  }
  p.A = std::sqrt(std::max(top - background, top / 2.0) / unit_peak);
  (void)omega_f_cpd;
  return p;
}

namespace {

DrifterParams params_from(const ParameterVector& theta, bool no_background) {
  DrifterParams p;
  p.A = theta.value("A");
  p.lambda = theta.value("lambda");
  if (!no_background) {
    p.B = theta.value("B");
    p.h = theta.value("h");
    p.alpha = theta.value("alpha");
  }
  return p;
}

}  // namespace

DrifterFit fit_drifter(std::span<const cplx> velocity, std::span<const double> omega_f_cpd,
                       double delta, Mode mode, const FitSettings& settings) {
  const std::size_t n = velocity.size();
  if (n < 2) throw InvalidArgument("drifter fit needs at least two velocity samples");
  if (omega_f_cpd.size() != n) throw InvalidArgument("inertial frequency length differs from the velocities");
  const double mean_f = mean_of(omega_f_cpd);
  const auto mask = inertial_side_mask(n, delta, mean_f, settings.lo_cpd, settings.hi_cpd);
  if (mask.count(n) == 0) throw InvalidArgument("no Fourier frequency inside the fitted band");

  const DrifterParams p0 = settings.init ? *settings.init
                                         : initial_params(velocity, omega_f_cpd, delta, mask,
                                                          settings.no_background);
  const auto agg = drifter_model(omega_f_cpd, delta, mode, p0, settings.no_background);
  const auto pgram = periodogram(velocity);
  const auto objective = make_aggregate_objective(pgram, agg, mask);

  FitOptions opt = settings.fit;
  if (opt.max_iter == 0) opt.max_iter = kDrifterMaxIter;
  // A second start with a longer damping timescale covers broad, smeared peaks.
  auto alt = agg.parameters();
  alt.set("lambda", std::max(p0.lambda / 3.0, 0.02));
  opt.extra_starts.insert(opt.extra_starts.begin(), alt);

  DrifterFit out;
  out.mode = mode;
  out.result = fit(objective, agg.parameters(), opt);
  out.params = params_from(out.result.theta_hat, settings.no_background);
  out.mean_omega_f = mean_f;
  out.mask = mask;
  out.periodogram = pgram.values;
  out.fitted = aggregate_expected_periodogram(agg.with_parameters(out.result.theta_hat)).values;
  return out;
}

DrifterFit fit_drifter(const Trajectory& traj, Mode mode, const FitSettings& settings) {
  traj.validate();
  std::vector<cplx> velocity = traj.velocity;
  std::vector<double> lat = traj.lat;
  if (velocity.empty()) {
    velocity = velocities_from_positions(traj);
    lat.pop_back();
  }
  return fit_drifter(velocity, inertial_frequency(lat), traj.delta(), mode, settings);
}

std::vector<BatchRow> batch_compare(const std::vector<Trajectory>& trajectories,
                                    const FitSettings& settings, std::size_t threads) {
  std::vector<BatchRow> rows(trajectories.size());
  auto work = [&](std::size_t k) {
    BatchRow& row = rows[k];
    row.id = trajectories[k].id.empty() ? std::to_string(k) : trajectories[k].id;
    try {
      const auto s = fit_drifter(trajectories[k], Mode::stationary, settings);
      const auto m = fit_drifter(trajectories[k], Mode::modulated, settings);
      row.inv_lambda_stationary = 1.0 / s.params.lambda;
      row.inv_lambda_modulated = 1.0 / m.params.lambda;
      row.difference = s.result.objective_value - m.result.objective_value;
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
  };
  const std::size_t nt = std::max<std::size_t>(1, std::min(threads, trajectories.size()));
  if (nt == 1) {
    for (std::size_t k = 0; k < trajectories.size(); ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nt; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < trajectories.size(); k += nt) work(k);
      });
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::string batch_csv(const std::vector<BatchRow>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "id,ok,inv_lambda_stationary,inv_lambda_modulated,difference\n";
  for (const auto& r : rows)
    os << r.id << ',' << (r.ok ? 1 : 0) << ',' << r.inv_lambda_stationary << ','
       << r.inv_lambda_modulated << ',' << r.difference << '\n';
  return os.str();
}

Trajectory trajectory_from_csv(const std::string& text, const std::string& id) {
  const auto table = io::parse_csv(text);
  const auto it = table.column("time"), ilat = table.column("lat"), ilon = table.column("lon");
  if (it == std::string::npos || ilat == std::string::npos || ilon == std::string::npos)
    throw InvalidArgument("trajectory CSV needs time, lat and lon columns");
  Trajectory t;
  t.id = id;
  t.times = table.column_values(it);
  t.lat = table.column_values(ilat);
  t.lon = table.column_values(ilon);
  const auto iu = table.column("u"), iv = table.column("v");
  if (iu != std::string::npos && iv != std::string::npos) {
    const auto u = table.column_values(iu), v = table.column_values(iv);
    for (std::size_t k = 0; k < u.size(); ++k) t.velocity.emplace_back(u[k], v[k]);
  }
  t.validate();
  return t;
}

std::string trajectory_csv(const Trajectory& traj) {
  io::CsvTable table;
  const bool with_v = traj.velocity.size() == traj.size();
  table.header = {"time", "lat", "lon"};
  if (with_v) {
    table.header.push_back("u");
    table.header.push_back("v");
  }
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<double> row{traj.times[k], traj.lat[k], traj.lon[k]};
    if (with_v) {
      row.push_back(traj.velocity[k].real());
      row.push_back(traj.velocity[k].imag());
    }
    table.rows.push_back(std::move(row));
  }
  return io::format_csv(table);
}

std::string overlay_csv(const DrifterFit& stationary, const DrifterFit& modulated, double delta) {
  const std::size_t n = modulated.periodogram.size();
  return spectrum_csv(n, {"periodogram", "stationary_fit", "modulated_fit"},
                      {modulated.periodogram, stationary.fitted, modulated.fitted},
                      1.0 / (2.0 * kPi * delta))
      .replace(0, 5, "omega_cpd");
}

std::vector<Trajectory> synthetic_batch(const SyntheticConfig& base, std::size_t count,
                                        std::uint64_t seed, double sweep_deg, double lat_min,
                                        double lat_max) {
  if (!(lat_min >= 0.0) || !(lat_max >= lat_min) || !(sweep_deg >= 0.0) || lat_max + sweep_deg > 90.0)
    throw InvalidArgument("invalid latitude range for a synthetic batch");
  std::vector<Trajectory> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng(derive_seed(seed, k));
    SyntheticConfig cfg = base;
    const double hemi = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double lo = lat_min + (lat_max - lat_min) * rng.uniform();
    const bool poleward = rng.uniform() < 0.5;
    cfg.lat_start = hemi * (poleward ? lo : lo + sweep_deg);
    cfg.lat_end = hemi * (poleward ? lo + sweep_deg : lo);
    cfg.seed = rng.engine()();
    out.push_back(synthetic_trajectory(cfg));
    out.back().id = "synthetic-" + std::to_string(k);
  }
  return out;
}

SyntheticConfig synthetic_from_json(const nlohmann::json& j) {
  SyntheticConfig c;
  c.n = j.value("N", c.n);
  c.delta = j.value("delta", c.delta);
  c.lat_start = j.value("lat_start", c.lat_start);
  c.lat_end = j.value("lat_end", c.lat_end);
  c.seed = j.value("seed", c.seed);
  if (j.contains("params")) {
    const auto& p = j.at("params");
    c.params.A = p.value("A", c.params.A);
    c.params.lambda = p.value("lambda", c.params.lambda);
    c.params.B = p.value("B", c.params.B);
    c.params.h = p.value("h", c.params.h);
    c.params.alpha = p.value("alpha", c.params.alpha);
  }
  return c;
}

Trajectory synthetic_trajectory(const SyntheticConfig& cfg) {
  if (cfg.n < 2) throw InvalidArgument("synthetic trajectory needs N >= 2");
  const std::size_t n = cfg.n;
  Trajectory t;
  t.id = "synthetic-" + std::to_string(cfg.seed);
  t.times.resize(n);
  t.lat.resize(n);
  t.lon.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    t.times[k] = static_cast<double>(k) * cfg.delta;
    t.lat[k] = cfg.lat_start + (cfg.lat_end - cfg.lat_start) * static_cast<double>(k) /
                                   static_cast<double>(n - 1);
  }
  const auto omega_f = inertial_frequency(t.lat);
  std::vector<double> beta(n);
  for (std::size_t k = 0; k < n; ++k) beta[k] = 2.0 * kPi * cfg.delta * omega_f[k];
  const auto ar = ou_to_ar(cfg.params.A, cfg.params.lambda, cfg.delta);
  auto z = simulate_complex_ar1(ar.r, ar.sigma, beta, n, derive_seed(cfg.seed, 1));
  t.velocity = z.values();
  if (cfg.params.B > 0.0) {
    const auto m = LatentModel::matern(cfg.params.B, cfg.params.h, cfg.params.alpha, cfg.delta);
    const auto bg = simulate_from_acv(m.autocov_sequence(n), n, derive_seed(cfg.seed, 2), true);
    for (std::size_t k = 0; k < n; ++k) t.velocity[k] += bg.values()[k];
  }
  t.lon[0] = -140.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double dt = cfg.delta * kSolarDay;
    const double metric = kCmPerDegree * std::cos(t.lat[k - 1] * kPi / 180.0);
    t.lon[k] = t.lon[k - 1] + t.velocity[k - 1].real() * dt / metric;
  }
  return t;
}

std::vector<Segment> segment_windows(std::span<const double> omega_f_cpd, double delta,
                                     double periods, double overlap) {
  if (!(periods > 0.0) || !(overlap >= 0.0 && overlap < 1.0))
    throw InvalidArgument("invalid segment settings");
  const std::size_t n = omega_f_cpd.size();
  std::vector<Segment> out;
  std::size_t start = 0;
  while (start < n) {
    double cycles = 0.0;
    std::size_t end = start, next = n;
    while (end < n && cycles < periods) {
      cycles += std::abs(omega_f_cpd[end]) * delta;
      ++end;
      if (next == n && cycles >= periods * (1.0 - overlap)) next = end;
    }
    if (cycles < periods) break;
    Segment s{start, end - start, 0.0};
    const auto part = omega_f_cpd.subspan(start, s.length);
    const double mu = mean_of(part);
    double var = 0.0;
    for (double v : part) var += (v - mu) * (v - mu);
    var /= static_cast<double>(part.size());
    s.variability = std::abs(mu) > 0.0 ? std::sqrt(var) / std::abs(mu)
                                       : std::numeric_limits<double>::infinity();
    out.push_back(s);
    start = std::max(next, start + 1);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Segment& a, const Segment& b) { return a.variability > b.variability; });
  return out;
}

}  // namespace modwhittle::drifter
