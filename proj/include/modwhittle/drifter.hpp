#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "modwhittle/core.hpp"
#include "modwhittle/latent_models.hpp"
#include "modwhittle/likelihood.hpp"
#include "modwhittle/modulation.hpp"
#include "modwhittle/optimize.hpp"

namespace modwhittle::drifter {

inline constexpr double kSiderealDay = 86164.1;
inline constexpr double kSolarDay = 86400.0;
/// Arc length of one degree of latitude, km.
inline constexpr double kKmPerDegree = 111.32;

/// Inertial frequency -f K / (2 pi) in cycles per day, f = 2 (2 pi / T) sin(lat).
double inertial_frequency(double latitude_deg);
std::vector<double> inertial_frequency(std::span<const double> latitude_deg);

struct Trajectory {
  std::string id;
  /// Days, uniformly spaced.
  std::vector<double> times;
  std::vector<double> lat;
  std::vector<double> lon;
  /// u + i v in cm/s; empty when not supplied.
  std::vector<cplx> velocity;

  std::size_t size() const { return times.size(); }
  double delta() const;
  void validate() const;
};

/// Forward differences of positions in cm/s, length N - 1. Sample t uses the
/// latitude at t for the zonal metric.
std::vector<cplx> velocities_from_positions(const Trajectory& traj);

struct DrifterModulator {
  Modulator mod;
  double min_cpd = 0.0;
  double mean_cpd = 0.0;
  double max_cpd = 0.0;
  /// max |beta_t - mean beta|, radians.
  double max_beta_deviation = 0.0;
  /// Set when the deviation exceeds pi/2.
  bool bound_warning = false;
};

/// frequency_modulator with beta_t = 2 pi delta omega_f(t).
DrifterModulator drifter_modulator(std::span<const double> omega_f_cpd, double delta);

struct DrifterParams {
  double A = 0.0;
  double lambda = 0.0;
  double B = 0.0;
  double h = 0.0;
  double alpha = 0.0;
};

enum class Mode { stationary, modulated };
std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// Iteration cap used when FitSettings.fit.max_iter is 0. The Matern part has
/// flat directions (large h with large alpha) where Nelder-Mead crawls without
/// improving the estimate.
inline constexpr std::size_t kDrifterMaxIter = 2000;

struct FitSettings {
  /// Fitted band in cycles per day on the side of the inertial peak.
  double lo_cpd = 0.0;
  double hi_cpd = 0.8;
  /// Drop the Matern component (B = 0).
  bool no_background = false;
  std::optional<DrifterParams> init;
  FitOptions fit;
};

struct DrifterFit {
  Mode mode = Mode::modulated;
  FitResult result;
  DrifterParams params;
  double mean_omega_f = 0.0;
  FrequencyMask mask;
  std::vector<double> periodogram;
  std::vector<double> fitted;
};

/// Mask on the grid of length n selecting [lo, hi] cpd on the side of sign(mean_omega_f).
FrequencyMask inertial_side_mask(std::size_t n, double delta, double mean_omega_f, double lo_cpd,
                                 double hi_cpd);

/// Aggregate OU + Matern model. Stationary mode fixes the OU rotation at the
/// mean inertial frequency; modulated mode rotates the OU by the drifter modulator.
AggregateModel drifter_model(std::span<const double> omega_f_cpd, double delta, Mode mode,
                             const DrifterParams& p, bool no_background);

DrifterParams initial_params(std::span<const cplx> velocity, std::span<const double> omega_f_cpd,
                             double delta, const FrequencyMask& mask, bool no_background);

DrifterFit fit_drifter(std::span<const cplx> velocity, std::span<const double> omega_f_cpd,
                       double delta, Mode mode, const FitSettings& settings = {});
/// Uses the trajectory velocities, or differenced positions when absent (the
/// inertial frequency then comes from the latitude at the start of each difference).
DrifterFit fit_drifter(const Trajectory& traj, Mode mode, const FitSettings& settings = {});

struct BatchRow {
  std::string id;
  bool ok = false;
  double inv_lambda_stationary = 0.0;
  double inv_lambda_modulated = 0.0;
  /// stationary objective - modulated objective; positive favours the modulated model.
  double difference = 0.0;
  std::string error;
};

std::vector<BatchRow> batch_compare(const std::vector<Trajectory>& trajectories,
                                    const FitSettings& settings = {}, std::size_t threads = 1);
std::string batch_csv(const std::vector<BatchRow>& rows);

/// CSV columns time, lat, lon[, u, v].
Trajectory trajectory_from_csv(const std::string& text, const std::string& id = "");
std::string trajectory_csv(const Trajectory& traj);

/// CSV omega_cpd, periodogram, stationary_fit, modulated_fit.
std::string overlay_csv(const DrifterFit& stationary, const DrifterFit& modulated, double delta);

struct SyntheticConfig {
  std::size_t n = 720;
  double delta = kDefaultDelta;
  double lat_start = 5.0;
  double lat_end = 25.0;
  DrifterParams params{10.0, 0.5, 2.0, 0.5, 1.0};
  std::uint64_t seed = 0;
};

SyntheticConfig synthetic_from_json(const nlohmann::json& j);

/// Latitude moves linearly from lat_start to lat_end; velocities are the
/// modulated OU (inertial frequency of the current latitude) plus an
/// independent Matern background. Longitudes integrate the zonal velocity.
Trajectory synthetic_trajectory(const SyntheticConfig& cfg);

/// `count` trajectories sweeping `sweep_deg` of latitude within one hemisphere.
/// Trajectory k draws the hemisphere, the equatorward end in [lat_min, lat_max]
/// and the direction from derive_seed(seed, k); other settings come from `base`.
std::vector<Trajectory> synthetic_batch(const SyntheticConfig& base, std::size_t count,
                                        std::uint64_t seed, double sweep_deg = 20.0,
                                        double lat_min = 10.0, double lat_max = 20.0);

struct Segment {
  std::size_t start = 0;
  std::size_t length = 0;
  /// std(omega_f) / |mean(omega_f)| over the segment.
  double variability = 0.0;
};

/// Windows spanning `periods` local inertial periods with fractional `overlap`,
/// ordered by decreasing variability.
std::vector<Segment> segment_windows(std::span<const double> omega_f_cpd, double delta,
                                     double periods = 60.0, double overlap = 0.5);

}  // namespace modwhittle::drifter
