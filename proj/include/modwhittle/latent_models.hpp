#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "modwhittle/core.hpp"

namespace modwhittle {

/// Two-hour sampling of drifter data, in days.
inline constexpr double kDefaultDelta = 1.0 / 12.0;

enum class Family { ar, ma, complex_ar1, ou, matern };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/// Stationary latent process with a parametric autocovariance.
///
/// Parameter names per family:
///   ar           phi1..phip, sigma
///   ma           theta1..thetaq, sigma
///   complex_ar1  r, sigma, freq (rotation per sample, radians)
///   ou           A, lambda, omega_f (cycles/day, fixed by default)
///   matern       B, h, alpha
///
/// Autocovariances follow c(tau) = E{conj(X_t) X_{t+tau}}. Spectral densities
/// returned by sampled_sdf() use the convention f(w) = sum_tau c(tau) e^{-i w tau}
/// on radians per sample, which is the limit of the expected periodogram.
class LatentModel {
 public:
  static LatentModel ar(std::vector<double> phi, double sigma);
  /// An empty `theta` is white noise with variance sigma^2.
  static LatentModel ma(std::vector<double> theta, double sigma);
  static LatentModel complex_ar1(double r, double sigma, double freq = 0.0);
  static LatentModel ou(double amplitude, double damping, double inertial_cpd = 0.0,
                        double delta = kDefaultDelta);
  static LatentModel matern(double amplitude, double scale, double slope,
                            double delta = kDefaultDelta);

  Family family() const { return family_; }
  const ParameterVector& params() const { return params_; }
  double delta() const { return delta_; }
  /// Order p of an AR model or q of an MA model; 1 otherwise.
  std::size_t order() const;
  bool complex_valued() const;

  LatentModel with_params(ParameterVector p) const;
  LatentModel with_values(std::span<const double> values) const;
  LatentModel with_free_values(std::span<const double> values) const;
  LatentModel with_fixed(const std::string& name, bool fixed = true) const;
  LatentModel with_bound(const std::string& name, Bound b) const;

  /// Stationarity and family constraints (not the optimisation bounds).
  bool is_valid() const noexcept;
  void validate() const;

  cplx autocov(long tau) const;
  /// c(0), ..., c(n-1).
  std::vector<cplx> autocov_sequence(std::size_t n) const;

  /// Spectral density in the family's native units: radians per sample for
  /// ar/ma/complex_ar1, cycles per day for ou/matern.
  double sdf(double omega) const;
  /// Spectral density of the sampled process at radians per sample.
  double sampled_sdf(double omega) const;

 private:
  LatentModel(Family f, ParameterVector p, double delta);

  std::vector<cplx> ar_autocov(std::size_t n) const;

  Family family_;
  ParameterVector params_;
  double delta_ = 1.0;
};

struct ArParams {
  double r;
  double sigma;
};

struct OuParams {
  double amplitude;
  double damping;
};

/// Complex OU (A, lambda) sampled every delta days to complex AR(1) (r, sigma).
ArParams ou_to_ar(double amplitude, double damping, double delta);
OuParams ar_to_ou(double r, double sigma, double delta);

/// Number of alias terms on each side summed explicitly for the Matern
/// sampled spectrum; the remainder is integrated in closed form.
inline constexpr int kMaternAliasTerms = 4;
/// Oversampling of the frequency grid used to tabulate Matern autocovariances.
inline constexpr std::size_t kMaternOversampling = 4;

nlohmann::json to_json(const LatentModel& m);
LatentModel model_from_json(const nlohmann::json& j);

}  // namespace modwhittle
