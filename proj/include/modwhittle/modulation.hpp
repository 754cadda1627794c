#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "modwhittle/core.hpp"

namespace modwhittle {

/// Known deterministic modulating sequence g_t, t = 0..N-1.
class Modulator {
 public:
  explicit Modulator(std::vector<cplx> g, std::string generator = "custom",
                     nlohmann::json params = nlohmann::json::object(),
                     std::optional<std::uint64_t> seed = std::nullopt);

  std::size_t size() const { return g_.size(); }
  const std::vector<cplx>& values() const { return g_; }
  cplx operator[](std::size_t t) const { return g_[t]; }
  const std::string& generator() const { return generator_; }
  const nlohmann::json& params() const { return params_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  /// Upper bound on |g_t|.
  double gmax() const { return gmax_; }
  bool is_complex() const;
  /// Prefix g_0..g_{n-1}, keeping the generator tag.
  Modulator prefix(std::size_t n) const;
  /// g_t -> e^{i phi} g_t.
  Modulator rotated(double phi) const;

 private:
  std::vector<cplx> g_;
  std::string generator_;
  nlohmann::json params_;
  std::optional<std::uint64_t> seed_;
  double gmax_ = 0.0;
};

/// c_g(tau) = (1/N) sum_{t=0}^{N-1-tau} conj(g_t) g_{t+tau}, tau = 0..N-1.
class CgSequence {
 public:
  explicit CgSequence(std::vector<cplx> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& values() const { return values_; }
  cplx operator[](std::size_t tau) const { return values_[tau]; }

 private:
  std::vector<cplx> values_;
};

CgSequence cg_sequence(const Modulator& mod);
CgSequence cg_sequence(std::span<const cplx> g);
/// c_g for g == 1: (1 - tau/N).
CgSequence cg_stationary(std::size_t n);

Modulator constant_modulator(std::size_t n, double value = 1.0);

/// k observed samples, then l missing, repeated up to length n.
Modulator periodic_missing_mask(std::size_t k, std::size_t l, std::size_t n);

/// g_t ~ Bernoulli(p_t), independent across t; draw t depends only on (seed, t).
Modulator bernoulli_mask(std::span<const double> p, std::uint64_t seed);

/// p_t = mean + amplitude * cos(freq * t).
std::vector<double> cosine_probabilities(double mean, double amplitude, double freq,
                                         std::size_t n);
Modulator cosine_bernoulli_mask(double mean, double amplitude, double freq, std::size_t n,
                                std::uint64_t seed);

/// g_0 = 1, g_t = exp(i sum_{u=1}^t beta_u). `beta` has length N; beta[0] is
/// not used. The accumulated phase is reduced modulo 2 pi at every step.
Modulator frequency_modulator(std::span<const double> beta);

/// beta_t = gamma + span * (2t - (N-1)) / (2(N-1)), t = 0..N-1.
std::vector<double> linear_beta(double gamma, double span, std::size_t n);

/// Closed-form c_g(tau) of frequency_modulator(linear_beta(gamma, span, n)).
cplx cg_linear_closed_form(double gamma, double span, std::size_t n, std::size_t tau);
CgSequence cg_linear_sequence(double gamma, double span, std::size_t n);

struct LagDiagnostic {
  std::size_t lag;
  double min_abs_cg;
  bool flagged;
};

/// For each lag, min over the lengths N of |c_g^{(N)}(lag)| computed on the
/// prefix g_0..g_{N-1}. Lags whose minimum falls below `tol` are flagged.
std::vector<LagDiagnostic> significant_correlation_diagnostic(const Modulator& mod,
                                                              std::span<const std::size_t> lags,
                                                              std::span<const std::size_t> lengths,
                                                              double tol = 1e-3);

struct StationarityWitness {
  bool stationary = false;
  double modulus = 0.0;
  double gamma = 0.0;
};

/// Whether a complex modulated process with latent lag-gcd `mu` is stationary:
/// constant modulus and phi_t = phi_{t mod mu} + gamma floor(t/mu) (mod 2 pi).
/// mu == 0 denotes a white-noise latent process (constant modulus only).
StationarityWitness stationarity_check(const Modulator& mod, std::size_t mu, double tol = 1e-9);

nlohmann::json to_json(const Modulator& mod);
/// Builds a modulator from {generator, params, seed, N} or {values: [...]}
/// (real numbers or [re, im] pairs).
Modulator modulator_from_json(const nlohmann::json& j);

}  // namespace modwhittle
