#pragma once

#include <optional>
#include <span>
#include <vector>

#include "modwhittle/core.hpp"
#include "modwhittle/latent_models.hpp"
#include "modwhittle/modulation.hpp"
#include "modwhittle/optimize.hpp"
#include "modwhittle/spectra.hpp"

namespace modwhittle {

/// Subset of the Fourier grid, in grid order. An empty mask selects every frequency.
struct FrequencyMask {
  std::vector<bool> include;

  static FrequencyMask all(std::size_t n);
  /// Frequencies w with lo <= w <= hi, radians per sample.
  static FrequencyMask band(std::size_t n, double lo, double hi);
  /// Frequencies with lo <= w / (2 pi delta) <= hi, cycles per unit time.
  static FrequencyMask band_cpd(std::size_t n, double delta, double lo, double hi);
  FrequencyMask without_zero(std::size_t n) const;

  bool selects(std::size_t i) const { return include.empty() || include[i]; }
  std::size_t count(std::size_t n) const;
};

/// (1/N) sum_{mask} [log f_X(w) + I(w) / f_X(w)].
double whittle_nll(const Periodogram& pgram, const LatentModel& model,
                   const FrequencyMask& mask = {});
double whittle_nll(const Series& data, const LatentModel& model, const FrequencyMask& mask = {});

/// (1/N) sum_{mask} [log S(w) + I(w) / S(w)] for a given expected periodogram.
/// The 1/N factor uses the full grid size N even under a mask.
double whittle_sum(const Periodogram& pgram, std::span<const double> sbar,
                   const FrequencyMask& mask = {});

/// Whittle sum with S = expected periodogram from c_g c_X.
double modulated_whittle_nll(const Periodogram& pgram, const CgSequence& cg,
                             const LatentModel& model, const FrequencyMask& mask = {});
double modulated_whittle_nll(const Series& data, const Modulator& mod, const LatentModel& model,
                             const FrequencyMask& mask = {});

inline constexpr std::size_t kExactCap = 2048;

/// (1/N') [log det C + y^H C^{-1} y] over the N' samples with g_t != 0, via
/// Cholesky. Real data with a real model use the real Gaussian density; all
/// other cases the proper complex Gaussian density.
double exact_gaussian_nll(const Series& data, const Modulator& mod, const LatentModel& model,
                          std::size_t cap = kExactCap);

/// Exact proper complex Gaussian likelihood of a modulated complex AR(1) or OU
/// model by its Markov factorisation, O(N). Requires g_t != 0 for all t.
/// Agrees with exact_gaussian_nll on the complex path.
double exact_car1_nll(const Series& data, const Modulator& mod, const LatentModel& model);

/// Independent components, each either modulated (c_g given) or stationary (g == 1).
class AggregateModel {
 public:
  struct Component {
    LatentModel model;
    std::optional<CgSequence> cg;
  };

  AggregateModel(std::size_t n, std::vector<Component> components);

  std::size_t size() const { return n_; }
  const std::vector<Component>& components() const { return components_; }

  /// Component parameters concatenated in order.
  ParameterVector parameters() const;
  AggregateModel with_parameters(const ParameterVector& theta) const;

  std::vector<cplx> expected_acv() const;

 private:
  std::size_t n_;
  std::vector<Component> components_;
};

ExpectedPeriodogram aggregate_expected_periodogram(const AggregateModel& agg);

Objective make_whittle_objective(Periodogram pgram, LatentModel model, FrequencyMask mask = {});
Objective make_modulated_whittle_objective(Periodogram pgram, CgSequence cg, LatentModel model,
                                           FrequencyMask mask = {});
Objective make_aggregate_objective(Periodogram pgram, AggregateModel agg, FrequencyMask mask = {});
Objective make_exact_objective(Series data, Modulator mod, LatentModel model);
Objective make_car1_objective(Series data, Modulator mod, LatentModel model);

struct LikelihoodComparison {
  FitResult stationary;
  FitResult nonstationary;
  double stationary_nll = 0.0;
  double nonstationary_nll = 0.0;
  /// stationary_nll - nonstationary_nll; positive favours the nonstationary model.
  double difference = 0.0;
};

LikelihoodComparison compare_likelihoods(const Objective& stationary,
                                         const ParameterVector& stationary_init,
                                         const Objective& nonstationary,
                                         const ParameterVector& nonstationary_init,
                                         const FitOptions& options = {});

/// Stationary side uses c_g = 1 - tau/N, nonstationary side the modulator's c_g.
LikelihoodComparison compare_likelihoods(const Series& data, const Modulator& mod,
                                         const LatentModel& stationary_model,
                                         const LatentModel& nonstationary_model,
                                         const FrequencyMask& mask = {},
                                         const FitOptions& options = {});

}  // namespace modwhittle
