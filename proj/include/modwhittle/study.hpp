#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <tuple>
#include <string>
#include <vector>

#include "json.hpp"
#include "modwhittle/core.hpp"
#include "modwhittle/latent_models.hpp"
#include "modwhittle/modulation.hpp"
#include "modwhittle/optimize.hpp"

namespace modwhittle {

/// Monte Carlo study specification.
///
/// Scenarios:
///   modulated         latent `model` times `modulator` (random generators are
///                     redrawn every replicate). Estimators: modulated, stationary,
///                     whittle, exact.
///   car1-random-walk  complex AR(1) (r, sigma) rotated by a bounded random walk
///                     beta (gamma, Delta, A). Estimators: modulated, stationary.
///   car1-linear       complex AR(1) (r, sigma) rotated by a linear beta (gamma,
///                     Delta), all four estimated. Estimators: modulated,
///                     stationary, exact.
struct McStudy {
  std::string name = "study";
  std::string scenario = "modulated";
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::size_t> sizes;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> estimators;
  FitOptions fit;
  std::size_t threads = 1;
};

McStudy study_from_json(const nlohmann::json& j);

struct McRow {
  std::string estimator;
  std::size_t n = 0;
  std::string param;
  double truth = 0.0;
  double bias = 0.0;
  double var = 0.0;
  double mse = 0.0;
  double cpu = 0.0;
  std::size_t fits = 0;
  std::size_t failures = 0;
};

struct McReport {
  std::string name;
  std::vector<McRow> rows;
  /// estimates[estimator][N][param] over successful replicates, in replicate order.
  std::map<std::string, std::map<std::size_t, std::map<std::string, std::vector<double>>>> estimates;

  const McRow& row(const std::string& estimator, std::size_t n, const std::string& param) const;
  /// `include_cpu = false` drops the timing column, leaving a seed-determined table.
  std::string to_csv(bool include_cpu = true) const;
};

/// Bias, population variance and MSE = var + bias^2 of `values` about `truth`.
McRow summarize(const std::vector<double>& values, double truth);

/// Failure share allowed before a study is declared failed.
inline constexpr double kMaxFailureRate = 0.01;

/// Runs the study; throws FitFailure when an estimator fails on 1% or more of
/// the replicates for some N.
McReport run_study(const McStudy& study);

/// Moment estimate of AR(1) (a, sigma) from modulated data: c_Y(tau) / c_g(tau) at lags 0, 1.
std::pair<double, double> moment_ar1(std::span<const cplx> y, const CgSequence& cg);
/// Moment estimate of complex AR(1) (r, sigma, rotation) after demodulating by conj(g_t).
std::tuple<double, double, double> moment_car1(std::span<const cplx> y,
                                               std::span<const cplx> g);

}  // namespace modwhittle
