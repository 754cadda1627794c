#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"
#include "modwhittle/core.hpp"

namespace modwhittle {

/// Objective over the full parameter vector (fixed entries included).
/// Exceptions derived from Error and non-finite values count as +infinity.
using Objective = std::function<double(const ParameterVector&)>;

struct FitOptions {
  /// 0 selects 2000 * d.
  std::size_t max_iter = 0;
  double tol_f = 1e-8;
  double tol_x = 1e-6;
  std::size_t n_starts = 3;
  std::uint64_t seed = 0;
  /// Standard deviation of perturbed starts on the transformed scale.
  double perturbation = 0.5;
  /// Initial simplex edge on the transformed scale.
  double initial_step = 0.25;
  /// Additional starts (e.g. method of moments), used before perturbed ones.
  std::vector<ParameterVector> extra_starts;
  /// Worker threads for multi-start; 1 runs starts sequentially.
  std::size_t threads = 1;
  bool record_history = false;
};

struct FitResult {
  ParameterVector theta_hat;
  double objective_value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  double wall_time = 0.0;
  std::size_t starts = 0;
  /// Best objective after each iteration of the winning start.
  std::vector<double> history;
};

/// Unconstrained coordinate for one bounded value: logit on two-sided bounds,
/// log on one-sided bounds, identity when free or periodic.
double transform(double x, const Bound& b);
double inverse_transform(double u, const Bound& b);

/// Free parameters of `theta` mapped to unconstrained coordinates.
std::vector<double> transform(const ParameterVector& theta);
/// Inverse of transform(); fixed entries are taken from `like`.
ParameterVector inverse_transform(const ParameterVector& like, std::span<const double> u);

/// Nelder-Mead on the transformed free parameters with multi-start.
FitResult fit(const Objective& objective, const ParameterVector& init,
              const FitOptions& options = {});

FitOptions fit_options_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FitResult& r);

}  // namespace modwhittle
