#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "modwhittle/core.hpp"
#include "modwhittle/latent_models.hpp"
#include "modwhittle/modulation.hpp"

namespace modwhittle {

/// Stationary AR(p) or MA(q) path. AR starts from the exact stationary law of
/// the first p values.
Series simulate_ar(const LatentModel& model, std::size_t n, std::uint64_t seed);

/// Z_t = r e^{i beta_t} Z_{t-1} + eps_t, Z_0 ~ N_C(0, sigma^2/(1-r^2)), with
/// eps_t ~ N_C(0, sigma^2). `beta` has length N (beta[0] unused) or is empty
/// for beta == 0.
Series simulate_complex_ar1(double r, double sigma, std::span<const double> beta, std::size_t n,
                            std::uint64_t seed);

/// Gaussian path with autocovariance acv[0..N-1] by circulant embedding of
/// size 2(N-1), falling back to Cholesky for N <= 2048. A complex draw is
/// proper; a real draw requires a real acv.
Series simulate_from_acv(std::span<const cplx> acv, std::size_t n, std::uint64_t seed,
                         bool complex_valued);

/// Path of any latent family, through the cheapest exact route.
Series simulate_latent(const LatentModel& model, std::size_t n, std::uint64_t seed);

/// g_t X_t.
Series simulate_modulated(const LatentModel& model, const Modulator& mod, std::uint64_t seed);

/// beta_0 = D(gamma + A e_0), beta_t = D(beta_{t-1} + A e_t), with D clamping
/// to [gamma - Delta, gamma + Delta] and e_t standard normal.
std::vector<double> bounded_random_walk_beta(double gamma, double span, double step,
                                             std::size_t n, std::uint64_t seed);

}  // namespace modwhittle
