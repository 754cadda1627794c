#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modwhittle/core.hpp"
#include "modwhittle/latent_models.hpp"
#include "modwhittle/modulation.hpp"

namespace modwhittle {

/// Periodogram |J(w)|^2 on the Fourier grid, in grid order.
struct Periodogram {
  std::vector<double> values;
  std::size_t size() const { return values.size(); }
};

/// Exact mean of the periodogram of a modulated series, in grid order.
struct ExpectedPeriodogram {
  std::vector<double> values;
  std::optional<ParameterVector> theta;
  /// Set when every value is zero (e.g. g == 0).
  bool degenerate = false;
  std::size_t size() const { return values.size(); }
};

Periodogram periodogram(const Series& series);
Periodogram periodogram(std::span<const cplx> x);

/// c_g(tau) c_X(tau), tau = 0..N-1.
std::vector<cplx> expected_acv(const CgSequence& cg, const LatentModel& model);
std::vector<cplx> expected_acv(const CgSequence& cg, std::span<const cplx> latent_acv);

/// sum_{|tau|<N} cbar(tau) e^{-i w tau} on the grid, with cbar(-tau) = conj(cbar(tau)).
/// Values below -1e-8 raise DomainError; smaller negatives are clamped to 1e-300.
ExpectedPeriodogram expected_periodogram(std::span<const cplx> cbar);
ExpectedPeriodogram expected_periodogram(const CgSequence& cg, const LatentModel& model);

/// Same transform without validation or allocation of the result struct; `out`
/// receives grid-ordered real parts. Used inside objective functions.
void expected_periodogram_into(std::span<const cplx> cbar, std::vector<cplx>& work,
                               std::vector<double>& out);

inline constexpr std::size_t kBruteForceCap = 256;

/// (1/N) v^H C v with v_t = g_t e^{-i w t} and C_{st} = c_X(t - s). O(N^3) overall.
ExpectedPeriodogram brute_force_expected_periodogram(const Modulator& mod,
                                                     const LatentModel& model,
                                                     std::size_t cap = kBruteForceCap);

/// sin^2(N l / 2) / (2 pi N sin^2(l / 2)), with the limit N / (2 pi) at l = 0 mod 2 pi.
double fejer_kernel(std::size_t n, double lambda);

/// Dunsmuir approximation on the f-scale: (1/N^2) sum_l f_X(w - l) |G(l)|^2,
/// G(l) = sum_t g_t e^{-i l t}. O(N^2).
std::vector<double> dunsmuir_spectrum(const LatentModel& model, const Modulator& mod);

struct QqPoint {
  double theoretical;
  double empirical;
};

/// Sorted ratios S_hat / S_bar against expected exponential order statistics.
std::vector<QqPoint> exponential_qq(const Periodogram& pgram, const ExpectedPeriodogram& sbar);

/// Least-squares slope of empirical on theoretical quantiles.
double qq_slope(std::span<const QqPoint> points);

/// CSV with header "omega,<name1>,<name2>,..." on the grid of length N.
std::string spectrum_csv(std::size_t n, const std::vector<std::string>& names,
                         const std::vector<std::vector<double>>& columns, double scale = 1.0);

}  // namespace modwhittle
