#include "modwhittle/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "modwhittle/fft.hpp"

namespace modwhittle {

namespace {

constexpr double kNegativeTolerance = 1e-8;
constexpr double kClampValue = 1e-300;

}  // namespace

Periodogram periodogram(std::span<const cplx> x) {
  if (x.empty()) throw InvalidArgument("periodogram of an empty series");
  auto j = dft(x);
  Periodogram p;
  p.values.resize(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) p.values[i] = std::norm(j[i]);
  return p;
}

Periodogram periodogram(const Series& series) { return periodogram(series.values()); }

std::vector<cplx> expected_acv(const CgSequence& cg, std::span<const cplx> latent_acv) {
  if (latent_acv.size() != cg.size())
    throw InvalidArgument("c_g and latent autocovariance lengths differ");
  std::vector<cplx> c(cg.size());
  for (std::size_t tau = 0; tau < c.size(); ++tau) c[tau] = cg[tau] * latent_acv[tau];
  return c;
}

std::vector<cplx> expected_acv(const CgSequence& cg, const LatentModel& model) {
  auto cx = model.autocov_sequence(cg.size());
  return expected_acv(cg, cx);
}

void expected_periodogram_into(std::span<const cplx> cbar, std::vector<cplx>& work,
                               std::vector<double>& out) {
  const std::size_t n = cbar.size();
  // On the grid e^{-i w tau} has period N in tau, so negative lags fold onto
  // positive ones and a single length-N transform is exact.
  work.resize(n);
  work[0] = cplx{cbar[0].real(), 0.0};
  for (std::size_t tau = 1; tau < n; ++tau) work[tau] = cbar[tau] + std::conj(cbar[n - tau]);
  fft::forward_inplace(work);
  const FourierGrid grid(n);
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = work[grid.fft_bin(i)].real();
}

ExpectedPeriodogram expected_periodogram(std::span<const cplx> cbar) {
  if (cbar.empty()) throw InvalidArgument("expected periodogram of an empty sequence");
  std::vector<cplx> work;
  ExpectedPeriodogram s;
  expected_periodogram_into(cbar, work, s.values);
  bool all_zero = true;
  for (double v : s.values) {
    if (v < -kNegativeTolerance)
      throw DomainError("expected periodogram is negative; the expected autocovariance is invalid");
    if (v != 0.0) all_zero = false;
  }
  if (all_zero) {
    s.degenerate = true;
    return s;
  }
  for (auto& v : s.values)
    if (v <= 0.0) v = kClampValue;
  return s;
}

ExpectedPeriodogram expected_periodogram(const CgSequence& cg, const LatentModel& model) {
  auto s = expected_periodogram(expected_acv(cg, model));
  s.theta = model.params();
  return s;
}

ExpectedPeriodogram brute_force_expected_periodogram(const Modulator& mod,
                                                     const LatentModel& model, std::size_t cap) {
  const std::size_t n = mod.size();
  if (n > cap) throw InvalidArgument("brute-force expected periodogram refused above the size cap");
  const auto c = model.autocov_sequence(n);
  auto cov = [&](long lag) { return lag >= 0 ? c[static_cast<std::size_t>(lag)]
                                             : std::conj(c[static_cast<std::size_t>(-lag)]); };
  const FourierGrid grid(n);
  ExpectedPeriodogram s;
  s.values.resize(n);
  s.theta = model.params();
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = grid.frequency(i);
    for (std::size_t t = 0; t < n; ++t) v[t] = mod[t] * std::polar(1.0, -w * static_cast<double>(t));
    cplx acc = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      cplx row = 0.0;
      for (std::size_t b = 0; b < n; ++b)
        row += cov(static_cast<long>(b) - static_cast<long>(a)) * v[b];
      acc += std::conj(v[a]) * row;
    }
    s.values[i] = acc.real() / static_cast<double>(n);
  }
  s.degenerate = std::all_of(s.values.begin(), s.values.end(), [](double x) { return x == 0.0; });
  return s;
}

double fejer_kernel(std::size_t n, double lambda) {
  const double nn = static_cast<double>(n);
  const double half = std::sin(lambda / 2.0);
  if (std::abs(half) < 1e-12) return nn / (2.0 * std::numbers::pi);
  const double num = std::sin(nn * lambda / 2.0);
  return num * num / (2.0 * std::numbers::pi * nn * half * half);
}

std::vector<double> dunsmuir_spectrum(const LatentModel& model, const Modulator& mod) {
  const std::size_t n = mod.size();
  const FourierGrid grid(n);
  auto raw = fft::forward(mod.values());
  std::vector<double> g2(n);
  for (std::size_t i = 0; i < n; ++i) g2[i] = std::norm(raw[grid.fft_bin(i)]);
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = model.sampled_sdf(grid.frequency(i));
  std::vector<double> out(n, 0.0);
  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      // w_i - l_j is again a grid frequency modulo 2 pi.
      const long k = grid.index(i) - grid.index(j);
      const long pos = ((k - grid.index(0)) % static_cast<long>(n) + static_cast<long>(n)) %
                       static_cast<long>(n);
      acc += f[static_cast<std::size_t>(pos)] * g2[j];
    }
    out[i] = acc * scale;
  }
  return out;
}

std::vector<QqPoint> exponential_qq(const Periodogram& pgram, const ExpectedPeriodogram& sbar) {
  const std::size_t n = pgram.size();
  if (n == 0) throw InvalidArgument("QQ plot of an empty periodogram");
  if (sbar.size() != n) throw InvalidArgument("periodogram and expected periodogram grids differ");
  std::vector<double> ratio(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sbar.values[i] > 0.0)) throw DomainError("expected periodogram must be positive");
    ratio[i] = pgram.values[i] / sbar.values[i];
  }
  std::sort(ratio.begin(), ratio.end());
  std::vector<QqPoint> out(n);
  double q = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    q += 1.0 / static_cast<double>(n - k);
    out[k] = {q, ratio[k]};
  }
  return out;
}

double qq_slope(std::span<const QqPoint> points) {
  if (points.size() < 2) throw InvalidArgument("slope needs at least two points");
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.theoretical;
    my += p.empirical;
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& p : points) {
    sxy += (p.theoretical - mx) * (p.empirical - my);
    sxx += (p.theoretical - mx) * (p.theoretical - mx);
  }
  return sxy / sxx;
}

std::string spectrum_csv(std::size_t n, const std::vector<std::string>& names,
                         const std::vector<std::vector<double>>& columns, double scale) {
  if (names.size() != columns.size()) throw InvalidArgument("column names and data differ");
  for (const auto& c : columns)
    if (c.size() != n) throw InvalidArgument("spectrum column length differs from N");
  const FourierGrid grid(n);
  std::ostringstream os;
  os.precision(17);
  os << "omega";
  for (const auto& name : names) os << ',' << name;
  os << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    os << grid.frequency(i) * scale;
    for (const auto& c : columns) os << ',' << c[i];
    os << '\n';
  }
  return os.str();
}

}  // namespace modwhittle
