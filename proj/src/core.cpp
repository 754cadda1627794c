#include "modwhittle/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "modwhittle/fft.hpp"

namespace modwhittle {

Series::Series(std::vector<cplx> values, double delta, SeriesKind kind)
    : values_(std::move(values)), delta_(delta), kind_(kind) {
  if (values_.empty()) throw InvalidArgument("series must contain at least one sample");
  if (!(delta_ > 0.0) || !std::isfinite(delta_))
    throw InvalidArgument("sampling interval must be positive");
  if (kind_ == SeriesKind::real) {
    for (const auto& v : values_)
      if (v.imag() != 0.0) throw InvalidArgument("real series with non-zero imaginary part");
  }
}

Series Series::real(std::span<const double> values, double delta) {
  std::vector<cplx> v(values.begin(), values.end());
  return Series(std::move(v), delta, SeriesKind::real);
}

Series Series::complex(std::vector<cplx> values, double delta) {
  return Series(std::move(values), delta, SeriesKind::complex);
}

std::vector<double> Series::real_part() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](cplx v) { return v.real(); });
  return out;
}

FourierGrid::FourierGrid(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidArgument("Fourier grid needs N >= 1");
  const long nl = static_cast<long>(n);
  lowest_ = -((nl + 1) / 2) + 1;
}

double FourierGrid::frequency(std::size_t i) const {
  return 2.0 * std::numbers::pi * static_cast<double>(index(i)) / static_cast<double>(n_);
}

std::size_t FourierGrid::fft_bin(std::size_t i) const {
  const long n = static_cast<long>(n_);
  return static_cast<std::size_t>(((index(i) % n) + n) % n);
}

std::vector<double> FourierGrid::frequencies() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = frequency(i);
  return out;
}

FourierGrid fourier_grid(std::size_t n) { return FourierGrid(n); }

Bound Bound::angle() {
  return {-std::numbers::pi, std::numbers::pi, false, true, true};
}

bool Bound::contains(double x) const {
  if (std::isnan(x)) return false;
  if (periodic) return true;
  const bool lo_ok = lower_open ? x > lower : x >= lower;
  const bool hi_ok = upper_open ? x < upper : x <= upper;
  return lo_ok && hi_ok;
}

ParameterVector::ParameterVector(std::vector<std::string> names, std::vector<double> values,
                                 std::vector<Bound> bounds)
    : names_(std::move(names)), values_(std::move(values)), bounds_(std::move(bounds)) {
  if (names_.empty()) throw InvalidArgument("parameter vector must not be empty");
  if (names_.size() != values_.size() || names_.size() != bounds_.size())
    throw InvalidArgument("parameter names, values and bounds differ in length");
  fixed_.assign(names_.size(), false);
}

std::size_t ParameterVector::position(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InvalidArgument("unknown parameter '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

bool ParameterVector::has(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

double ParameterVector::value(const std::string& name) const { return values_[position(name)]; }

void ParameterVector::set(const std::string& name, double v) { values_[position(name)] = v; }

void ParameterVector::set_bound(const std::string& name, Bound b) { bounds_[position(name)] = b; }

void ParameterVector::set_fixed(const std::string& name, bool f) { fixed_[position(name)] = f; }

ParameterVector ParameterVector::with_values(std::span<const double> values) const {
  if (values.size() != values_.size()) throw InvalidArgument("parameter count mismatch");
  ParameterVector out = *this;
  std::copy(values.begin(), values.end(), out.values_.begin());
  return out;
}

std::vector<std::size_t> ParameterVector::free_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < size(); ++i)
    if (!fixed_[i]) idx.push_back(i);
  return idx;
}

std::vector<double> ParameterVector::free_values() const {
  std::vector<double> out;
  for (auto i : free_indices()) out.push_back(values_[i]);
  return out;
}

ParameterVector ParameterVector::with_free_values(std::span<const double> free) const {
  auto idx = free_indices();
  if (free.size() != idx.size()) throw InvalidArgument("free parameter count mismatch");
  ParameterVector out = *this;
  for (std::size_t j = 0; j < idx.size(); ++j) out.values_[idx[j]] = free[j];
  return out;
}

bool ParameterVector::in_bounds() const {
  for (std::size_t i = 0; i < size(); ++i)
    if (!bounds_[i].contains(values_[i])) return false;
  return true;
}

std::vector<cplx> dft(std::span<const cplx> x) {
  const std::size_t n = x.size();
  FourierGrid grid(n);
  auto raw = fft::forward(x);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = raw[grid.fft_bin(i)] * scale;
  return out;
}

std::vector<cplx> dft(const Series& series) { return dft(series.values()); }

std::vector<cplx> idft(std::span<const cplx> grid_values) {
  const std::size_t n = grid_values.size();
  FourierGrid grid(n);
  std::vector<cplx> bins(n);
  for (std::size_t i = 0; i < n; ++i) bins[grid.fft_bin(i)] = grid_values[i];
  auto out = fft::backward(bins);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : out) v *= scale;
  return out;
}

double wrap_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double y = std::fmod(x + std::numbers::pi, two_pi);
  if (y < 0.0) y += two_pi;
  return y - std::numbers::pi;
}

}  // namespace modwhittle
