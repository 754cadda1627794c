#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace modwhittle {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input (wrong length, out-of-range argument, unknown name).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Parameters or inputs outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class FitFailure : public Error {
 public:
  using Error::Error;
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

enum class SeriesKind { real, complex };

/// Uniformly sampled series. Samples are always stored as complex numbers;
/// real-kind series carry zero imaginary parts.
class Series {
 public:
  Series(std::vector<cplx> values, double delta, SeriesKind kind);

  static Series real(std::span<const double> values, double delta = 1.0);
  static Series complex(std::vector<cplx> values, double delta = 1.0);

  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& values() const { return values_; }
  double delta() const { return delta_; }
  SeriesKind kind() const { return kind_; }
  bool is_complex() const { return kind_ == SeriesKind::complex; }

  std::vector<double> real_part() const;

 private:
  std::vector<cplx> values_;
  double delta_;
  SeriesKind kind_;
};

/// Fourier frequencies 2*pi*k/N for k = -ceil(N/2)+1, ..., floor(N/2), in
/// radians per sample, stored in increasing order.
class FourierGrid {
 public:
  explicit FourierGrid(std::size_t n);

  std::size_t size() const { return n_; }
  /// Integer index k of the i-th grid point.
  long index(std::size_t i) const { return lowest_ + static_cast<long>(i); }
  double frequency(std::size_t i) const;
  /// Position of grid point i in an unshifted length-N FFT output.
  std::size_t fft_bin(std::size_t i) const;
  /// Grid position holding the zero frequency.
  std::size_t zero_position() const { return static_cast<std::size_t>(-lowest_); }
  std::vector<double> frequencies() const;

 private:
  std::size_t n_;
  long lowest_;
};

FourierGrid fourier_grid(std::size_t n);

/// Interval constraint on one parameter. Infinite ends are always open.
struct Bound {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool lower_open = true;
  bool upper_open = true;
  /// Angle-like parameter living on [lower, upper) with wrap-around.
  bool periodic = false;

  static Bound open(double lo, double hi) { return {lo, hi, true, true, false}; }
  static Bound positive() { return open(0.0, std::numeric_limits<double>::infinity()); }
  static Bound above(double lo) { return open(lo, std::numeric_limits<double>::infinity()); }
  static Bound free() { return {}; }
  static Bound angle();

  bool contains(double x) const;
};

class ParameterVector {
 public:
  ParameterVector() = default;
  ParameterVector(std::vector<std::string> names, std::vector<double> values,
                  std::vector<Bound> bounds);

  std::size_t size() const { return values_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<Bound>& bounds() const { return bounds_; }
  const std::vector<bool>& fixed() const { return fixed_; }

  double operator[](std::size_t i) const { return values_[i]; }
  double value(const std::string& name) const;
  std::size_t position(const std::string& name) const;
  bool has(const std::string& name) const;

  void set(const std::string& name, double v);
  void set_bound(const std::string& name, Bound b);
  void set_fixed(const std::string& name, bool f);
  ParameterVector with_values(std::span<const double> values) const;

  /// Indices of parameters that are not fixed.
  std::vector<std::size_t> free_indices() const;
  std::vector<double> free_values() const;
  ParameterVector with_free_values(std::span<const double> free) const;

  bool in_bounds() const;

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
  std::vector<Bound> bounds_;
  std::vector<bool> fixed_;
};

/// Normalised DFT J(w) = N^{-1/2} sum_t x_t exp(-i w t), returned in grid order.
std::vector<cplx> dft(const Series& series);
std::vector<cplx> dft(std::span<const cplx> x);
/// Inverse of dft(): grid-ordered coefficients back to time samples.
std::vector<cplx> idft(std::span<const cplx> grid_values);

double wrap_angle(double x);

}  // namespace modwhittle
