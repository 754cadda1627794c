#include "modwhittle/likelihood.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace modwhittle {

FrequencyMask FrequencyMask::all(std::size_t n) { return {std::vector<bool>(n, true)}; }

FrequencyMask FrequencyMask::band(std::size_t n, double lo, double hi) {
  const FourierGrid grid(n);
  FrequencyMask m{std::vector<bool>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double w = grid.frequency(i);
    m.include[i] = w >= lo && w <= hi;
  }
  return m;
}

FrequencyMask FrequencyMask::band_cpd(std::size_t n, double delta, double lo, double hi) {
  const double scale = 2.0 * std::numbers::pi * delta;
  return band(n, lo * scale, hi * scale);
}

FrequencyMask FrequencyMask::without_zero(std::size_t n) const {
  FrequencyMask m = include.empty() ? all(n) : *this;
  m.include[FourierGrid(n).zero_position()] = false;
  return m;
}

std::size_t FrequencyMask::count(std::size_t n) const {
  if (include.empty()) return n;
  std::size_t c = 0;
  for (bool b : include) c += b ? 1 : 0;
  return c;
}

namespace {

void check_mask(const FrequencyMask& mask, std::size_t n) {
  if (!mask.include.empty() && mask.include.size() != n)
    throw InvalidArgument("frequency mask length differs from the grid");
}

}  // namespace

double whittle_sum(const Periodogram& pgram, std::span<const double> sbar,
                   const FrequencyMask& mask) {
  const std::size_t n = pgram.size();
  if (sbar.size() != n) throw InvalidArgument("spectrum and periodogram lengths differ");
  check_mask(mask, n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask.selects(i)) continue;
    const double s = sbar[i];
    if (!(s > 0.0)) throw DomainError("spectrum is not positive on the frequency mask");
    acc += std::log(s) + pgram.values[i] / s;
  }
  return acc / static_cast<double>(n);
}

double whittle_nll(const Periodogram& pgram, const LatentModel& model, const FrequencyMask& mask) {
  const std::size_t n = pgram.size();
  check_mask(mask, n);
  const FourierGrid grid(n);
  std::vector<double> f(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    if (mask.selects(i)) f[i] = model.sampled_sdf(grid.frequency(i));
  return whittle_sum(pgram, f, mask);
}

double whittle_nll(const Series& data, const LatentModel& model, const FrequencyMask& mask) {
  return whittle_nll(periodogram(data), model, mask);
}

double modulated_whittle_nll(const Periodogram& pgram, const CgSequence& cg,
                             const LatentModel& model, const FrequencyMask& mask) {
  if (cg.size() != pgram.size()) throw InvalidArgument("modulator length differs from the data");
  auto cbar = expected_acv(cg, model);
  std::vector<cplx> work;
  std::vector<double> sbar;
  expected_periodogram_into(cbar, work, sbar);
  return whittle_sum(pgram, sbar, mask);
}

double modulated_whittle_nll(const Series& data, const Modulator& mod, const LatentModel& model,
                             const FrequencyMask& mask) {
  if (mod.size() != data.size()) throw InvalidArgument("modulator length differs from the data");
  return modulated_whittle_nll(periodogram(data), cg_sequence(mod), model, mask);
}

double exact_gaussian_nll(const Series& data, const Modulator& mod, const LatentModel& model,
                          std::size_t cap) {
  const std::size_t n = data.size();
  if (mod.size() != n) throw InvalidArgument("modulator length differs from the data");
  if (n > cap) throw InvalidArgument("exact likelihood refused above the size cap");
  std::vector<std::size_t> keep;
  for (std::size_t t = 0; t < n; ++t)
    if (mod[t] != cplx{0.0, 0.0}) keep.push_back(t);
  if (keep.empty()) throw DomainError("no observed samples after removing g_t = 0");
  const auto m = static_cast<Eigen::Index>(keep.size());
  const auto c = model.autocov_sequence(n);
  auto cov = [&](long lag) {
    return lag >= 0 ? c[static_cast<std::size_t>(lag)] : std::conj(c[static_cast<std::size_t>(-lag)]);
  };
  const bool real_path = !data.is_complex() && !model.complex_valued() && !mod.is_complex();
  double logdet = 0.0, quad = 0.0;
  if (real_path) {
    Eigen::MatrixXd cm(m, m);
    Eigen::VectorXd y(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const auto s = keep[static_cast<std::size_t>(a)];
      y(a) = data.values()[s].real();
      for (Eigen::Index b = 0; b < m; ++b) {
        const auto t = keep[static_cast<std::size_t>(b)];
        cm(a, b) = mod[s].real() * mod[t].real() *
                   cov(static_cast<long>(t) - static_cast<long>(s)).real();
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cm);
    if (llt.info() != Eigen::Success) throw DomainError("covariance matrix is not positive definite");
    const auto& l = llt.matrixLLT();
    for (Eigen::Index a = 0; a < m; ++a) logdet += 2.0 * std::log(l(a, a));
    const Eigen::VectorXd z = llt.matrixL().solve(y);
    quad = z.squaredNorm();
  } else {
    // Gamma_{st} = E{Y_s conj(Y_t)} = g_s conj(g_t) c(s - t).
    Eigen::MatrixXcd cm(m, m);
    Eigen::VectorXcd y(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const auto s = keep[static_cast<std::size_t>(a)];
      y(a) = data.values()[s];
      for (Eigen::Index b = 0; b < m; ++b) {
        const auto t = keep[static_cast<std::size_t>(b)];
        cm(a, b) = mod[s] * std::conj(mod[t]) * cov(static_cast<long>(s) - static_cast<long>(t));
      }
    }
    Eigen::LLT<Eigen::MatrixXcd> llt(cm);
    if (llt.info() != Eigen::Success) throw DomainError("covariance matrix is not positive definite");
    const auto& l = llt.matrixLLT();
    for (Eigen::Index a = 0; a < m; ++a) logdet += 2.0 * std::log(l(a, a).real());
    const Eigen::VectorXcd z = llt.matrixL().solve(y);
    quad = z.squaredNorm();
  }
  if (!std::isfinite(logdet) || !std::isfinite(quad))
    throw DomainError("covariance matrix is numerically singular");
  return (logdet + quad) / static_cast<double>(m);
}

double exact_car1_nll(const Series& data, const Modulator& mod, const LatentModel& model) {
  const std::size_t n = data.size();
  if (mod.size() != n) throw InvalidArgument("modulator length differs from the data");
  if (model.family() != Family::complex_ar1 && model.family() != Family::ou)
    throw InvalidArgument("Markov likelihood needs a complex AR(1) or OU model");
  model.validate();
  const auto c = model.autocov_sequence(std::min<std::size_t>(n, 2));
  const double v0 = c[0].real();
  double r = 0.0, sigma2 = 0.0, rot = 0.0;
  if (model.family() == Family::complex_ar1) {
    r = model.params()[0];
    sigma2 = model.params()[1] * model.params()[1];
    rot = model.params()[2];
  } else {
    const auto ar = ou_to_ar(model.params()[0], model.params()[1], model.delta());
    r = ar.r;
    sigma2 = ar.sigma * ar.sigma;
    rot = 2.0 * std::numbers::pi * model.params()[2] * model.delta();
  }
  const cplx phi = std::polar(r, rot);
  const auto& y = data.values();
  for (std::size_t t = 0; t < n; ++t)
    if (mod[t] == cplx{0.0, 0.0}) throw InvalidArgument("Markov likelihood needs g_t != 0");
  double acc = 0.0;
  const double s0 = std::norm(mod[0]) * v0;
  acc += std::log(s0) + std::norm(y[0]) / s0;
  for (std::size_t t = 1; t < n; ++t) {
    const cplx e = y[t] - phi * (mod[t] / mod[t - 1]) * y[t - 1];
    const double s = std::norm(mod[t]) * sigma2;
    acc += std::log(s) + std::norm(e) / s;
  }
  return acc / static_cast<double>(n);
}

AggregateModel::AggregateModel(std::size_t n, std::vector<Component> components)
    : n_(n), components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("aggregate model needs at least one component");
  for (const auto& c : components_)
    if (c.cg && c.cg->size() != n_) throw InvalidArgument("component length differs from N");
}

ParameterVector AggregateModel::parameters() const {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<Bound> bounds;
  std::vector<bool> fixed;
  for (const auto& c : components_) {
    const auto& p = c.model.params();
    names.insert(names.end(), p.names().begin(), p.names().end());
    values.insert(values.end(), p.values().begin(), p.values().end());
    bounds.insert(bounds.end(), p.bounds().begin(), p.bounds().end());
    fixed.insert(fixed.end(), p.fixed().begin(), p.fixed().end());
  }
  ParameterVector out(names, values, bounds);
  for (std::size_t i = 0; i < names.size(); ++i)
    if (fixed[i]) out.set_fixed(names[i], true);
  return out;
}

AggregateModel AggregateModel::with_parameters(const ParameterVector& theta) const {
  AggregateModel out = *this;
  std::size_t offset = 0;
  for (auto& c : out.components_) {
    const std::size_t d = c.model.params().size();
    if (offset + d > theta.size()) throw InvalidArgument("aggregate parameter vector too short");
    std::span<const double> part(theta.values().data() + offset, d);
    c.model = c.model.with_values(part);
    offset += d;
  }
  if (offset != theta.size()) throw InvalidArgument("aggregate parameter vector too long");
  return out;
}

std::vector<cplx> AggregateModel::expected_acv() const {
  std::vector<cplx> total(n_, cplx{0.0, 0.0});
  const double nn = static_cast<double>(n_);
  for (const auto& c : components_) {
    const auto cx = c.model.autocov_sequence(n_);
    for (std::size_t tau = 0; tau < n_; ++tau) {
      const cplx w = c.cg ? (*c.cg)[tau] : cplx{1.0 - static_cast<double>(tau) / nn, 0.0};
      total[tau] += w * cx[tau];
    }
  }
  return total;
}

ExpectedPeriodogram aggregate_expected_periodogram(const AggregateModel& agg) {
  auto s = expected_periodogram(agg.expected_acv());
  s.theta = agg.parameters();
  return s;
}

Objective make_whittle_objective(Periodogram pgram, LatentModel model, FrequencyMask mask) {
  return [pgram = std::move(pgram), model = std::move(model),
          mask = std::move(mask)](const ParameterVector& theta) {
    return whittle_nll(pgram, model.with_params(theta), mask);
  };
}

Objective make_modulated_whittle_objective(Periodogram pgram, CgSequence cg, LatentModel model,
                                           FrequencyMask mask) {
  if (cg.size() != pgram.size()) throw InvalidArgument("modulator length differs from the data");
  return [pgram = std::move(pgram), cg = std::move(cg), model = std::move(model),
          mask = std::move(mask)](const ParameterVector& theta) {
    return modulated_whittle_nll(pgram, cg, model.with_params(theta), mask);
  };
}

Objective make_aggregate_objective(Periodogram pgram, AggregateModel agg, FrequencyMask mask) {
  if (agg.size() != pgram.size()) throw InvalidArgument("aggregate length differs from the data");
  return [pgram = std::move(pgram), agg = std::move(agg),
          mask = std::move(mask)](const ParameterVector& theta) {
    const auto cbar = agg.with_parameters(theta).expected_acv();
    std::vector<cplx> work;
    std::vector<double> sbar;
    expected_periodogram_into(cbar, work, sbar);
    return whittle_sum(pgram, sbar, mask);
  };
}

Objective make_exact_objective(Series data, Modulator mod, LatentModel model) {
  return [data = std::move(data), mod = std::move(mod),
          model = std::move(model)](const ParameterVector& theta) {
    return exact_gaussian_nll(data, mod, model.with_params(theta));
  };
}

Objective make_car1_objective(Series data, Modulator mod, LatentModel model) {
  return [data = std::move(data), mod = std::move(mod),
          model = std::move(model)](const ParameterVector& theta) {
    return exact_car1_nll(data, mod, model.with_params(theta));
  };
}

LikelihoodComparison compare_likelihoods(const Objective& stationary,
                                         const ParameterVector& stationary_init,
                                         const Objective& nonstationary,
                                         const ParameterVector& nonstationary_init,
                                         const FitOptions& options) {
  LikelihoodComparison out;
  out.stationary = fit(stationary, stationary_init, options);
  out.nonstationary = fit(nonstationary, nonstationary_init, options);
  out.stationary_nll = out.stationary.objective_value;
  out.nonstationary_nll = out.nonstationary.objective_value;
  out.difference = out.stationary_nll - out.nonstationary_nll;
  return out;
}

LikelihoodComparison compare_likelihoods(const Series& data, const Modulator& mod,
                                         const LatentModel& stationary_model,
                                         const LatentModel& nonstationary_model,
                                         const FrequencyMask& mask, const FitOptions& options) {
  if (mod.size() != data.size()) throw InvalidArgument("modulator length differs from the data");
  const auto pgram = periodogram(data);
  auto s = make_modulated_whittle_objective(pgram, cg_stationary(data.size()), stationary_model, mask);
  auto ns = make_modulated_whittle_objective(pgram, cg_sequence(mod), nonstationary_model, mask);
  return compare_likelihoods(s, stationary_model.params(), ns, nonstationary_model.params(), options);
}

}  // namespace modwhittle
