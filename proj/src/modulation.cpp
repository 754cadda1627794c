#include "modwhittle/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "modwhittle/fft.hpp"
#include "modwhittle/random.hpp"

namespace modwhittle {

Modulator::Modulator(std::vector<cplx> g, std::string generator, nlohmann::json params,
                     std::optional<std::uint64_t> seed)
    : g_(std::move(g)), generator_(std::move(generator)), params_(std::move(params)), seed_(seed) {
  if (g_.empty()) throw InvalidArgument("modulating sequence must not be empty");
  for (const auto& v : g_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidArgument("modulating sequence must be finite");
    gmax_ = std::max(gmax_, std::abs(v));
  }
}

bool Modulator::is_complex() const {
  return std::any_of(g_.begin(), g_.end(), [](cplx v) { return v.imag() != 0.0; });
}

Modulator Modulator::prefix(std::size_t n) const {
  if (n == 0 || n > g_.size()) throw InvalidArgument("prefix length out of range");
  return Modulator(std::vector<cplx>(g_.begin(), g_.begin() + static_cast<long>(n)), generator_,
                   params_, seed_);
}

Modulator Modulator::rotated(double phi) const {
  std::vector<cplx> g = g_;
  const cplx rot = std::polar(1.0, phi);
  for (auto& v : g) v *= rot;
  return Modulator(std::move(g), generator_, params_, seed_);
}

CgSequence cg_sequence(std::span<const cplx> g) {
  auto acf = fft::autocorrelation(g);
  const double inv_n = 1.0 / static_cast<double>(g.size());
  for (auto& v : acf) v *= inv_n;
  acf[0] = cplx{acf[0].real(), 0.0};
  return CgSequence(std::move(acf));
}

CgSequence cg_sequence(const Modulator& mod) { return cg_sequence(mod.values()); }

CgSequence cg_stationary(std::size_t n) {
  std::vector<cplx> c(n);
  for (std::size_t tau = 0; tau < n; ++tau)
    c[tau] = 1.0 - static_cast<double>(tau) / static_cast<double>(n);
  return CgSequence(std::move(c));
}

Modulator constant_modulator(std::size_t n, double value) {
  return Modulator(std::vector<cplx>(n, cplx{value, 0.0}), "constant", {{"value", value}});
}

Modulator periodic_missing_mask(std::size_t k, std::size_t l, std::size_t n) {
  if (k == 0) throw InvalidArgument("periodic mask needs k >= 1 observed samples per period");
  std::vector<cplx> g(n);
  for (std::size_t t = 0; t < n; ++t) g[t] = (t % (k + l)) < k ? 1.0 : 0.0;
  return Modulator(std::move(g), "periodic-missing", {{"k", k}, {"l", l}});
}

Modulator bernoulli_mask(std::span<const double> p, std::uint64_t seed) {
  std::vector<cplx> g(p.size());
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (!(p[t] >= 0.0 && p[t] <= 1.0))
      throw InvalidArgument("observation probabilities must lie in [0, 1]");
    g[t] = counter_uniform(seed, t) < p[t] ? 1.0 : 0.0;
  }
  return Modulator(std::move(g), "bernoulli", nlohmann::json::object(), seed);
}

std::vector<double> cosine_probabilities(double mean, double amplitude, double freq,
                                         std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t t = 0; t < n; ++t) p[t] = mean + amplitude * std::cos(freq * static_cast<double>(t));
  return p;
}

Modulator cosine_bernoulli_mask(double mean, double amplitude, double freq, std::size_t n,
                                std::uint64_t seed) {
  auto p = cosine_probabilities(mean, amplitude, freq, n);
  auto m = bernoulli_mask(p, seed);
  return Modulator(m.values(), "cosine-bernoulli",
                   {{"P", mean}, {"A_p", amplitude}, {"omega_p", freq}}, seed);
}

Modulator frequency_modulator(std::span<const double> beta) {
  if (beta.empty()) throw InvalidArgument("frequency path must not be empty");
  std::vector<cplx> g(beta.size());
  double phase = 0.0;
  g[0] = 1.0;
  for (std::size_t t = 1; t < beta.size(); ++t) {
    if (!std::isfinite(beta[t])) throw InvalidArgument("frequency path must be finite");
    phase = wrap_angle(phase + beta[t]);
    g[t] = std::polar(1.0, phase);
  }
  return Modulator(std::move(g), "frequency");
}

std::vector<double> linear_beta(double gamma, double span, std::size_t n) {
  if (n < 2) throw InvalidArgument("linear frequency path needs N >= 2");
  std::vector<double> beta(n);
  const double denom = 2.0 * static_cast<double>(n - 1);
  for (std::size_t t = 0; t < n; ++t)
    beta[t] = gamma + span * (2.0 * static_cast<double>(t) - static_cast<double>(n - 1)) / denom;
  return beta;
}

cplx cg_linear_closed_form(double gamma, double span, std::size_t n, std::size_t tau) {
  if (!(span < std::numbers::pi) || span < 0.0)
    throw DomainError("linear frequency span must lie in [0, pi)");
  if (n < 2) throw InvalidArgument("linear frequency path needs N >= 2");
  if (tau >= n) throw InvalidArgument("lag must be below N");
  if (tau == 0) return 1.0;
  const double t = static_cast<double>(tau);
  const double nn = static_cast<double>(n);
  const double a = span / (2.0 * (nn - 1.0));
  const double phase = gamma * t + a * t;
  double magnitude;
  const double x = a * t;
  if (x < 1e-8) {
    // sin(x (N - tau)) / (N sin x) -> (N - tau)/N as x -> 0
    const double m = nn - t;
    magnitude = m / nn * (1.0 - x * x * (m * m - 1.0) / 6.0);
  } else {
    magnitude = std::sin(x * (nn - t)) / (nn * std::sin(x));
  }
  return std::polar(1.0, phase) * magnitude;
}

CgSequence cg_linear_sequence(double gamma, double span, std::size_t n) {
  std::vector<cplx> c(n);
  for (std::size_t tau = 0; tau < n; ++tau) c[tau] = cg_linear_closed_form(gamma, span, n, tau);
  return CgSequence(std::move(c));
}

std::vector<LagDiagnostic> significant_correlation_diagnostic(
    const Modulator& mod, std::span<const std::size_t> lags, std::span<const std::size_t> lengths,
    double tol) {
  if (lengths.empty()) throw InvalidArgument("diagnostic needs at least one length");
  const std::size_t nmin = *std::min_element(lengths.begin(), lengths.end());
  for (auto lag : lags)
    if (lag >= nmin) throw InvalidArgument("every lag must be below the smallest length");
  std::vector<LagDiagnostic> out;
  for (auto lag : lags) out.push_back({lag, std::numeric_limits<double>::infinity(), false});
  for (auto n : lengths) {
    auto cg = cg_sequence(mod.prefix(n));
    for (auto& d : out) d.min_abs_cg = std::min(d.min_abs_cg, std::abs(cg[d.lag]));
  }
  for (auto& d : out) d.flagged = d.min_abs_cg < tol;
  return out;
}

StationarityWitness stationarity_check(const Modulator& mod, std::size_t mu, double tol) {
  const auto& g = mod.values();
  const double a = std::abs(g[0]);
  for (const auto& v : g)
    if (std::abs(std::abs(v) - a) > tol) return {false, 0.0, 0.0};
  if (a <= tol || mu == 0) return {true, a, 0.0};
  if (g.size() <= mu) return {true, a, 0.0};
  const double gamma = wrap_angle(std::arg(g[mu]) - std::arg(g[0]));
  for (std::size_t t = mu; t < g.size(); ++t) {
    const double resid = wrap_angle(std::arg(g[t]) - std::arg(g[t - mu]) - gamma);
    if (std::abs(resid) > tol) return {false, a, 0.0};
  }
  return {true, a, gamma};
}

nlohmann::json to_json(const Modulator& mod) {
  nlohmann::json j;
  if (mod.generator() == "custom") {
    auto& vals = j["values"] = nlohmann::json::array();
    for (const auto& v : mod.values())
      vals.push_back(v.imag() == 0.0 ? nlohmann::json(v.real()) : nlohmann::json{v.real(), v.imag()});
    return j;
  }
  j["generator"] = mod.generator();
  j["params"] = mod.params();
  j["N"] = mod.size();
  if (mod.seed()) j["seed"] = *mod.seed();
  return j;
}

Modulator modulator_from_json(const nlohmann::json& j) {
  if (j.contains("values")) {
    std::vector<cplx> g;
    for (const auto& v : j.at("values")) {
      if (v.is_array()) g.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
      else g.emplace_back(v.get<double>(), 0.0);
    }
    return Modulator(std::move(g));
  }
  const auto gen = j.at("generator").get<std::string>();
  const auto n = j.at("N").get<std::size_t>();
  const auto p = j.value("params", nlohmann::json::object());
  const auto seed = j.value("seed", std::uint64_t{0});
  if (gen == "constant") return constant_modulator(n, p.value("value", 1.0));
  if (gen == "periodic-missing")
    return periodic_missing_mask(p.at("k").get<std::size_t>(), p.at("l").get<std::size_t>(), n);
  if (gen == "bernoulli") {
    std::vector<double> prob(n, p.at("p").get<double>());
    return bernoulli_mask(prob, seed);
  }
  if (gen == "cosine-bernoulli")
    return cosine_bernoulli_mask(p.at("P").get<double>(), p.at("A_p").get<double>(),
                                 p.at("omega_p").get<double>(), n, seed);
  if (gen == "linear-frequency") {
    auto beta = linear_beta(p.at("gamma").get<double>(), p.at("Delta").get<double>(), n);
    auto m = frequency_modulator(beta);
    return Modulator(m.values(), gen, p);
  }
  if (gen == "frequency") {
    auto beta = p.at("beta").get<std::vector<double>>();
    if (beta.size() != n) throw InvalidArgument("frequency path length differs from N");
    return frequency_modulator(beta);
  }
  throw InvalidArgument("unknown modulator generator '" + gen + "'");
}

}  // namespace modwhittle
