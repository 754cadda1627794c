#include "modwhittle/latent_models.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "modwhittle/fft.hpp"

namespace modwhittle {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::string> indexed_names(const std::string& stem, std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back(stem + std::to_string(i));
  return names;
}

bool ar_is_stationary(std::span<const double> phi) {
  const auto p = static_cast<Eigen::Index>(phi.size());
  if (p == 0) return true;
  if (p == 1) return std::abs(phi[0]) < 1.0;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) companion(0, j) = phi[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  return es.eigenvalues().cwiseAbs().maxCoeff() < 1.0;
}

// Matern spectral density B^2 / (nu^2 + h^2)^alpha at nu cycles/day.
double matern_sdf(double b, double h, double alpha, double nu) {
  return b * b * std::pow(nu * nu + h * h, -alpha);
}

// Aliased spectrum of the sampled Matern process at x = omega / (2 pi) in
// [-1/2, 1/2]: (1/delta) sum_k S((x + k) / delta). Terms |k| > K are replaced
// by a midpoint integral of the tail, expanded to second order in (h delta / u)^2,
// plus the first Euler-Maclaurin correction.
double matern_aliased(double b, double h, double alpha, double delta, double x) {
  double sum = 0.0;
  for (int k = -kMaternAliasTerms; k <= kMaternAliasTerms; ++k)
    sum += matern_sdf(b, h, alpha, (x + k) / delta);
  sum /= delta;
  const double c = b * b * std::pow(delta, 2.0 * alpha - 1.0);
  const double e2 = h * delta * h * delta;
  auto tail = [&](double u0) {
    const double p = std::pow(u0, 1.0 - 2.0 * alpha);
    const double u2 = u0 * u0;
    return c * p *
           (1.0 / (2.0 * alpha - 1.0) - (alpha / 12.0) / u2 - alpha * e2 / ((2.0 * alpha + 1.0) * u2) +
            alpha * (alpha + 1.0) / 2.0 * e2 * e2 / ((2.0 * alpha + 3.0) * u2 * u2));
  };
  sum += tail(x + kMaternAliasTerms + 0.5) + tail(kMaternAliasTerms + 0.5 - x);
  return sum;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::ar: return "ar";
    case Family::ma: return "ma";
    case Family::complex_ar1: return "complex_ar1";
    case Family::ou: return "ou";
    case Family::matern: return "matern";
  }
  return "unknown";
}

Family family_from_string(const std::string& s) {
  if (s == "ar") return Family::ar;
  if (s == "ma") return Family::ma;
  if (s == "complex_ar1") return Family::complex_ar1;
  if (s == "ou") return Family::ou;
  if (s == "matern") return Family::matern;
  throw InvalidArgument("unknown model family '" + s + "'");
}

LatentModel::LatentModel(Family f, ParameterVector p, double delta)
    : family_(f), params_(std::move(p)), delta_(delta) {
  if (!(delta_ > 0.0)) throw InvalidArgument("sampling interval must be positive");
}

LatentModel LatentModel::ar(std::vector<double> phi, double sigma) {
  if (phi.empty()) throw InvalidArgument("AR model needs at least one coefficient");
  auto names = indexed_names("phi", phi.size());
  std::vector<Bound> bounds(phi.size(), phi.size() == 1 ? Bound::open(-1.0, 1.0) : Bound::free());
  names.push_back("sigma");
  bounds.push_back(Bound::positive());
  phi.push_back(sigma);
  return LatentModel(Family::ar, ParameterVector(names, phi, bounds), 1.0);
}

LatentModel LatentModel::ma(std::vector<double> theta, double sigma) {
  auto names = indexed_names("theta", theta.size());
  std::vector<Bound> bounds(theta.size(), Bound::free());
  names.push_back("sigma");
  bounds.push_back(Bound::positive());
  theta.push_back(sigma);
  return LatentModel(Family::ma, ParameterVector(names, theta, bounds), 1.0);
}

LatentModel LatentModel::complex_ar1(double r, double sigma, double freq) {
  ParameterVector p({"r", "sigma", "freq"}, {r, sigma, freq},
                    {Bound::open(0.0, 1.0), Bound::positive(), Bound::angle()});
  return LatentModel(Family::complex_ar1, std::move(p), 1.0);
}

LatentModel LatentModel::ou(double amplitude, double damping, double inertial_cpd, double delta) {
  ParameterVector p({"A", "lambda", "omega_f"}, {amplitude, damping, inertial_cpd},
                    {Bound::positive(), Bound::positive(), Bound::free()});
  p.set_fixed("omega_f", true);
  return LatentModel(Family::ou, std::move(p), delta);
}

LatentModel LatentModel::matern(double amplitude, double scale, double slope, double delta) {
  ParameterVector p({"B", "h", "alpha"}, {amplitude, scale, slope},
                    {Bound::positive(), Bound::positive(), Bound::above(0.5)});
  return LatentModel(Family::matern, std::move(p), delta);
}

std::size_t LatentModel::order() const {
  if (family_ == Family::ar || family_ == Family::ma) return params_.size() - 1;
  return 1;
}

bool LatentModel::complex_valued() const {
  return family_ == Family::complex_ar1 || family_ == Family::ou || family_ == Family::matern;
}

LatentModel LatentModel::with_params(ParameterVector p) const {
  if (p.names() != params_.names()) throw InvalidArgument("parameter names do not match model");
  LatentModel m = *this;
  m.params_ = std::move(p);
  return m;
}

LatentModel LatentModel::with_values(std::span<const double> values) const {
  return with_params(params_.with_values(values));
}

LatentModel LatentModel::with_free_values(std::span<const double> values) const {
  return with_params(params_.with_free_values(values));
}

LatentModel LatentModel::with_fixed(const std::string& name, bool fixed) const {
  LatentModel m = *this;
  m.params_.set_fixed(name, fixed);
  return m;
}

LatentModel LatentModel::with_bound(const std::string& name, Bound b) const {
  LatentModel m = *this;
  m.params_.set_bound(name, b);
  return m;
}

bool LatentModel::is_valid() const noexcept {
  const auto& v = params_.values();
  for (double x : v)
    if (!std::isfinite(x)) return false;
  switch (family_) {
    case Family::ar: {
      const double sigma = v.back();
      return sigma >= 0.0 && ar_is_stationary(std::span(v.data(), v.size() - 1));
    }
    case Family::ma:
      return v.back() >= 0.0;
    case Family::complex_ar1:
      return v[0] >= 0.0 && v[0] < 1.0 && v[1] > 0.0;
    case Family::ou:
      return v[0] >= 0.0 && v[1] > 0.0;
    case Family::matern:
      return v[0] >= 0.0 && v[1] > 0.0 && v[2] > 0.5;
  }
  return false;
}

void LatentModel::validate() const {
  if (!is_valid())
    throw DomainError(to_string(family_) + " model parameters outside the stationary domain");
}

std::vector<cplx> LatentModel::ar_autocov(std::size_t n) const {
  const auto& v = params_.values();
  const std::size_t p = v.size() - 1;
  const double sigma2 = v.back() * v.back();
  // Yule-Walker: c(k) - sum_j phi_j c(|k-j|) = sigma^2 [k == 0], k = 0..p.
  const auto dim = static_cast<Eigen::Index>(p + 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(dim, dim);
  for (std::size_t k = 0; k <= p; ++k)
    for (std::size_t j = 1; j <= p; ++j) {
      const auto lag = static_cast<Eigen::Index>(k > j ? k - j : j - k);
      a(static_cast<Eigen::Index>(k), lag) -= v[j - 1];
    }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  rhs(0) = sigma2;
  Eigen::VectorXd head = a.partialPivLu().solve(rhs);

  std::vector<cplx> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k <= p) {
      c[k] = head(static_cast<Eigen::Index>(k));
    } else {
      double s = 0.0;
      for (std::size_t j = 1; j <= p; ++j) s += v[j - 1] * c[k - j].real();
      c[k] = s;
    }
  }
  return c;
}

std::vector<cplx> LatentModel::autocov_sequence(std::size_t n) const {
  validate();
  const auto& v = params_.values();
  std::vector<cplx> c(n, cplx{0.0, 0.0});
  switch (family_) {
    case Family::ar:
      return ar_autocov(n);
    case Family::ma: {
      std::vector<double> theta(v.begin(), v.end() - 1);
      theta.insert(theta.begin(), 1.0);
      const double sigma2 = v.back() * v.back();
      for (std::size_t tau = 0; tau < n && tau < theta.size(); ++tau) {
        double s = 0.0;
        for (std::size_t j = 0; j + tau < theta.size(); ++j) s += theta[j] * theta[j + tau];
        c[tau] = sigma2 * s;
      }
      return c;
    }
    case Family::complex_ar1:
    case Family::ou: {
      double r = 0.0, sigma = 0.0, rot = 0.0;
      if (family_ == Family::complex_ar1) {
        r = v[0];
        sigma = v[1];
        rot = v[2];
      } else {
        auto ar = ou_to_ar(v[0], v[1], delta_);
        r = ar.r;
        sigma = ar.sigma;
        rot = kTwoPi * v[2] * delta_;
      }
      const double var = sigma * sigma / (1.0 - r * r);
      const cplx step = std::polar(r, rot);
      // Geometric recursion, re-anchored every 64 lags to bound round-off.
      for (std::size_t tau = 0; tau < n; ++tau) {
        if (tau % 64 == 0) {
          const double t = static_cast<double>(tau);
          c[tau] = tau == 0 ? cplx{var, 0.0} : std::polar(var * std::pow(r, t), rot * t);
        } else {
          c[tau] = c[tau - 1] * step;
        }
      }
      return c;
    }
    case Family::matern: {
      if (n == 0) return c;
      const double b = v[0], h = v[1], alpha = v[2];
      const std::size_t m = kMaternOversampling * std::max<std::size_t>(n, 64);
      std::vector<cplx> spec(m);
      for (std::size_t j = 0; j <= m / 2; ++j) {
        const double x = static_cast<double>(j) / static_cast<double>(m);
        const double f = matern_aliased(b, h, alpha, delta_, x);
        spec[j] = f;
        if (j > 0 && j < m - j) spec[m - j] = f;
      }
      auto acf = fft::backward(spec);
      const double scale = 1.0 / static_cast<double>(m);
      for (std::size_t tau = 0; tau < n; ++tau) c[tau] = cplx{acf[tau].real() * scale, 0.0};
      return c;
    }
  }
  return c;
}

cplx LatentModel::autocov(long tau) const {
  const auto lag = static_cast<std::size_t>(tau < 0 ? -tau : tau);
  auto seq = autocov_sequence(lag + 1);
  return tau < 0 ? std::conj(seq[lag]) : seq[lag];
}

double LatentModel::sampled_sdf(double omega) const {
  validate();
  const auto& v = params_.values();
  switch (family_) {
    case Family::ar: {
      cplx denom = 1.0;
      for (std::size_t j = 0; j + 1 < v.size(); ++j)
        denom -= v[j] * std::polar(1.0, -omega * static_cast<double>(j + 1));
      return v.back() * v.back() / std::norm(denom);
    }
    case Family::ma: {
      cplx num = 1.0;
      for (std::size_t j = 0; j + 1 < v.size(); ++j)
        num += v[j] * std::polar(1.0, -omega * static_cast<double>(j + 1));
      return v.back() * v.back() * std::norm(num);
    }
    case Family::complex_ar1:
    case Family::ou: {
      double r = 0.0, sigma = 0.0, rot = 0.0;
      if (family_ == Family::complex_ar1) {
        r = v[0];
        sigma = v[1];
        rot = v[2];
      } else {
        auto ar = ou_to_ar(v[0], v[1], delta_);
        r = ar.r;
        sigma = ar.sigma;
        rot = kTwoPi * v[2] * delta_;
      }
      return sigma * sigma / std::norm(1.0 - std::polar(r, rot - omega));
    }
    case Family::matern: {
      const double x = wrap_angle(omega) / kTwoPi;
      return matern_aliased(v[0], v[1], v[2], delta_, x);
    }
  }
  return 0.0;
}

double LatentModel::sdf(double omega) const {
  const auto& v = params_.values();
  switch (family_) {
    case Family::ou: {
      validate();
      const double d = kTwoPi * (omega - v[2]);
      return v[0] * v[0] / (d * d + v[1] * v[1]);
    }
    case Family::matern:
      if (!(v[2] > 0.5)) throw DomainError("Matern slope alpha must exceed 1/2");
      validate();
      return matern_sdf(v[0], v[1], v[2], omega);
    default:
      return sampled_sdf(omega);
  }
}

ArParams ou_to_ar(double amplitude, double damping, double delta) {
  if (!(amplitude >= 0.0) || !(damping > 0.0) || !(delta > 0.0))
    throw DomainError("OU damping and sampling interval must be positive");
  const double x = damping * delta;
  const double r = std::exp(-x);
  const double sigma2 = amplitude * amplitude * (-std::expm1(-x)) / (2.0 * x);
  return {r, std::sqrt(sigma2)};
}

OuParams ar_to_ou(double r, double sigma, double delta) {
  if (!(r > 0.0 && r < 1.0) || !(sigma > 0.0) || !(delta > 0.0))
    throw DomainError("AR(1) parameters outside (0,1) x (0,inf)");
  const double x = -std::log(r);
  const double damping = x / delta;
  const double amp2 = 2.0 * x * sigma * sigma / (-std::expm1(-x));
  return {std::sqrt(amp2), damping};
}

nlohmann::json to_json(const LatentModel& m) {
  nlohmann::json j;
  j["family"] = to_string(m.family());
  j["delta"] = m.delta();
  const auto& p = m.params();
  for (std::size_t i = 0; i < p.size(); ++i) {
    j["params"][p.names()[i]] = p[i];
    const auto& b = p.bounds()[i];
    nlohmann::json jb = nlohmann::json::array();
    jb.push_back(std::isfinite(b.lower) ? nlohmann::json(b.lower) : nlohmann::json(nullptr));
    jb.push_back(std::isfinite(b.upper) ? nlohmann::json(b.upper) : nlohmann::json(nullptr));
    j["bounds"][p.names()[i]] = jb;
    if (p.fixed()[i]) j["fixed"].push_back(p.names()[i]);
  }
  return j;
}

LatentModel model_from_json(const nlohmann::json& j) {
  const Family fam = family_from_string(j.at("family").get<std::string>());
  const auto& p = j.at("params");
  const double delta = j.value("delta", fam == Family::ou || fam == Family::matern ? kDefaultDelta : 1.0);
  auto collect = [&](const std::string& stem) {
    std::vector<double> out;
    for (std::size_t i = 1; p.contains(stem + std::to_string(i)); ++i)
      out.push_back(p.at(stem + std::to_string(i)).get<double>());
    return out;
  };
  LatentModel m = [&] {
    switch (fam) {
      case Family::ar: return LatentModel::ar(collect("phi"), p.at("sigma").get<double>());
      case Family::ma: return LatentModel::ma(collect("theta"), p.at("sigma").get<double>());
      case Family::complex_ar1:
        return LatentModel::complex_ar1(p.at("r").get<double>(), p.at("sigma").get<double>(),
                                        p.value("freq", 0.0));
      case Family::ou:
        return LatentModel::ou(p.at("A").get<double>(), p.at("lambda").get<double>(),
                               p.value("omega_f", 0.0), delta);
      case Family::matern:
        return LatentModel::matern(p.at("B").get<double>(), p.at("h").get<double>(),
                                   p.at("alpha").get<double>(), delta);
    }
    throw InvalidArgument("unhandled family");
  }();
  if (j.contains("bounds")) {
    for (const auto& [name, b] : j.at("bounds").items()) {
      Bound bound = m.params().bounds()[m.params().position(name)];
      if (!b.at(0).is_null()) bound.lower = b.at(0).get<double>();
      if (!b.at(1).is_null()) bound.upper = b.at(1).get<double>();
      m = m.with_bound(name, bound);
    }
  }
  if (j.contains("fixed")) {
    // Listing "fixed" replaces the default set.
    for (const auto& name : m.params().names()) m = m.with_fixed(name, false);
    for (const auto& name : j.at("fixed")) m = m.with_fixed(name.get<std::string>(), true);
  }
  return m;
}

}  // namespace modwhittle
