#include "modwhittle/study.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "modwhittle/fft.hpp"
#include "modwhittle/likelihood.hpp"
#include "modwhittle/random.hpp"
#include "modwhittle/simulate.hpp"
#include "modwhittle/spectra.hpp"

namespace modwhittle {

namespace {

struct Setup {
  std::string name;
  Objective objective;
  ParameterVector init;
  std::vector<ParameterVector> extra;
  std::map<std::string, double> truth;
};

struct FitRecord {
  bool ok = false;
  std::map<std::string, double> estimate;
  double wall = 0.0;
};

double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

std::vector<cplx> sample_acv(std::span<const cplx> y, std::size_t lags) {
  const double n = static_cast<double>(y.size());
  std::vector<cplx> c(lags, cplx{0.0, 0.0});
  for (std::size_t tau = 0; tau < lags && tau < y.size(); ++tau) {
    cplx s = 0.0;
    for (std::size_t t = 0; t + tau < y.size(); ++t) s += std::conj(y[t]) * y[t + tau];
    c[tau] = s / n;
  }
  return c;
}

ParameterVector car1_linear_params(double r, double sigma, double gamma, double span) {
  return ParameterVector({"r", "sigma", "gamma", "Delta"}, {r, sigma, gamma, span},
                         {Bound::open(0.0, 1.0), Bound::positive(), Bound::angle(),
                          Bound::open(0.0, std::numbers::pi)});
}

ParameterVector car1_stationary_params(double r, double sigma, double gamma) {
  return ParameterVector({"r", "sigma", "gamma"}, {r, sigma, gamma},
                         {Bound::open(0.0, 1.0), Bound::positive(), Bound::angle()});
}

std::map<std::string, double> free_truth(const ParameterVector& p) {
  std::map<std::string, double> t;
  for (auto i : p.free_indices()) t[p.names()[i]] = p[i];
  return t;
}

// Phase drift of the lag-1 autocovariance between the two halves of the
// series: for a linear beta the halves differ in mean rotation by Delta / 2.
double linear_span_moment(std::span<const cplx> y) {
  const std::size_t n = y.size();
  cplx a = 0.0, b = 0.0;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const cplx p = std::conj(y[t]) * y[t + 1];
    (t < n / 2 ? a : b) += p;
  }
  return 2.0 * wrap_angle(std::arg(b) - std::arg(a));
}

class Scenario {
 public:
  explicit Scenario(const McStudy& s) : study_(s), cfg_(s.config) {}

  std::vector<Setup> build(std::size_t n, std::uint64_t seed) const {
    if (study_.scenario == "modulated") return modulated(n, seed);
    if (study_.scenario == "car1-random-walk") return random_walk(n, seed);
    if (study_.scenario == "car1-linear") return linear(n, seed);
    throw InvalidArgument("unknown study scenario '" + study_.scenario + "'");
  }

 private:
  bool wants(const std::string& e) const {
    return std::find(study_.estimators.begin(), study_.estimators.end(), e) !=
           study_.estimators.end();
  }

  std::vector<Setup> modulated(std::size_t n, std::uint64_t seed) const {
    const auto model = model_from_json(cfg_.at("model"));
    auto mj = cfg_.value("modulator", nlohmann::json{{"generator", "constant"}});
    mj["N"] = n;
    mj["seed"] = derive_seed(seed, 1);
    const auto mod = modulator_from_json(mj);
    const auto data = simulate_modulated(model, mod, derive_seed(seed, 2));
    const auto pgram = periodogram(data);
    const auto cg = cg_sequence(mod);
    const auto truth = free_truth(model.params());

    // Starts: method of moments when the family allows it, then a neutral default.
    ParameterVector init = model.params();
    std::vector<ParameterVector> extra;
    const double power = [&] {
      double s = 0.0;
      for (const auto& v : data.values()) s += std::norm(v);
      return s / static_cast<double>(n) / std::max(cg[0].real(), 1e-12);
    }();
    auto neutral = model.params();
    for (auto i : neutral.free_indices()) {
      const auto& name = neutral.names()[i];
      if (name == "sigma") neutral.set(name, std::sqrt(power));
      else if (name.rfind("phi", 0) == 0 || name.rfind("theta", 0) == 0) neutral.set(name, 0.0);
    }
    if (model.family() == Family::ar && model.order() == 1) {
      const auto [a, s] = moment_ar1(data.values(), cg);
      init.set("phi1", a);
      init.set("sigma", s);
      extra.push_back(neutral);
    } else {
      init = neutral;
    }

    std::vector<Setup> out;
    if (wants("modulated"))
      out.push_back({"modulated", make_modulated_whittle_objective(pgram, cg, model), init, extra, truth});
    if (wants("stationary"))
      out.push_back({"stationary", make_modulated_whittle_objective(pgram, cg_stationary(n), model),
                     init, extra, truth});
    if (wants("whittle"))
      out.push_back({"whittle", make_whittle_objective(pgram, model), init, extra, truth});
    if (wants("exact"))
      out.push_back({"exact", make_exact_objective(data, mod, model), init, extra, truth});
    return out;
  }

  std::vector<Setup> random_walk(std::size_t n, std::uint64_t seed) const {
    const double r = cfg_.at("r"), sigma = cfg_.at("sigma");
    const double gamma = cfg_.at("gamma"), span = cfg_.at("Delta"), step = cfg_.at("A");
    const auto beta = bounded_random_walk_beta(gamma, span, step, n, derive_seed(seed, 1));
    const auto data = simulate_complex_ar1(r, sigma, beta, n, derive_seed(seed, 2));
    const auto mod = frequency_modulator(beta);
    const auto pgram = periodogram(data);
    const std::map<std::string, double> truth{{"r", r}, {"sigma", sigma}};

    std::vector<Setup> out;
    if (wants("modulated")) {
      const auto [r0, s0, rot] = moment_car1(data.values(), mod.values());
      (void)rot;
      auto model = LatentModel::complex_ar1(r0, s0, 0.0).with_fixed("freq");
      ParameterVector neutral = model.params();
      neutral.set("r", 0.5);
      out.push_back({"modulated", make_modulated_whittle_objective(pgram, cg_sequence(mod), model),
                     model.params(), {neutral}, truth});
    }
    if (wants("stationary")) {
      double mean_beta = 0.0;
      for (std::size_t t = 1; t < n; ++t) mean_beta += beta[t];
      mean_beta /= static_cast<double>(std::max<std::size_t>(n - 1, 1));
      const auto [r0, s0, rot] = moment_car1(data.values(), {});
      (void)rot;
      auto model = LatentModel::complex_ar1(r0, s0, wrap_angle(mean_beta)).with_fixed("freq");
      ParameterVector neutral = model.params();
      neutral.set("r", 0.5);
      out.push_back({"stationary",
                     make_modulated_whittle_objective(pgram, cg_stationary(n), model),
                     model.params(), {neutral}, truth});
    }
    return out;
  }

  std::vector<Setup> linear(std::size_t n, std::uint64_t seed) const {
    const double r = cfg_.at("r"), sigma = cfg_.at("sigma");
    const double gamma = cfg_.at("gamma"), span = cfg_.at("Delta");
    const auto beta = linear_beta(gamma, span, n);
    const auto data = simulate_complex_ar1(r, sigma, beta, n, derive_seed(seed, 2));
    const auto pgram = periodogram(data);
    const auto [r0, s0, rot0] = moment_car1(data.values(), {});
    const double span0 = clip(linear_span_moment(data.values()), 0.05, 3.0);
    // Demodulating by the moment path sharpens the (r, sigma) starts.
    const auto g0 = frequency_modulator(linear_beta(rot0, span0, n));
    const auto [r1, s1, rot1] = moment_car1(data.values(), g0.values());
    (void)rot1;
    const double r_init = clip(std::max(r0, r1), 0.05, 0.99);
    const double s_init = s1 > 0.0 ? s1 : s0;

    const std::map<std::string, double> full_truth{
        {"r", r}, {"sigma", sigma}, {"gamma", gamma}, {"Delta", span}};
    std::vector<Setup> out;
    const auto base = LatentModel::complex_ar1(0.5, 1.0, 0.0);
    if (wants("exact")) {
      auto obj = [data, base, n](const ParameterVector& th) {
        const auto mod = frequency_modulator(linear_beta(th[2], th[3], n));
        return exact_car1_nll(data, mod, base.with_values(std::vector<double>{th[0], th[1], 0.0}));
      };
      out.push_back({"exact", obj, car1_linear_params(r_init, s_init, rot0, span0),
                     {car1_linear_params(0.5, s_init, rot0, 1.0)}, full_truth});
    }
    if (wants("modulated")) {
      auto obj = [pgram, base, n](const ParameterVector& th) {
        const auto cg = cg_linear_sequence(th[2], th[3], n);
        return modulated_whittle_nll(pgram, cg, base.with_values(std::vector<double>{th[0], th[1], 0.0}));
      };
      out.push_back({"modulated", obj, car1_linear_params(r_init, s_init, rot0, span0),
                     {car1_linear_params(0.5, s_init, rot0, 1.0)}, full_truth});
    }
    if (wants("stationary")) {
      auto obj = [pgram, base, n](const ParameterVector& th) {
        return modulated_whittle_nll(pgram, cg_stationary(n),
                                     base.with_values(std::vector<double>{th[0], th[1], th[2]}));
      };
      const std::map<std::string, double> truth{{"r", r}, {"sigma", sigma}, {"gamma", gamma}};
      out.push_back({"stationary", obj, car1_stationary_params(clip(r0, 0.05, 0.99), s0, rot0),
                     {car1_stationary_params(0.5, s0, rot0)}, truth});
    }
    return out;
  }

  const McStudy& study_;
  const nlohmann::json& cfg_;
};

}  // namespace

std::pair<double, double> moment_ar1(std::span<const cplx> y, const CgSequence& cg) {
  const auto c = sample_acv(y, 2);
  const double c0 = cg[0].real() > 0.0 ? c[0].real() / cg[0].real() : 0.0;
  const double c1 = cg.size() > 1 && std::abs(cg[1]) > 1e-12 ? (c[1] / cg[1]).real() : 0.0;
  const double a = c0 > 0.0 ? clip(c1 / c0, -0.95, 0.95) : 0.0;
  const double s = std::sqrt(std::max(c0 * (1.0 - a * a), 1e-12));
  return {a, s};
}

std::tuple<double, double, double> moment_car1(std::span<const cplx> y,
                                               std::span<const cplx> g) {
  std::vector<cplx> x(y.begin(), y.end());
  if (!g.empty())
    for (std::size_t t = 0; t < x.size(); ++t) x[t] *= std::conj(g[t]);
  const auto c = sample_acv(x, 2);
  const double c0 = c[0].real();
  const cplx ratio = c0 > 0.0 ? c[1] / c0 : cplx{0.0, 0.0};
  const double r = clip(std::abs(ratio), 0.05, 0.95);
  const double s = std::sqrt(std::max(c0 * (1.0 - r * r), 1e-12));
  return {r, s, std::arg(ratio)};
}

McStudy study_from_json(const nlohmann::json& j) {
  McStudy s;
  s.name = j.value("name", s.name);
  s.scenario = j.value("scenario", s.scenario);
  s.config = j;
  if (j.at("N").is_array()) s.sizes = j.at("N").get<std::vector<std::size_t>>();
  else s.sizes = {j.at("N").get<std::size_t>()};
  s.replicates = j.value("replicates", std::size_t{1});
  s.seed = j.value("seed", std::uint64_t{0});
  if (s.scenario == "modulated") s.estimators = {"modulated", "stationary", "whittle"};
  else if (s.scenario == "car1-random-walk") s.estimators = {"modulated", "stationary"};
  else if (s.scenario == "car1-linear") s.estimators = {"modulated", "stationary", "exact"};
  else throw InvalidArgument("unknown study scenario '" + s.scenario + "'");
  s.estimators = j.value("estimators", s.estimators);
  if (j.contains("fit")) s.fit = fit_options_from_json(j.at("fit"));
  s.threads = j.value("threads", std::size_t{1});
  if (s.replicates == 0) throw InvalidArgument("a study needs at least one replicate");
  if (s.sizes.empty()) throw InvalidArgument("a study needs at least one sample size");
  return s;
}

McRow summarize(const std::vector<double>& values, double truth) {
  McRow row;
  row.truth = truth;
  if (values.empty()) return row;
  const double n = static_cast<double>(values.size());
  double mean_err = 0.0;
  for (double v : values) mean_err += v - truth;
  mean_err /= n;
  double var = 0.0;
  for (double v : values) {
    const double d = (v - truth) - mean_err;
    var += d * d;
  }
  var /= n;
  row.bias = mean_err;
  row.var = var;
  row.mse = var + mean_err * mean_err;
  return row;
}

const McRow& McReport::row(const std::string& estimator, std::size_t n,
                           const std::string& param) const {
  for (const auto& r : rows)
    if (r.estimator == estimator && r.n == n && r.param == param) return r;
  throw InvalidArgument("no report row for " + estimator + "/" + std::to_string(n) + "/" + param);
}

std::string McReport::to_csv(bool include_cpu) const {
  std::ostringstream os;
  os << "estimator,N,param,bias,var,mse" << (include_cpu ? ",cpu\n" : "\n");
  os.precision(10);
  os << std::scientific;
  for (const auto& r : rows) {
    os << r.estimator << ',' << r.n << ',' << r.param << ',' << r.bias << ',' << r.var << ','
       << r.mse;
    if (include_cpu) os << ',' << r.cpu;
    os << '\n';
  }
  return os.str();
}

McReport run_study(const McStudy& study) {
  const Scenario scenario(study);
  McReport report;
  report.name = study.name;
  for (std::size_t n : study.sizes) {
    const std::uint64_t size_seed = derive_seed(study.seed, n);
    std::vector<std::vector<std::pair<Setup, FitRecord>>> results(study.replicates);
    std::vector<std::string> errors(study.replicates);
    auto work = [&](std::size_t rep) {
      const std::uint64_t rep_seed = derive_seed(size_seed, rep);
      try {
        auto setups = scenario.build(n, rep_seed);
        for (std::size_t e = 0; e < setups.size(); ++e) {
          FitOptions opt = study.fit;
          opt.threads = 1;
          opt.seed = derive_seed(rep_seed, 100 + e);
          opt.extra_starts = setups[e].extra;
          FitRecord rec;
          try {
            const auto fr = fit(setups[e].objective, setups[e].init, opt);
            rec.ok = true;
            rec.wall = fr.wall_time;
            for (std::size_t i = 0; i < fr.theta_hat.size(); ++i)
              rec.estimate[fr.theta_hat.names()[i]] = fr.theta_hat[i];
          } catch (const FitFailure&) {
            rec.ok = false;
          }
          results[rep].emplace_back(std::move(setups[e]), std::move(rec));
        }
      } catch (const Error& ex) {
        errors[rep] = ex.what();
      }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(study.threads, study.replicates));
    if (threads == 1) {
      for (std::size_t rep = 0; rep < study.replicates; ++rep) work(rep);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t rep = w; rep < study.replicates; rep += threads) work(rep);
        });
      for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
      if (!e.empty()) throw SimulationError("replicate setup failed: " + e);

    // Reduction in replicate order keeps the report independent of scheduling.
    std::vector<std::string> names;
    for (const auto& [setup, rec] : results.front()) names.push_back(setup.name);
    for (std::size_t e = 0; e < names.size(); ++e) {
      std::size_t failures = 0;
      double wall = 0.0;
      std::map<std::string, std::vector<double>> values;
      const auto& truth = results.front()[e].first.truth;
      for (std::size_t rep = 0; rep < study.replicates; ++rep) {
        const auto& rec = results[rep][e].second;
        if (!rec.ok) {
          ++failures;
          continue;
        }
        wall += rec.wall;
        for (const auto& [param, t] : truth) values[param].push_back(rec.estimate.at(param));
      }
      if (static_cast<double>(failures) >= kMaxFailureRate * static_cast<double>(study.replicates) &&
          failures > 0)
        throw FitFailure(names[e] + " estimator failed on " + std::to_string(failures) + " of " +
                         std::to_string(study.replicates) + " replicates at N=" + std::to_string(n));
      const std::size_t ok = study.replicates - failures;
      for (const auto& [param, t] : truth) {
        McRow row = summarize(values[param], t);
        row.estimator = names[e];
        row.n = n;
        row.param = param;
        row.cpu = ok ? wall / static_cast<double>(ok) : 0.0;
        row.fits = ok;
        row.failures = failures;
        report.rows.push_back(row);
        report.estimates[names[e]][n][param] = std::move(values[param]);
      }
    }
  }
  return report;
}

}  // namespace modwhittle
