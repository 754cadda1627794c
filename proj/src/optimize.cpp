#include "modwhittle/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "modwhittle/random.hpp"

namespace modwhittle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogitClamp = 36.0;

bool finite_end(double x) { return std::isfinite(x); }

double safe_eval(const Objective& f, const ParameterVector& theta) {
  try {
    const double v = f(theta);
    return std::isfinite(v) ? v : kInf;
  } catch (const Error&) {
    return kInf;
  }
}

struct StartResult {
  std::vector<double> u;
  double value = kInf;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  std::vector<double> history;
};

class NelderMead {
 public:
  NelderMead(const Objective& f, const ParameterVector& like, const FitOptions& opt)
      : f_(f), like_(like), opt_(opt) {}

  StartResult run(std::vector<double> u0) {
    StartResult out;
    const std::size_t d = u0.size();
    const std::size_t max_iter = opt_.max_iter ? opt_.max_iter : 2000 * std::max<std::size_t>(d, 1);
    if (d == 0) {
      out.u = u0;
      out.value = eval(u0, out);
      out.converged = std::isfinite(out.value);
      return out;
    }
    // One restart from the best vertex guards against a collapsed simplex.
    std::vector<double> start = std::move(u0);
    double previous = kInf;
    for (int pass = 0; pass < 2; ++pass) {
      auto pass_result = simplex(start, max_iter - std::min(max_iter, out.iterations), out);
      start = pass_result.first;
      const double value = pass_result.second;
      out.u = start;
      out.value = value;
      if (!out.converged) break;
      if (std::abs(previous - value) <= opt_.tol_f) break;
      previous = value;
    }
    return out;
  }

 private:
  double eval(const std::vector<double>& u, StartResult& out) {
    ++out.evaluations;
    return safe_eval(f_, inverse_transform(like_, u));
  }

  std::pair<std::vector<double>, double> simplex(const std::vector<double>& u0,
                                                 std::size_t budget, StartResult& out) {
    const std::size_t d = u0.size();
    std::vector<std::vector<double>> x(d + 1, u0);
    std::vector<double> fx(d + 1);
    for (std::size_t i = 0; i < d; ++i) x[i + 1][i] += opt_.initial_step;
    for (std::size_t i = 0; i <= d; ++i) fx[i] = eval(x[i], out);

    std::vector<std::size_t> order(d + 1);
    std::vector<double> centroid(d), xr(d), xe(d), xc(d);
    out.converged = false;
    for (std::size_t iter = 0; iter < budget; ++iter) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
      const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];
      if (!std::isfinite(fx[best])) break;
      if (opt_.record_history) out.history.push_back(fx[best]);

      double spread_x = 0.0;
      for (std::size_t i = 0; i <= d; ++i)
        for (std::size_t k = 0; k < d; ++k)
          spread_x = std::max(spread_x, std::abs(x[i][k] - x[best][k]));
      const double spread_f = fx[worst] - fx[best];
      if (std::isfinite(fx[best]) && spread_f <= opt_.tol_f && spread_x <= opt_.tol_x) {
        out.converged = true;
        break;
      }
      ++out.iterations;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i <= d; ++i) {
        if (i == worst) continue;
        for (std::size_t k = 0; k < d; ++k) centroid[k] += x[i][k] / static_cast<double>(d);
      }
      for (std::size_t k = 0; k < d; ++k) xr[k] = centroid[k] + (centroid[k] - x[worst][k]);
      const double fr = eval(xr, out);
      if (fr < fx[best]) {
        for (std::size_t k = 0; k < d; ++k) xe[k] = centroid[k] + 2.0 * (centroid[k] - x[worst][k]);
        const double fe = eval(xe, out);
        if (fe < fr) {
          x[worst] = xe;
          fx[worst] = fe;
        } else {
          x[worst] = xr;
          fx[worst] = fr;
        }
        continue;
      }
      if (fr < fx[second]) {
        x[worst] = xr;
        fx[worst] = fr;
        continue;
      }
      const bool outside = fr < fx[worst];
      for (std::size_t k = 0; k < d; ++k)
        xc[k] = outside ? centroid[k] + 0.5 * (xr[k] - centroid[k])
                        : centroid[k] + 0.5 * (x[worst][k] - centroid[k]);
      const double fc = eval(xc, out);
      if (fc < (outside ? fr : fx[worst])) {
        x[worst] = xc;
        fx[worst] = fc;
        continue;
      }
      for (std::size_t i = 0; i <= d; ++i) {
        if (i == best) continue;
        for (std::size_t k = 0; k < d; ++k) x[i][k] = x[best][k] + 0.5 * (x[i][k] - x[best][k]);
        fx[i] = eval(x[i], out);
      }
    }
    const auto it = std::min_element(fx.begin(), fx.end());
    return {x[static_cast<std::size_t>(it - fx.begin())], *it};
  }

  const Objective& f_;
  const ParameterVector& like_;
  const FitOptions& opt_;
};

}  // namespace

double transform(double x, const Bound& b) {
  if (b.periodic) return x;
  if (!b.contains(x) || ((finite_end(b.lower) && x <= b.lower) || (finite_end(b.upper) && x >= b.upper)))
    throw InvalidArgument("parameter value on or outside its bound cannot be transformed");
  const bool lo = finite_end(b.lower), hi = finite_end(b.upper);
  if (lo && hi) {
    const double p = (x - b.lower) / (b.upper - b.lower);
    return std::log(p) - std::log1p(-p);
  }
  if (lo) return std::log(x - b.lower);
  if (hi) return std::log(b.upper - x);
  return x;
}

double inverse_transform(double u, const Bound& b) {
  if (b.periodic) {
    const double width = b.upper - b.lower;
    double y = std::fmod(u - b.lower, width);
    if (y < 0.0) y += width;
    return b.lower + y;
  }
  const bool lo = finite_end(b.lower), hi = finite_end(b.upper);
  if (lo && hi) {
    const double v = std::clamp(u, -kLogitClamp, kLogitClamp);
    const double p = 1.0 / (1.0 + std::exp(-v));
    return b.lower + (b.upper - b.lower) * p;
  }
  if (lo) return b.lower + std::exp(std::clamp(u, -600.0, 600.0));
  if (hi) return b.upper - std::exp(std::clamp(u, -600.0, 600.0));
  return u;
}

std::vector<double> transform(const ParameterVector& theta) {
  std::vector<double> u;
  for (auto i : theta.free_indices()) u.push_back(transform(theta[i], theta.bounds()[i]));
  return u;
}

ParameterVector inverse_transform(const ParameterVector& like, std::span<const double> u) {
  const auto idx = like.free_indices();
  if (idx.size() != u.size()) throw InvalidArgument("transformed vector has the wrong length");
  std::vector<double> free(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) free[k] = inverse_transform(u[k], like.bounds()[idx[k]]);
  return like.with_free_values(free);
}

FitResult fit(const Objective& objective, const ParameterVector& init, const FitOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n_starts = std::max<std::size_t>(options.n_starts, 1);

  std::vector<std::vector<double>> starts;
  starts.push_back(transform(init));
  for (const auto& s : options.extra_starts) {
    if (starts.size() >= n_starts) break;
    try {
      starts.push_back(transform(s));
    } catch (const InvalidArgument&) {
      // out-of-bounds suggestions are skipped
    }
  }
  Rng rng(derive_seed(options.seed, 0x5157));
  while (starts.size() < n_starts) {
    auto u = starts.front();
    for (auto& v : u) v += options.perturbation * rng.normal();
    starts.push_back(std::move(u));
  }

  std::vector<StartResult> results(starts.size());
  auto worker = [&](std::size_t k) {
    NelderMead nm(objective, init, options);
    results[k] = nm.run(starts[k]);
  };
  const std::size_t threads = std::min(std::max<std::size_t>(options.threads, 1), starts.size());
  if (threads <= 1) {
    for (std::size_t k = 0; k < starts.size(); ++k) worker(k);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < starts.size(); k += threads) worker(k);
      });
    for (auto& t : pool) t.join();
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k)
    if (results[k].value < results[best].value) best = k;
  if (!std::isfinite(results[best].value))
    throw FitFailure("no start produced a finite objective value (" +
                     std::to_string(results.size()) + " starts)");

  FitResult r;
  r.theta_hat = inverse_transform(init, results[best].u);
  r.objective_value = results[best].value;
  r.converged = results[best].converged;
  r.history = std::move(results[best].history);
  for (const auto& s : results) {
    r.iterations += s.iterations;
    r.evaluations += s.evaluations;
  }
  r.starts = results.size();
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

FitOptions fit_options_from_json(const nlohmann::json& j) {
  FitOptions o;
  o.max_iter = j.value("max_iter", o.max_iter);
  o.tol_f = j.value("tol_f", o.tol_f);
  o.tol_x = j.value("tol_x", o.tol_x);
  o.n_starts = j.value("n_starts", o.n_starts);
  o.seed = j.value("seed", o.seed);
  return o;
}

nlohmann::json to_json(const FitResult& r) {
  nlohmann::json theta = nlohmann::json::object();
  for (std::size_t i = 0; i < r.theta_hat.size(); ++i) theta[r.theta_hat.names()[i]] = r.theta_hat[i];
  return {{"theta_hat", theta},
          {"objective", r.objective_value},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"wall_time", r.wall_time},
          {"starts", r.starts}};
}

}  // namespace modwhittle
