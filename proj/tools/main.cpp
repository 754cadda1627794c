// modwhittle command-line tool.
//
//   modwhittle <verb> --config FILE [-o PREFIX] [--seed S] [--threads T] [--verbose]
//
// Every verb computes all of its results before writing anything, then writes
// PREFIX-based files atomically together with PREFIX_manifest.json.
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "modwhittle/drifter.hpp"
#include "modwhittle/io.hpp"
#include "modwhittle/likelihood.hpp"
#include "modwhittle/random.hpp"
#include "modwhittle/simulate.hpp"
#include "modwhittle/spectra.hpp"
#include "modwhittle/study.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace modwhittle;

namespace {

constexpr int kSchemaVersion = 1;

struct Run {
  std::string verb;
  fs::path config_path;
  std::string config_text;
  json config;
  std::string prefix;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool verbose = false;
  /// (file suffix, content) pairs written at the end.
  std::vector<std::pair<std::string, std::string>> outputs;
  json summary = json::object();

  void emit(const std::string& suffix, std::string content) { outputs.emplace_back(suffix, std::move(content)); }
  void log(const std::string& msg) const {
    if (verbose) std::cerr << "[" << verb << "] " << msg << "\n";
  }
  /// Paths in the config are relative to the config file.
  std::string resolve(const std::string& p) const {
    const fs::path q(p);
    return q.is_absolute() ? p : (config_path.parent_path() / q).string();
  }
};

std::size_t default_threads() {
  if (const char* env = std::getenv("MODWHITTLE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw InvalidArgument("MODWHITTLE_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

json params_json(const ParameterVector& p) {
  json j = json::object();
  for (std::size_t i = 0; i < p.size(); ++i) j[p.names()[i]] = p[i];
  return j;
}

json drifter_params_json(const drifter::DrifterParams& p) {
  return {{"A", p.A}, {"lambda", p.lambda}, {"B", p.B}, {"h", p.h}, {"alpha", p.alpha}};
}

// Modulator JSON inherits N and, for random generators, a seed derived from the run seed.
Modulator build_modulator(json mj, std::size_t n, std::uint64_t seed) {
  if (!mj.contains("values")) {
    if (!mj.contains("N")) mj["N"] = n;
    if (!mj.contains("seed")) mj["seed"] = derive_seed(seed, 1);
  }
  auto mod = modulator_from_json(mj);
  if (mod.size() != n) throw InvalidArgument("modulator length differs from N");
  return mod;
}

std::vector<double> build_beta(const json& bj, std::size_t n, std::uint64_t seed) {
  const auto gen = bj.value("generator", std::string("linear"));
  const double gamma = bj.at("gamma").get<double>(), span = bj.at("Delta").get<double>();
  if (gen == "linear") return linear_beta(gamma, span, n);
  if (gen == "random-walk")
    return bounded_random_walk_beta(gamma, span, bj.at("A").get<double>(), n, derive_seed(seed, 1));
  throw InvalidArgument("unknown beta generator '" + gen + "'");
}

drifter::FitSettings drifter_settings(const Run& run) {
  drifter::FitSettings s;
  const auto& c = run.config;
  if (c.contains("band")) {
    s.lo_cpd = c["band"].value("lo_cpd", s.lo_cpd);
    s.hi_cpd = c["band"].value("hi_cpd", s.hi_cpd);
  }
  s.no_background = c.value("no_background", false);
  if (c.contains("fit")) s.fit = fit_options_from_json(c["fit"]);
  s.fit.seed = run.seed;
  s.fit.threads = run.threads;
  return s;
}

drifter::Trajectory load_trajectory(const Run& run, const std::string& path) {
  const auto full = run.resolve(path);
  return drifter::trajectory_from_csv(io::read_file(full), fs::path(path).stem().string());
}

void cmd_simulate(Run& run) {
  const auto& c = run.config;
  if (c.contains("drifter")) {
    auto cfg = drifter::synthetic_from_json(c["drifter"]);
    cfg.seed = run.seed;
    const auto traj = drifter::synthetic_trajectory(cfg);
    run.emit(".csv", drifter::trajectory_csv(traj));
    run.summary["rows"] = traj.size();
    return;
  }
  const auto n = c.at("N").get<std::size_t>();
  const double delta = c.value("delta", 1.0);
  Series out = Series::real(std::vector<double>(1, 0.0));
  const auto process = c.value("process", std::string("latent"));
  if (process == "tvcar1") {
    const auto beta = c.contains("beta") ? build_beta(c["beta"], n, run.seed) : std::vector<double>{};
    out = simulate_complex_ar1(c.at("r").get<double>(), c.at("sigma").get<double>(), beta, n,
                               derive_seed(run.seed, 0));
  } else if (process == "latent") {
    const auto model = model_from_json(c.at("model"));
    out = c.contains("modulator")
              ? simulate_modulated(model, build_modulator(c["modulator"], n, run.seed), derive_seed(run.seed, 0))
              : simulate_latent(model, n, derive_seed(run.seed, 0));
  } else {
    throw InvalidArgument("unknown process '" + process + "'");
  }
  run.emit(".csv", io::series_csv(Series(out.values(), delta, out.kind())));
  run.summary["rows"] = n;
}

void cmd_fit(Run& run) {
  const auto& c = run.config;
  const auto estimator = c.at("estimator").get<std::string>();
  json result;
  if (estimator == "drifter") {
    const auto traj = load_trajectory(run, c.at("trajectory").get<std::string>());
    const auto mode = drifter::mode_from_string(c.value("mode", std::string("modulated")));
    const auto fit = drifter::fit_drifter(traj, mode, drifter_settings(run));
    result = {{"estimator", "drifter"},
              {"mode", drifter::to_string(mode)},
              {"estimates", drifter_params_json(fit.params)},
              {"inv_lambda", 1.0 / fit.params.lambda},
              {"mean_inertial_cpd", fit.mean_omega_f},
              {"fit", to_json(fit.result)}};
  } else {
    const double delta = c.value("delta", 1.0);
    const auto data = io::series_from_csv(io::read_file(run.resolve(c.at("data").get<std::string>())), delta);
    const auto n = data.size();
    const auto model = model_from_json(c.at("model"));
    auto opts = c.contains("fit") ? fit_options_from_json(c["fit"]) : FitOptions{};
    opts.seed = run.seed;
    opts.threads = run.threads;
    FrequencyMask mask;
    if (c.contains("band")) mask = FrequencyMask::band(n, c["band"].at("lo").get<double>(), c["band"].at("hi").get<double>());
    Objective obj;
    if (estimator == "whittle") {
      obj = make_whittle_objective(periodogram(data), model, mask);
    } else if (estimator == "stationary") {
      obj = make_modulated_whittle_objective(periodogram(data), cg_stationary(n), model, mask);
    } else if (estimator == "modulated") {
      const auto mod = c.contains("modulator") ? build_modulator(c["modulator"], n, run.seed) : constant_modulator(n);
      obj = make_modulated_whittle_objective(periodogram(data), cg_sequence(mod), model, mask);
    } else if (estimator == "exact") {
      const auto mod = c.contains("modulator") ? build_modulator(c["modulator"], n, run.seed) : constant_modulator(n);
      obj = model.family() == Family::complex_ar1 || model.family() == Family::ou
                ? make_car1_objective(data, mod, model)
                : make_exact_objective(data, mod, model);
    } else {
      throw InvalidArgument("unknown estimator '" + estimator + "'");
    }
    const auto fit = modwhittle::fit(obj, model.params(), opts);
    result = {{"estimator", estimator},
              {"family", to_string(model.family())},
              {"estimates", params_json(fit.theta_hat)},
              {"fit", to_json(fit)}};
  }
  run.summary["objective"] = result["fit"]["objective"];
  run.emit(".json", result.dump(2) + "\n");
}

void cmd_mc(Run& run) {
  auto study = study_from_json(run.config);
  study.seed = run.seed;
  study.threads = run.threads;
  run.log("running " + std::to_string(study.replicates) + " replicates");
  const auto report = run_study(study);
  run.emit(".csv", report.to_csv(false));
  run.emit("_cpu.csv", report.to_csv(true));
  run.summary["rows"] = report.rows.size();
}

void cmd_drifter_fit(Run& run) {
  const auto traj = load_trajectory(run, run.config.at("trajectory").get<std::string>());
  const auto settings = drifter_settings(run);
  const auto st = drifter::fit_drifter(traj, drifter::Mode::stationary, settings);
  const auto mo = drifter::fit_drifter(traj, drifter::Mode::modulated, settings);
  const json out = {
      {"id", traj.id},
      {"N", st.periodogram.size()},
      {"mean_inertial_cpd", mo.mean_omega_f},
      {"stationary", {{"estimates", drifter_params_json(st.params)}, {"inv_lambda", 1.0 / st.params.lambda},
                      {"fit", to_json(st.result)}}},
      {"modulated", {{"estimates", drifter_params_json(mo.params)}, {"inv_lambda", 1.0 / mo.params.lambda},
                     {"fit", to_json(mo.result)}}},
      {"difference", st.result.objective_value - mo.result.objective_value}};
  run.emit(".json", out.dump(2) + "\n");
  run.emit("_spectrum.csv", drifter::overlay_csv(st, mo, traj.delta()));
  run.summary["difference"] = out["difference"];
}

void cmd_drifter_batch(Run& run) {
  const auto& c = run.config;
  std::vector<drifter::Trajectory> trajs;
  if (c.contains("trajectories"))
    for (const auto& p : c["trajectories"]) trajs.push_back(load_trajectory(run, p.get<std::string>()));
  if (c.contains("synthetic")) {
    const auto& s = c["synthetic"];
    const auto base = drifter::synthetic_from_json(s);
    const auto more = drifter::synthetic_batch(base, s.at("count").get<std::size_t>(), derive_seed(run.seed, 2),
                                               s.value("sweep_deg", 20.0), s.value("lat_min", 10.0),
                                               s.value("lat_max", 20.0));
    trajs.insert(trajs.end(), more.begin(), more.end());
  }
  if (trajs.empty()) throw InvalidArgument("drifter-batch needs 'trajectories' or 'synthetic'");
  const auto rows = drifter::batch_compare(trajs, drifter_settings(run), run.threads);
  std::size_t ok = 0, favour = 0;
  for (const auto& r : rows) {
    ok += r.ok;
    favour += r.ok && r.difference > 0.0;
  }
  run.emit(".csv", drifter::batch_csv(rows));
  run.summary["trajectories"] = rows.size();
  run.summary["fitted"] = ok;
  run.summary["favour_modulated"] = favour;
}

void cmd_diagnose(Run& run) {
  const auto& c = run.config;
  std::optional<Series> data;
  if (c.contains("data"))
    data = io::series_from_csv(io::read_file(run.resolve(c["data"].get<std::string>())), c.value("delta", 1.0));
  const std::size_t n = data ? data->size() : c.at("N").get<std::size_t>();
  const auto mod = c.contains("modulator") ? build_modulator(c["modulator"], n, run.seed) : constant_modulator(n);

  json out = {{"N", n}, {"gmax", mod.gmax()}};
  const auto w = stationarity_check(mod, c.value("mu", std::size_t{1}));
  out["stationarity"] = {{"stationary", w.stationary}, {"modulus", w.modulus}, {"gamma", w.gamma}};
  std::vector<std::size_t> lags = c.value("lags", std::vector<std::size_t>{0, 1});
  std::vector<std::size_t> lengths = c.value("lengths", std::vector<std::size_t>{n});
  json diag = json::array();
  for (const auto& d : significant_correlation_diagnostic(mod, lags, lengths, c.value("tol", 1e-3)))
    diag.push_back({{"lag", d.lag}, {"min_abs_cg", d.min_abs_cg}, {"flagged", d.flagged}});
  out["significant_correlation"] = diag;

  if (c.contains("model")) {
    const auto model = model_from_json(c["model"]);
    const auto sbar = expected_periodogram(cg_sequence(mod), model);
    std::vector<std::string> names{"expected"};
    std::vector<std::vector<double>> cols{sbar.values};
    if (data) {
      const auto pg = periodogram(*data);
      names.push_back("periodogram");
      cols.push_back(pg.values);
      const auto qq = exponential_qq(pg, sbar);
      out["qq_slope"] = qq_slope(qq);
      io::CsvTable table{{"theoretical", "empirical"}, {}};
      for (const auto& p : qq) table.rows.push_back({p.theoretical, p.empirical});
      run.emit("_qq.csv", io::format_csv(table));
    }
    run.emit("_spectrum.csv", spectrum_csv(n, names, cols));
  }
  run.emit(".json", out.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modulated Whittle estimation for nonstationary time series", "modwhittle"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MODWHITTLE_VERSION);

  Run run;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string output;

  const std::vector<std::pair<std::string, std::string>> verbs{
      {"simulate", "simulate a latent, modulated or drifter series to CSV"},
      {"fit", "fit one estimator to a series or trajectory"},
      {"mc", "run a Monte Carlo study"},
      {"drifter-fit", "fit stationary and modulated drifter models to one trajectory"},
      {"drifter-batch", "compare both drifter models over many trajectories"},
      {"diagnose", "modulation diagnostics and expected spectra"}};
  for (const auto& [name, help] : verbs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output, "output path prefix (default: config name)");
    sub->add_option("-s,--seed", seed, "random seed (overrides the config)");
    sub->add_option("-t,--threads", threads, "worker threads (default: MODWHITTLE_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("-v,--verbose", run.verbose, "progress on stderr");
    sub->final_callback([&run, name = name] { run.verb = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    run.config_path = config;
    run.config_text = io::read_file(config);
    run.config = json::parse(run.config_text);
    if (!run.config.is_object()) throw InvalidArgument("configuration must be a JSON object");
    run.seed = seed ? *seed : run.config.value("seed", std::uint64_t{0});
    run.threads = threads ? *threads : default_threads();
    run.prefix = output.empty() ? run.config_path.stem().string() : output;
  } catch (const json::exception& e) {
    std::cerr << "modwhittle: invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "modwhittle: " << e.what() << "\n";
    return 1;
  }

  try {
    if (run.verb == "simulate") cmd_simulate(run);
    else if (run.verb == "fit") cmd_fit(run);
    else if (run.verb == "mc") cmd_mc(run);
    else if (run.verb == "drifter-fit") cmd_drifter_fit(run);
    else if (run.verb == "drifter-batch") cmd_drifter_batch(run);
    else cmd_diagnose(run);

    json manifest = {{"schema_version", kSchemaVersion},
                     {"tool", "modwhittle"},
                     {"version", MODWHITTLE_VERSION},
                     {"verb", run.verb},
                     {"config", fs::absolute(run.config_path).string()},
                     {"config_hash", io::fnv1a_hex(run.config_text)},
                     {"seed", run.seed},
                     {"threads", run.threads},
                     {"outputs", json::array()},
                     {"summary", run.summary}};
    for (const auto& [suffix, content] : run.outputs) manifest["outputs"].push_back(run.prefix + suffix);
    for (const auto& [suffix, content] : run.outputs) io::write_file_atomic(run.prefix + suffix, content);
    io::write_file_atomic(run.prefix + "_manifest.json", manifest.dump(2) + "\n");
    run.log("wrote " + std::to_string(run.outputs.size() + 1) + " files with prefix " + run.prefix);
    return 0;
  } catch (const json::exception& e) {
    std::cerr << "modwhittle: invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const InvalidArgument& e) {
    std::cerr << "modwhittle: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "modwhittle: numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "modwhittle: " << e.what() << "\n";
    return 1;
  }
}
