#include "copspec/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>

#include "copspec/bootstrap.hpp"
#include "copspec/error.hpp"
#include "copspec/fit.hpp"
#include "copspec/io.hpp"
#include "copspec/models.hpp"
#include "copspec/plot.hpp"
#include "copspec/reference.hpp"

namespace copspec {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Keys accepted in config files; each doubles as the long flag name.
const std::vector<std::string> kKeys = {
    "input", "log-returns", "model", "n", "burn-in", "class", "p", "q", "taus", "ntaus",
    "fourier-n", "bandwidth", "R", "alpha", "beta", "seed", "threads", "out", "reps",
    "max-lag", "sim-length", "estimate", "ensemble", "detail", "shared-range"};

// Flag values override config values, which override defaults.
class Settings {
 public:
  Settings(const CLI::App& app, std::map<std::string, std::string> flags) : app_(app), flags_(std::move(flags)) {}

  void load_config(const std::string& path) {
    for (auto& [k, v] : copspec::load_config(path)) {
      if (std::find(kKeys.begin(), kKeys.end(), k) == kKeys.end()) {
        throw UsageError("unknown config key '" + k + "'");
      }
      config_[k] = v;
    }
  }

  std::optional<std::string> raw(const std::string& key) const {
    if (const auto it = flags_.find(key); it != flags_.end() && app_.count("--" + key) > 0) return it->second;
    if (const auto it = config_.find(key); it != config_.end()) return it->second;
    return std::nullopt;
  }
  std::string str(const std::string& key, const std::string& def) const { return raw(key).value_or(def); }
  std::string required(const std::string& key) const {
    if (auto v = raw(key)) return *v;
    throw UsageError("missing required setting --" + key);
  }
  double real(const std::string& key, double def) const {
    const auto v = raw(key);
    return v ? to_double(key, *v) : def;
  }
  std::uint64_t u64(const std::string& key, std::uint64_t def) const {
    const auto v = raw(key);
    if (!v) return def;
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || p != v->data() + v->size()) throw UsageError("--" + key + ": expected a non-negative integer");
    return out;
  }
  bool flag(const std::string& key) const {
    const auto v = raw(key);
    if (!v) return false;
    if (*v == "true" || *v == "1" || *v == "yes" || v->empty()) return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw UsageError("--" + key + ": expected a boolean");
  }

  static double to_double(const std::string& key, std::string_view s) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || p != s.data() + s.size()) throw UsageError("--" + key + ": expected a number");
    return out;
  }

 private:
  const CLI::App& app_;
  std::map<std::string, std::string> flags_;
  std::map<std::string, std::string> config_;
};

struct Command {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> switches;
  std::string config;
};

void add_value(Command& cmd, const std::string& key, const std::string& help) {
  cmd.app->add_option("--" + key, cmd.values[key], help);
}

void add_switch(Command& cmd, const std::string& key, const std::string& help) {
  cmd.app->add_flag("--" + key, cmd.switches[key], help);
}

Settings make_settings(Command& cmd) {
  auto flags = cmd.values;
  for (const auto& [k, on] : cmd.switches) flags[k] = on ? "true" : "false";
  Settings s(*cmd.app, std::move(flags));
  if (!cmd.config.empty()) s.load_config(cmd.config);
  return s;
}

QuantileGrid tau_grid(const Settings& s, const QuantileGrid& def) {
  if (const auto list = s.raw("taus")) {
    std::vector<double> levels;
    std::stringstream ss(*list);
    for (std::string item; std::getline(ss, item, ',');) {
      const auto b = item.find_first_not_of(' '), e = item.find_last_not_of(' ');
      if (b == std::string::npos) continue;
      levels.push_back(Settings::to_double("taus", item.substr(b, e - b + 1)));
    }
    return QuantileGrid(std::move(levels));
  }
  if (s.raw("ntaus")) return QuantileGrid::equally_spaced(s.u64("ntaus", 19));
  return def;
}

EstimatorConfig estimator_config(const Settings& s, const QuantileGrid& def_taus) {
  return EstimatorConfig{tau_grid(s, def_taus), FrequencyGrid::fourier_subgrid(s.u64("fourier-n", 64)),
                         KernelSpec(s.real("bandwidth", 0.1))};
}

ModelClass model_class(const Settings& s) {
  return parse_model_class(s.required("class"), static_cast<int>(s.u64("p", 0)),
                           static_cast<int>(s.u64("q", 0)));
}

TimeSeries input_series(const Settings& s) { return ingest_csv(s.required("input"), s.flag("log-returns")); }

fs::path out_dir(const Settings& s) { return s.str("out", "out"); }

void write_plot(const fs::path& dir, const std::string& stem, const PlotDocument& doc) {
  write_file_atomic(dir / (stem + ".svg"), doc.svg);
  write_file_atomic(dir / (stem + ".csv"), doc.csv);
}

std::string mc_to_csv(const McSpectrum& mc) {
  const auto taus = mc.estimate.tau_grid().levels();
  const auto omegas = mc.estimate.freq_grid().omegas();
  std::string out = "tau1,tau2,omega,re,im,se_re,se_im\n";
  for (std::size_t i = 0; i < taus.size(); ++i)
    for (std::size_t j = 0; j < taus.size(); ++j)
      for (std::size_t k = 0; k < omegas.size(); ++k) {
        const auto v = mc.estimate.at(i, j, k);
        const auto se = mc.standard_error.at(i, j, k);
        out += format_double(taus[i]) + ',' + format_double(taus[j]) + ',' + format_double(omegas[k]) + ',' +
               format_double(v.real()) + ',' + format_double(v.imag()) + ',' + format_double(se.real()) + ',' +
               format_double(se.imag()) + '\n';
      }
  return out;
}

void report_written(std::ostream& out, const fs::path& p) { out << "wrote " << p.string() << '\n'; }

int run_simulate(const Settings& s, std::ostream& out) {
  const auto spec = parse_model_spec(s.required("model"));
  const auto series = simulate(spec, SimConfig{s.u64("n", 1024), s.u64("burn-in", 1000), s.u64("seed", 1), 0});
  const auto path = out_dir(s) / "series.csv";
  write_file_atomic(path, series_to_csv(series));
  report_written(out, path);
  return kExitOk;
}

int run_fit(const Settings& s, std::ostream& out) {
  const auto fit = fit_model(input_series(s), model_class(s));
  const auto path = out_dir(s) / "fit.txt";
  write_file_atomic(path, to_string(fit) + '\n');
  out << to_string(fit) << '\n';
  report_written(out, path);
  return kExitOk;
}

int run_estimate(const Settings& s, std::ostream& out) {
  const auto series = input_series(s);
  const auto cfg = estimator_config(s, QuantileGrid::panel_levels());
  const auto est = SmoothedEstimator(cfg, series.size())(series);
  const auto dir = out_dir(s);
  write_file_atomic(dir / "estimate.csv", estimate_to_csv(est));
  report_written(out, dir / "estimate.csv");
  if (est.tau_grid().find(0.1) && est.tau_grid().find(0.5) && est.tau_grid().find(0.9)) {
    write_plot(dir, "estimate_grid", emit_grid_plot(est, nullptr, {QuantileGrid::panel_levels(), s.flag("shared-range"), series.label()}));
    report_written(out, dir / "estimate_grid.svg");
  }
  return kExitOk;
}

int run_reference(const Settings& s, std::ostream& out) {
  const auto spec = parse_model_spec(s.required("model"));
  if (const auto adm = check_admissible(spec); !adm) throw InvalidInput(adm.message);
  const auto taus = tau_grid(s, QuantileGrid::panel_levels());
  const auto omegas = FrequencyGrid::fourier_subgrid(s.u64("fourier-n", 64));
  const auto dir = out_dir(s);
  std::optional<SpectralMatrix> f;
  if (is_linear(spec) && !s.raw("sim-length")) {
    f = gaussian_copula_spectrum(spec, taus, omegas);
    write_file_atomic(dir / "reference.csv", estimate_to_csv(*f));
  } else {
    const auto mc = mc_copula_spectrum(spec, taus, omegas, static_cast<int>(s.u64("max-lag", 100)),
                                       s.u64("sim-length", 1000000), s.u64("seed", 1));
    f = mc.estimate;
    write_file_atomic(dir / "reference.csv", mc_to_csv(mc));
  }
  report_written(out, dir / "reference.csv");
  if (taus.find(0.1) && taus.find(0.5) && taus.find(0.9)) {
    write_plot(dir, "reference_grid", emit_grid_plot(*f, nullptr, {QuantileGrid::panel_levels(), s.flag("shared-range"), to_string(spec)}));
    report_written(out, dir / "reference_grid.svg");
  }
  return kExitOk;
}

struct BootstrapRun {
  TimeSeries series;
  SpectralMatrix estimate;
  BootstrapEnsemble ensemble;
};

BootstrapRun bootstrap_run(const Settings& s, const QuantileGrid& def_taus, std::ostream& out) {
  auto series = input_series(s);
  const auto cfg = estimator_config(s, def_taus);
  auto ensemble = run_parametric_bootstrap(series, model_class(s), s.u64("R", 1000), cfg, s.u64("seed", 1),
                                           static_cast<unsigned>(s.u64("threads", 0)));
  auto estimate = SmoothedEstimator(cfg, series.size())(series);
  const auto dir = out_dir(s);
  write_file_atomic(dir / "fit.txt", to_string(ensemble.fitted) + '\n');
  write_file_atomic(dir / "estimate.csv", estimate_to_csv(estimate));
  persist_ensemble(ensemble, dir / "ensemble.bin");
  out << to_string(ensemble.fitted) << '\n';
  for (const char* f : {"fit.txt", "estimate.csv", "ensemble.bin"}) report_written(out, dir / f);
  return {std::move(series), std::move(estimate), std::move(ensemble)};
}

int run_regions(const Settings& s, std::ostream& out) {
  const auto run = bootstrap_run(s, QuantileGrid::panel_levels(), out);
  const auto regions = typical_regions(run.ensemble, s.real("alpha", 0.05));
  const auto dir = out_dir(s);
  write_file_atomic(dir / "regions.csv", regions_to_csv(regions, &run.estimate));
  report_written(out, dir / "regions.csv");
  if (regions.taus.find(0.1) && regions.taus.find(0.5) && regions.taus.find(0.9)) {
    write_plot(dir, "regions_grid", emit_grid_plot(run.estimate, &regions, {QuantileGrid::panel_levels(), s.flag("shared-range"), to_string(run.ensemble.fitted.spec)}));
    report_written(out, dir / "regions_grid.svg");
  }
  return kExitOk;
}

std::vector<std::size_t> detail_indices(const Settings& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s.str("detail", "0,4"));
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.find_first_not_of(' ') == std::string::npos) continue;
    out.push_back(static_cast<std::size_t>(Settings::to_double("detail", item)));
  }
  return out;
}

int run_pvalues(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto run = bootstrap_run(s, QuantileGrid::equally_spaced(19), out);
  const auto field = algorithm2_pvalues(run.ensemble, run.estimate, s.real("beta", 0.1));
  for (const auto& w : field.warnings) err << "warning: " << w << '\n';
  const auto dir = out_dir(s);
  write_file_atomic(dir / "pvalues.csv", pvalues_to_csv(field));
  report_written(out, dir / "pvalues.csv");
  write_plot(dir, "pmin_summary", emit_summary_plot(field));
  report_written(out, dir / "pmin_summary.svg");
  const auto fourier_n = s.u64("fourier-n", 64);
  for (const auto j : detail_indices(s)) {
    if (j > fourier_n / 2) throw UsageError("--detail index " + std::to_string(j) + " exceeds the frequency grid");
    const double omega = field.omegas[j];
    const auto stem = "detail_j" + std::to_string(j);
    write_plot(dir, stem, emit_detail_plot(field, omega));
    report_written(out, dir / (stem + ".svg"));
  }
  return kExitOk;
}

int run_plot(const Settings& s, std::ostream& out) {
  const auto est = estimate_from_csv(read_file(s.required("estimate")));
  const auto dir = out_dir(s);
  std::optional<TypicalRegions> regions;
  if (const auto ens = s.raw("ensemble")) regions = typical_regions(load_ensemble(*ens), s.real("alpha", 0.05));
  write_plot(dir, "grid_plot", emit_grid_plot(est, regions ? &*regions : nullptr, {tau_grid(s, QuantileGrid::panel_levels()), s.flag("shared-range"), {}}));
  report_written(out, dir / "grid_plot.svg");
  return kExitOk;
}

int run_calibrate(const Settings& s, std::ostream& out) {
  CalibrationSetup setup;
  setup.n = s.u64("n", setup.n);
  setup.R = s.u64("R", setup.R);
  setup.reps = s.u64("reps", setup.reps);
  setup.alpha = s.real("alpha", setup.alpha);
  setup.beta = s.real("beta", setup.beta);
  setup.config = estimator_config(s, QuantileGrid::equally_spaced(19));
  setup.seed = s.u64("seed", setup.seed);
  setup.threads = static_cast<unsigned>(s.u64("threads", 0));
  const auto truth = parse_model_spec(s.required("model"));
  const auto report = self_calibration_check(truth, model_class(s), setup);

  const auto taus = report.taus.levels();
  const auto omegas = report.omegas.omegas();
  std::string cov = "tau1,tau2,omega,coverage_re,coverage_im\n";
  for (std::size_t i = 0; i < taus.size(); ++i)
    for (std::size_t j = 0; j < taus.size(); ++j)
      for (std::size_t k = 0; k < omegas.size(); ++k) {
        const auto c = report.index(i, j, k);
        cov += format_double(taus[i]) + ',' + format_double(taus[j]) + ',' + format_double(omegas[k]) + ',' +
               format_double(report.coverage_re[c]) + ',' + format_double(report.coverage_im[c]) + '\n';
      }
  std::string rej = "omega,rejection_rate\n";
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    rej += format_double(omegas[k]) + ',' + format_double(report.rejection_rate[k]) + '\n';
  }
  const auto dir = out_dir(s);
  write_file_atomic(dir / "coverage.csv", cov);
  write_file_atomic(dir / "rejection.csv", rej);
  report_written(out, dir / "coverage.csv");
  report_written(out, dir / "rejection.csv");
  return kExitOk;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Copula spectral density estimation and parametric bootstrap diagnostics", "copspec"};
  app.require_subcommand(1);

  struct Spec {
    const char* name;
    const char* help;
    std::vector<std::string> values;
    std::vector<std::string> switches;
  };
  const std::vector<std::string> grid = {"taus", "ntaus", "fourier-n", "bandwidth"};
  auto with = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const std::vector<std::string> boot = with({"input", "class", "p", "q", "R", "seed", "threads", "out"}, grid);
  const std::vector<Spec> specs = {
      {"simulate", "Simulate a model path to series.csv", {"model", "n", "burn-in", "seed", "out"}, {}},
      {"fit", "Fit a model class to a series", {"input", "class", "p", "q", "out"}, {"log-returns"}},
      {"estimate", "Smoothed copula spectral estimate", with({"input", "out"}, grid), {"log-returns", "shared-range"}},
      {"reference", "Analytic or Monte Carlo reference spectrum",
       {"model", "taus", "ntaus", "fourier-n", "max-lag", "sim-length", "seed", "out"}, {"shared-range"}},
      {"regions", "Typical regions from a parametric bootstrap", with(boot, {"alpha"}), {"log-returns", "shared-range"}},
      {"pvalues", "Bootstrap p-values uniform in the quantile levels", with(boot, {"beta", "detail"}), {"log-returns"}},
      {"plot", "Grid plot from an estimate CSV and optional ensemble",
       {"estimate", "ensemble", "alpha", "taus", "ntaus", "out"}, {"shared-range"}},
      {"calibrate", "Self-calibration of coverage and p-values",
       with({"model", "class", "p", "q", "n", "R", "reps", "alpha", "beta", "seed", "threads", "out"}, grid), {}},
  };

  std::vector<Command> commands(specs.size());
  for (std::size_t c = 0; c < specs.size(); ++c) {
    commands[c].app = app.add_subcommand(specs[c].name, specs[c].help);
    commands[c].app->add_option("--config", commands[c].config, "Flat key = value config file");
    for (const auto& v : specs[c].values) add_value(commands[c], v, v);
    for (const auto& f : specs[c].switches) add_switch(commands[c], f, f);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    for (std::size_t c = 0; c < specs.size(); ++c) {
      if (!commands[c].app->parsed()) continue;
      const Settings s = make_settings(commands[c]);
      const std::string name = specs[c].name;
      if (name == "simulate") return run_simulate(s, out);
      if (name == "fit") return run_fit(s, out);
      if (name == "estimate") return run_estimate(s, out);
      if (name == "reference") return run_reference(s, out);
      if (name == "regions") return run_regions(s, out);
      if (name == "pvalues") return run_pvalues(s, out, err);
      if (name == "plot") return run_plot(s, out);
      if (name == "calibrate") return run_calibrate(s, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const FitError& e) {
    err << "fit failed: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

int cli_dispatch(int argc, const char* const* argv) { return cli_dispatch(argc, argv, std::cout, std::cerr); }

}  // namespace copspec
