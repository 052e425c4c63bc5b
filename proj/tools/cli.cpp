#include "coxaff/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "coxaff/cox_dist.hpp"
#include "coxaff/error.hpp"
#include "coxaff/events.hpp"
#include "coxaff/fit.hpp"
#include "coxaff/format.hpp"
#include "coxaff/model_json.hpp"
#include "coxaff/replication.hpp"
#include "coxaff/series.hpp"
#include "coxaff/simulate.hpp"

namespace coxaff {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct RunConfig {
  std::string command;
  std::string model;
  std::string data;
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  double horizon = 1.0;
  std::size_t steps = 0;
  std::size_t paths = 1000;
  int kmax = kDefaultKMax;
  double tol = kDefaultOdeTolerance;
  std::size_t reps = 100;
  std::size_t len = 500;
  int restarts = 5;
  int bins = 20;
};

// Everything that determines the numbers; `jobs` and `out` are left out so
// reruns elsewhere or with other parallelism produce identical files.
json config_json(const RunConfig& c, const json& model_doc, const json& data_doc = nullptr) {
  json j;
  j["command"] = c.command;
  j["seed"] = c.seed;
  if (!c.model.empty()) j["model_file"] = c.model;
  if (!model_doc.is_null()) j["model"] = model_doc;
  if (c.command == "simulate") {
    j["horizon"] = c.horizon;
    j["steps"] = c.steps;
    j["paths"] = c.paths;
  } else if (c.command == "pmf") {
    j["horizon"] = c.horizon;
    j["kmax"] = c.kmax;
    j["tol"] = c.tol;
  } else if (c.command == "fit") {
    j["data_file"] = c.data;
    if (!c.config.empty()) j["config_file"] = c.config;
    j["data_config"] = data_doc;
    j["restarts"] = c.restarts;
  } else if (c.command == "validate") {
    j["reps"] = c.reps;
    j["len"] = c.len;
    j["restarts"] = c.restarts;
    j["bins"] = c.bins;
  }
  return j;
}

fs::path prepare_out(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec || !fs::is_directory(c.out)) throw DataError("cannot create output directory " + c.out);
  return fs::path(c.out);
}

void write_json(const fs::path& file, const json& doc) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  out << doc.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& file, const json& cfg) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  out << "# " << cfg.dump() << '\n';
  return out;
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

ModelSpec model_or_default(const RunConfig& c, const FellerModel& fallback) {
  if (!c.model.empty()) return load_model(c.model);
  ModelSpec m;
  m.feller = fallback;
  m.affine = as_affine(fallback);
  return m;
}

int cmd_simulate(const RunConfig& c, std::ostream& log) {
  if (c.model.empty()) throw DataError("simulate: --model is required");
  const ModelSpec spec = load_model(c.model);
  const json cfg = config_json(c, to_json(spec));
  const fs::path dir = prepare_out(c);
  const std::vector<std::string> header{cfg.dump()};
  const RngStream root(c.seed);

  RngStream r0 = root.split(0);
  PathSample path;
  json summary;
  summary["config"] = cfg;
  if (spec.kind == ModelKind::feller) {
    const std::size_t n = c.steps ? c.steps : default_steps(spec.feller, c.horizon);
    path = simulate_path(spec.feller, c.horizon, n, r0);
    summary["scheme"] = "exact";
  } else {
    const std::size_t n = c.steps ? c.steps : std::max<std::size_t>(1, std::size_t(std::ceil(c.horizon / 0.01)));
    path = simulate_path_euler(spec.affine, c.horizon, n, r0);
    summary["scheme"] = "euler";
  }
  path.arrivals = simulate_arrivals(path, r0);
  write_path_csv((dir / "path.csv").string(), path, header);
  write_arrivals_csv((dir / "arrivals.csv").string(), path.arrivals, header);

  summary["horizon"] = c.horizon;
  summary["path_arrivals"] = path.arrivals.size();
  summary["path_hazard"] = path.cum_hazard.back();
  if (spec.kind == ModelKind::feller && c.paths > 0) {
    const auto counts = simulate_counts(spec.feller, c.horizon, c.paths, root.split(1), c.steps, c.jobs);
    double s = 0.0, q = 0.0;
    for (auto k : counts) s += double(k);
    const double mean = s / double(counts.size());
    for (auto k : counts) q += (double(k) - mean) * (double(k) - mean);
    const double var = counts.size() > 1 ? q / double(counts.size() - 1) : 0.0;
    const double se = std::sqrt(var / double(counts.size()));
    const double expected = mean_count(spec.feller, c.horizon);
    summary["count_paths"] = c.paths;
    summary["count_mean"] = mean;
    summary["count_mean_se"] = se;
    summary["count_variance"] = var;
    summary["mean_count"] = expected;
    summary["var_count"] = var_count(spec.feller, c.horizon);
    summary["mean_z"] = se > 0.0 ? (mean - expected) / se : 0.0;
  }
  write_json(dir / "summary.json", summary);
  log << "simulate: " << path.arrivals.size() << " arrivals on [0, " << fmt_num(c.horizon) << "], outputs in "
      << dir.string() << '\n';
  return kExitOk;
}

int cmd_pmf(const RunConfig& c, std::ostream& log) {
  if (c.model.empty()) throw DataError("pmf: --model is required");
  const ModelSpec spec = load_model(c.model);
  const json cfg = config_json(c, to_json(spec));
  const fs::path dir = prepare_out(c);
  const CountPmf p = spec.kind == ModelKind::feller ? pmf(spec.feller, c.horizon, c.kmax)
                                                    : pmf(spec.affine, c.horizon, c.kmax, c.tol);
  json doc;
  doc["config"] = cfg;
  doc["horizon"] = p.horizon;
  doc["probs"] = nums(p.probs);
  doc["sum"] = p.sum();
  doc["tail_bound"] = p.tail_bound;
  doc["mean_truncated"] = p.mean();
  if (spec.kind == ModelKind::feller) {
    doc["mean_count"] = mean_count(spec.feller, c.horizon);
    doc["var_count"] = var_count(spec.feller, c.horizon);
  }
  write_json(dir / "pmf.json", doc);
  std::ofstream csv = open_csv(dir / "pmf.csv", cfg);
  csv << "k,p_k\n";
  for (std::size_t k = 0; k < p.probs.size(); ++k) csv << k << ',' << fmt_num(p.probs[k]) << '\n';
  log << "pmf: p_0 = " << fmt_num(p.probs[0]) << ", sum = " << fmt_num(p.sum()) << '\n';
  return kExitOk;
}

json estimate_json(const EstimationResult& e) {
  json est;
  const double val[4] = {e.params.kappa, e.params.theta, e.params.sigma, e.R};
  for (std::size_t i = 0; i < 4; ++i)
    est[kParamNames[i]] = {{"estimate", val[i]}, {"std_error", e.std_errors[i]}};
  json lb = json::array();
  for (std::size_t l = 0; l < e.diagnostics.lags.size(); ++l)
    lb.push_back({{"lag", e.diagnostics.lags[l]},
                  {"statistic", e.diagnostics.statistics[l]},
                  {"p_value", e.diagnostics.p_values[l]}});
  return {{"parameters", est},    {"loglik", e.loglik},           {"converged", e.converged},
          {"iterations", e.iterations}, {"finite_starts", e.finite_starts}, {"ljung_box", lb},
          {"warnings", e.warnings}};
}

int cmd_fit(const RunConfig& c, std::ostream& log) {
  if (c.data.empty()) throw DataError("fit: --data is required");
  if (!fs::exists(c.data)) throw DataError("fit: data file " + c.data + " does not exist");
  const DataConfig dc = c.config.empty() ? DataConfig{} : load_data_config(c.config);

  EventLoadReport rep;
  const EventLog events = load_events(c.data, &rep);
  for (const auto& w : rep.warnings) log << "warning: " << w << '\n';
  ObservationSeries series = to_observable(aggregate(events, dc.aggregate), dc.M, dc.proxy);
  for (const auto& w : series.warnings) log << "warning: " << w << '\n';
  const std::vector<double> y = measurement_series(series, dc.mapping, dc.proxy);
  const StateSpaceSpec spec = state_space_for(series, dc.mapping);

  FitOptions fo;
  fo.seed = c.seed;
  fo.jobs = c.jobs;
  fo.restarts = c.restarts;
  if (y.size() < fo.min_length)
    throw DataError("fit: only " + std::to_string(y.size()) + " intervals after aggregation");
  FellerModel init;
  double init_R;
  std::optional<ModelSpec> given;
  if (!c.model.empty()) {
    given = load_model(c.model);
    if (given->kind != ModelKind::feller) throw DataError("fit: the initial model must be a Feller model");
    init = given->feller;
    init_R = given->R.value_or(moment_initial_guess(y, spec).R);
  } else {
    const InitialGuess g = moment_initial_guess(y, spec);
    init = g.params;
    init_R = g.R;
  }
  const json cfg = config_json(c, given ? to_json(*given) : json(nullptr), to_json(dc));
  const fs::path dir = prepare_out(c);

  const EstimationResult e = fit(y, spec, init, init_R, fo);
  const FilterOutput f = kalman_filter(e.params, e.R, y, spec);

  json doc = estimate_json(e);
  doc["config"] = cfg;
  doc["initial"] = to_json(init);
  doc["initial"]["R"] = init_R;
  doc["data"] = {{"events", events.size()},
                 {"rejected_lines", rep.rejected_lines},
                 {"resorted", rep.resorted},
                 {"intervals", series.size()},
                 {"days", series.n_days},
                 {"dropped_events", series.dropped},
                 {"over_capacity", series.over_capacity.size()},
                 {"delta", spec.delta},
                 {"window", spec.window},
                 {"mapping", mapping_name(spec.mapping)}};
  write_json(dir / "estimation.json", doc);

  {
    std::ofstream t = open_csv(dir / "parameters.csv", cfg);
    t << "parameter,estimate,std_error\n";
    const double val[4] = {e.params.kappa, e.params.theta, e.params.sigma, e.R};
    for (std::size_t i = 0; i < 4; ++i) t << kParamNames[i] << ',' << fmt_num(val[i]) << ',' << fmt_num(e.std_errors[i]) << '\n';
  }
  {
    std::ofstream r = open_csv(dir / "residuals.csv", cfg);
    r << "interval_start,innovation,standardized_residual\n";
    for (std::size_t t = 0; t < y.size(); ++t)
      r << format_timestamp(series.interval_start[t]) << ',' << fmt_num(f.innovations[t]) << ','
        << fmt_num(f.standardized_residuals[t]) << '\n';
  }
  {
    std::ofstream r = open_csv(dir / "fitted.csv", cfg);
    r << "interval_start,observed,fitted,filtered_intensity\n";
    for (std::size_t t = 0; t < y.size(); ++t)
      r << format_timestamp(series.interval_start[t]) << ',' << fmt_num(y[t]) << ',' << fmt_num(f.fitted[t]) << ','
        << fmt_num(f.filtered_mean[t]) << '\n';
  }
  {
    std::ofstream r = open_csv(dir / "ljung_box.csv", cfg);
    r << "lag,statistic,p_value\n";
    for (std::size_t l = 0; l < e.diagnostics.lags.size(); ++l)
      r << e.diagnostics.lags[l] << ',' << fmt_num(e.diagnostics.statistics[l]) << ','
        << fmt_num(e.diagnostics.p_values[l]) << '\n';
  }
  write_series_csv((dir / "series.csv").string(), series, {cfg.dump()});
  log << "fit: theta = " << fmt_num(e.params.theta) << ", kappa = " << fmt_num(e.params.kappa)
      << ", sigma = " << fmt_num(e.params.sigma) << ", R = " << fmt_num(e.R)
      << (e.converged ? "" : " (not converged)") << '\n';
  return kExitOk;
}

int cmd_validate(const RunConfig& c, std::ostream& log) {
  const ModelSpec truth = model_or_default(c, FellerModel{0.2, 0.04, 0.05, 0.04});
  if (truth.kind != ModelKind::feller) throw DataError("validate: the model must be a Feller model");
  if (c.reps < 1) throw DomainError("validate: --reps must be >= 1");
  if (c.bins < 1) throw DomainError("validate: --bins must be >= 1");
  ModelSpec shown = truth;
  shown.R = truth.R.value_or(0.001);
  const json cfg = config_json(c, to_json(shown));
  const fs::path dir = prepare_out(c);

  ReplicationOptions ro;
  ro.R = *shown.R;
  ro.jobs = c.jobs;
  ro.fit.restarts = c.restarts;
  const ReplicationSummary s = replication_study(truth.feller, c.reps, c.len, RngStream(c.seed), ro);

  const std::vector<std::string> header{cfg.dump()};
  write_replication_csv((dir / "replication.csv").string(), s, header);
  json params = json::array();
  for (const auto& p : s.params) {
    write_histogram_csv((dir / ("hist_" + p.name + ".csv")).string(), histogram(p.estimates, c.bins), header);
    params.push_back({{"parameter", p.name},
                      {"true_value", p.true_value},
                      {"mean_estimate", p.mean},
                      {"mqe", p.mqe},
                      {"std_error", p.std_dev}});
  }
  json lb = json::array();
  for (std::size_t l = 0; l < s.ljung_box_lags.size(); ++l)
    lb.push_back({{"lag", s.ljung_box_lags[l]}, {"pass_rate", s.ljung_box_pass_rate[l]}});
  json doc{{"config", cfg},           {"replications", s.n_reps}, {"failed", s.n_failed},
           {"failures", s.failures},   {"converged", s.n_converged}, {"parameters", params},
           {"ljung_box", lb}};
  write_json(dir / "summary.json", doc);
  log << "validate: " << s.n_reps - s.n_failed << " of " << s.n_reps << " replications fitted\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Cox processes with affine intensity"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--jobs", cfg.jobs, "worker threads (0 = all cores)")->capture_default_str();
  };

  CLI::App* sim = app.add_subcommand("simulate", "simulate an intensity path, its arrivals and count statistics");
  sim->add_option("--model", cfg.model, "model JSON")->required();
  sim->add_option("--horizon", cfg.horizon, "time horizon")->capture_default_str();
  sim->add_option("--steps", cfg.steps, "grid steps (0 = automatic)")->capture_default_str();
  sim->add_option("--paths", cfg.paths, "paths for the count statistics")->capture_default_str();
  common(sim);

  CLI::App* pm = app.add_subcommand("pmf", "count distribution over a window");
  pm->add_option("--model", cfg.model, "model JSON")->required();
  pm->add_option("--horizon", cfg.horizon, "window length")->capture_default_str();
  pm->add_option("--kmax", cfg.kmax, "largest count")->capture_default_str();
  pm->add_option("--tol", cfg.tol, "ODE tolerance for affine models")->capture_default_str();
  common(pm);

  CLI::App* ft = app.add_subcommand("fit", "estimate the model from an event file");
  ft->add_option("--data", cfg.data, "event CSV (timestamp,side,instrument)")->required();
  ft->add_option("--config", cfg.config, "data JSON config (interval, session, M, mapping)");
  ft->add_option("--model", cfg.model, "initial values (default: moment-based)");
  ft->add_option("--restarts", cfg.restarts, "random optimizer restarts")->capture_default_str();
  common(ft);

  CLI::App* va = app.add_subcommand("validate", "replication study of the estimator");
  va->add_option("--model", cfg.model, "true model (default kappa=0.2, theta=0.04, sigma=0.05, R=0.001)");
  va->add_option("--reps", cfg.reps, "replications")->capture_default_str();
  va->add_option("--len", cfg.len, "series length")->capture_default_str();
  va->add_option("--restarts", cfg.restarts, "random optimizer restarts per fit")->capture_default_str();
  va->add_option("--bins", cfg.bins, "histogram bins")->capture_default_str();
  common(va);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return (cfg.command = "simulate", cmd_simulate(cfg, out));
    if (pm->parsed()) return (cfg.command = "pmf", cmd_pmf(cfg, out));
    if (ft->parsed()) return (cfg.command = "fit", cmd_fit(cfg, out));
    if (va->parsed()) return (cfg.command = "validate", cmd_validate(cfg, out));
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace coxaff
