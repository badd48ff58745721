#include "subsample/cli.hpp"

#include "subsample/asymptotics.hpp"
#include "subsample/bench.hpp"
#include "subsample/csv.hpp"
#include "subsample/errors.hpp"
#include "subsample/optdesign.hpp"
#include "subsample/probs.hpp"
#include "subsample/rng.hpp"
#include "subsample/sampler.hpp"
#include "subsample/volume.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace subsample::cli {

namespace {

using json = nlohmann::json;

/// Settings that never change a command's results and are not echoed.
struct Runtime {
  std::string output;
  std::string config_path;
  std::string csv_out;
  std::size_t threads = 1;
  bool table = false;
  bool time = false;
};

const std::set<std::string> kRuntimeOptions = {"--output", "--config", "--csv-out", "--threads",
                                               "--table", "--time", "--help"};

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

bool uses_csv(const RunConfig& c) { return !c.input.empty(); }

// ---------------------------------------------------------------------------
// Config echo

json data_config(const RunConfig& c) {
  json j;
  if (uses_csv(c)) {
    j["input"] = c.input;
    j["response"] = c.response;
    j["predictors"] = c.predictors;
    j["log_columns"] = c.log_columns;
    j["drop_head_rows"] = c.drop_head_rows;
    j["intercept"] = c.intercept;
  } else {
    j["input"] = "";
    j["family"] = c.family;
    j["n"] = c.n;
    j["p"] = c.p;
    j["df"] = c.df;
    j["noise_sd"] = c.noise_sd;
    j["beta0"] = c.beta0;
  }
  j["seed"] = c.seed;
  return j;
}

json config_to_json(const RunConfig& c) {
  json j = data_config(c);
  j["command"] = c.command;
  const std::string& cmd = c.command;
  if (cmd == "probs" || cmd == "subsample" || cmd == "amse" || cmd == "select" || cmd == "bench") {
    j["scheme"] = c.scheme;
    j["alpha"] = c.alpha ? json(*c.alpha) : json(nullptr);
  }
  if (cmd == "subsample" || cmd == "select" || cmd == "amse" || cmd == "bench") j["r"] = c.r;
  if (cmd == "subsample") j["mode"] = c.mode;
  if (cmd == "select" || cmd == "bench") j["criterion"] = c.criterion;
  if (cmd == "amse") j["sigma2"] = c.sigma2 ? json(*c.sigma2) : json(nullptr);
  if (cmd == "bench") j["reps"] = c.reps;
  if (cmd == "simulate") {
    j.erase("input");
  }
  return j;
}

template <typename T>
void read_if(const json& j, const char* key, T& field) {
  if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<T>();
}

RunConfig config_from_json(const json& j, const std::string& command) {
  if (!j.is_object()) throw InputError("config file must hold a JSON object");
  // Accept either the bare config object or a whole output document.
  const json& c = j.contains("config") && j.at("config").is_object() ? j.at("config") : j;
  RunConfig out;
  out.command = command;
  if (c.contains("command") && c.at("command").get<std::string>() != command) {
    throw InputError("config is for command '" + c.at("command").get<std::string>() + "', not '" + command + "'");
  }
  read_if(c, "input", out.input);
  read_if(c, "response", out.response);
  read_if(c, "predictors", out.predictors);
  read_if(c, "log_columns", out.log_columns);
  read_if(c, "drop_head_rows", out.drop_head_rows);
  read_if(c, "intercept", out.intercept);
  read_if(c, "family", out.family);
  read_if(c, "n", out.n);
  read_if(c, "p", out.p);
  read_if(c, "df", out.df);
  read_if(c, "noise_sd", out.noise_sd);
  read_if(c, "beta0", out.beta0);
  read_if(c, "scheme", out.scheme);
  if (c.contains("alpha") && !c.at("alpha").is_null()) out.alpha = c.at("alpha").get<double>();
  read_if(c, "r", out.r);
  read_if(c, "reps", out.reps);
  read_if(c, "seed", out.seed);
  read_if(c, "mode", out.mode);
  read_if(c, "criterion", out.criterion);
  if (c.contains("sigma2") && !c.at("sigma2").is_null()) out.sigma2 = c.at("sigma2").get<double>();
  return out;
}

// ---------------------------------------------------------------------------
// Data

SyntheticSpec synthetic_spec(const RunConfig& c) {
  SyntheticSpec spec;
  spec.family = parse_design_family(c.family);
  spec.n = c.n;
  spec.p = c.p;
  spec.df = c.df;
  spec.noise_sd = c.noise_sd;
  if (!c.beta0.empty()) spec.beta0 = Eigen::Map<const Vector>(c.beta0.data(), static_cast<Eigen::Index>(c.beta0.size()));
  return spec;
}

std::uint64_t data_seed(const RunConfig& c) { return derive_seed(c.seed, hash_name("data")); }

Dataset load_data(const RunConfig& c) {
  if (uses_csv(c)) {
    CsvOptions opts;
    opts.response = c.response;
    opts.predictors = c.predictors;
    opts.log_columns = c.log_columns;
    opts.drop_head_rows = c.drop_head_rows;
    opts.intercept = c.intercept;
    return parse_csv(c.input, opts);
  }
  return generate_synthetic(synthetic_spec(c), data_seed(c));
}

json data_summary(const Dataset& data) {
  return {{"n", data.n()}, {"p", data.p()}, {"fingerprint", dataset_fingerprint(data)}};
}

json estimate_json(const EstimateResult& fit) {
  return {{"beta", to_json(fit.beta)},
          {"rank", fit.rank},
          {"residual_ss", fit.residual_ss},
          {"reduced_rank", fit.reduced_rank}};
}

// ---------------------------------------------------------------------------
// Commands. Each resolves defaults into the config before it is echoed.

void resolve_single_scheme(RunConfig& c, const char* fallback) {
  if (c.scheme.empty()) c.scheme = {fallback};
  if (c.scheme.size() != 1) throw InputError("--scheme takes exactly one value for '" + c.command + "'");
  c.scheme.front() = upper(c.scheme.front());
}

std::optional<double> resolve_alpha(RunConfig& c, Scheme scheme) {
  if (scheme == Scheme::kSlev && !c.alpha) c.alpha = kDefaultSlevAlpha;
  return c.alpha;
}

std::size_t resolve_single_r(RunConfig& c, const Dataset& data) {
  if (c.r.empty()) c.r = {10 * static_cast<std::size_t>(data.p())};
  if (c.r.size() != 1) throw InputError("--r takes exactly one value for '" + c.command + "'");
  if (c.r.front() < 1) throw InputError("--r must be at least 1");
  return c.r.front();
}

json cmd_fit(RunConfig& c) {
  const Dataset data = load_data(c);
  json results = estimate_json(ols_fit(data));
  results["data"] = data_summary(data);
  return results;
}

json cmd_probs(RunConfig& c) {
  const Dataset data = load_data(c);
  resolve_single_scheme(c, "BLEV");
  const Scheme scheme = parse_scheme(c.scheme.front());
  const ProbabilityVector pv = compute_probabilities(data, scheme, resolve_alpha(c, scheme));
  return {{"scheme", scheme_name(pv.scheme)},
          {"alpha", pv.alpha ? json(*pv.alpha) : json(nullptr)},
          {"probs", to_json(pv.probs)},
          {"min", pv.probs.minCoeff()},
          {"max", pv.probs.maxCoeff()},
          {"data", data_summary(data)}};
}

json cmd_subsample(RunConfig& c) {
  const Dataset data = load_data(c);
  resolve_single_scheme(c, "BLEV");
  const Scheme scheme = parse_scheme(c.scheme.front());
  const std::size_t r = resolve_single_r(c, data);
  c.mode = lower(c.mode);
  EstimateMode mode;
  if (c.mode == "plain") {
    mode = EstimateMode::kPlain;
  } else if (c.mode == "weighted") {
    mode = EstimateMode::kWeighted;
  } else {
    throw InputError("--mode must be 'plain' or 'weighted'");
  }
  const ProbabilityVector pv = compute_probabilities(data, scheme, resolve_alpha(c, scheme));
  const SubsampleDraw d = draw(pv, r, c.seed);
  json results = estimate_json(subsample_estimate(data, d, mode));
  results["indices"] = d.indices;
  results["draw_probs"] = d.draw_probs;
  results["data"] = data_summary(data);
  return results;
}

json cmd_select(RunConfig& c) {
  const Dataset data = load_data(c);
  resolve_single_scheme(c, "IBOSS");
  const std::size_t r = resolve_single_r(c, data);
  c.criterion = upper(c.criterion);
  const Criterion criterion = parse_criterion(c.criterion);
  const std::string& method = c.scheme.front();

  json results;
  std::vector<RowIndex> indices;
  if (method == "IBOSS" || method == "GREEDY" || method == "EXCHANGE") {
    SubsetSelection sel;
    if (method == "IBOSS") {
      sel = iboss_select(data, r);
    } else {
      sel = greedy_select(data, r, criterion);
      if (method == "EXCHANGE") sel = exchange_improve(data, sel);
    }
    results["rule"] = selection_rule_name(sel.rule);
    results["value"] = finite_or_null(sel.value);
    indices = sel.indices;
  } else if (method == "VOLUME" || method == "LVOLUME") {
    const auto variant = method == "VOLUME" ? VolumeVariant::kStandard : VolumeVariant::kLeveraged;
    const VolumeSampleResult v = volume_sample(data, r, variant, c.seed);
    results["warnings"] = v.warnings;
    results["attempts"] = v.draw.attempts;
    if (variant == VolumeVariant::kLeveraged) results["proposal_probs"] = v.draw.proposal_probs;
    indices = v.draw.indices;
  } else {
    throw InputError("select --scheme must be one of IBOSS, GREEDY, EXCHANGE, VOLUME, LVOLUME");
  }
  results["indices"] = indices;
  const EstimateResult fit = ols_fit(data.select_rows(indices));
  results["estimate"] = estimate_json(fit);
  results["data"] = data_summary(data);
  return results;
}

json cmd_amse(RunConfig& c) {
  const Dataset data = load_data(c);
  resolve_single_scheme(c, "BLEV");
  const Scheme scheme = parse_scheme(c.scheme.front());
  const std::size_t r = resolve_single_r(c, data);
  const ProbabilityVector pv = compute_probabilities(data, scheme, resolve_alpha(c, scheme));
  const double sigma2 = c.sigma2 ? *c.sigma2 : sigma2_estimate(data);
  const AsymptoticVariance av = avar_matrix(data, pv.probs, r, sigma2);
  const RegularityDiagnostics diag = regularity_diagnostics(data, pv.probs, r);
  json amse;
  for (const AmseTarget t : {AmseTarget::kBeta, AmseTarget::kXBeta, AmseTarget::kXtXBeta}) {
    amse[std::string(amse_target_name(t))] = trace_amse(data, pv.probs, r, sigma2, t);
  }
  return {{"sigma2", sigma2},
          {"sigma2_estimated", !c.sigma2.has_value()},
          {"avar", to_json(av.matrix)},
          {"avar_trace", av.matrix.trace()},
          {"trace_amse", amse},
          {"diagnostics",
           {{"lambda_min", diag.lambda_min},
            {"lambda_max", diag.lambda_max},
            {"pi_min", diag.pi_min},
            {"condition_ratio", finite_or_null(diag.condition_ratio)}}},
          {"data", data_summary(data)}};
}

std::vector<std::string> default_bench_methods() {
  return {"RAND", "BLEV", "SLEV", "IC", "RL", "PL", "IBOSS", "GREEDY", "EXCHANGE"};
}

std::string render_table(const BenchmarkReport& report, const std::vector<std::string>& methods,
                         const std::vector<std::size_t>& r_values) {
  std::ostringstream os;
  char cell[96];
  std::snprintf(cell, sizeof cell, "%-10s", "method");
  os << cell;
  for (const std::size_t r : r_values) {
    std::snprintf(cell, sizeof cell, " %22s", ("r=" + std::to_string(r)).c_str());
    os << cell;
  }
  os << '\n';
  for (const auto& m : methods) {
    std::snprintf(cell, sizeof cell, "%-10s", m.c_str());
    os << cell;
    for (const std::size_t r : r_values) {
      const auto it = std::find_if(report.records.begin(), report.records.end(),
                                   [&](const EmseRecord& rec) { return rec.method == m && rec.r == r; });
      std::string text = "-";
      if (it != report.records.end() && !it->failed) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4g(%.4g)", it->emse, it->emse_sd);
        text = buf;
      } else if (it != report.records.end()) {
        text = "failed";
      }
      std::snprintf(cell, sizeof cell, " %22s", text.c_str());
      os << cell;
    }
    os << '\n';
  }
  return os.str();
}

json cmd_bench(RunConfig& c, const Runtime& rt, json& timings, std::string& table) {
  const Dataset data = load_data(c);
  if (c.scheme.empty()) c.scheme = default_bench_methods();
  EmseOptions opts;
  for (auto& m : c.scheme) {
    m = parse_method(m).name;
    opts.methods.push_back(m);
  }
  if (c.r.empty()) c.r = default_r_grid(data.p());
  if (!c.alpha) c.alpha = kDefaultSlevAlpha;
  c.criterion = upper(c.criterion);
  opts.r_values = c.r;
  opts.reps = c.reps;
  opts.seed = c.seed;
  opts.alpha = *c.alpha;
  opts.criterion = parse_criterion(c.criterion);
  opts.threads = rt.threads;
  opts.timing = rt.time;
  const BenchmarkReport report = run_emse(data, opts);

  json records = json::array();
  json record_times = json::array();
  for (const auto& rec : report.records) {
    records.push_back({{"method", rec.method},
                       {"r", rec.r},
                       {"effective_r", rec.effective_r},
                       {"emse", finite_or_null(rec.emse)},
                       {"emse_sd", finite_or_null(rec.emse_sd)},
                       {"successes", rec.successes},
                       {"failures", rec.failures},
                       {"failed", rec.failed},
                       {"first_error", rec.first_error}});
    record_times.push_back({{"method", rec.method}, {"r", rec.r}, {"mean_ms", rec.mean_time_ms}});
  }
  if (rt.time) timings["records"] = record_times;
  if (rt.table) table = render_table(report, c.scheme, c.r);
  return {{"records", records},
          {"reps", report.reps},
          {"seed", report.seed},
          {"dataset_fingerprint", report.dataset_fingerprint},
          {"beta_ols", to_json(report.beta_ols)},
          {"data", data_summary(data)}};
}

json cmd_simulate(RunConfig& c, const Runtime& rt) {
  if (rt.csv_out.empty()) throw InputError("simulate needs --csv-out PATH for the generated CSV");
  const Dataset data = generate_synthetic(synthetic_spec(c), data_seed(c));
  std::ofstream out(rt.csv_out, std::ios::binary);
  if (!out) throw InputError("cannot write '" + rt.csv_out + "'");
  write_csv(out, data);
  return {{"csv", rt.csv_out}, {"data", data_summary(data)}};
}

// ---------------------------------------------------------------------------
// Option registration

void add_runtime_options(CLI::App* sub, Runtime& rt) {
  sub->add_option("--output", rt.output, "Write the JSON document here instead of standard output");
  sub->add_option("--config", rt.config_path, "Re-run from an echoed config (JSON)");
  sub->add_flag("--time", rt.time, "Record wall-clock timings under timings_ms");
}

void add_synthetic_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--family", c.family, "Synthetic design family: gaussian, student_t, fig2");
  sub->add_option("--n", c.n, "Synthetic observation count");
  sub->add_option("--p", c.p, "Synthetic predictor count");
  sub->add_option("--df", c.df, "Degrees of freedom for t designs");
  sub->add_option("--noise-sd", c.noise_sd, "Gaussian noise standard deviation");
  sub->add_option("--beta0", c.beta0, "True coefficients (comma separated)")->delimiter(',');
  sub->add_option("--seed", c.seed, "Master seed");
}

void add_data_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--input", c.input, "CSV file with a header row; synthetic data when omitted");
  sub->add_option("--response", c.response, "Response column (name or 0-based index; default last)");
  sub->add_option("--predictors", c.predictors, "Predictor columns (comma separated)")->delimiter(',');
  sub->add_option("--log-columns", c.log_columns, "Columns to log-transform")->delimiter(',');
  sub->add_option("--drop-head-rows", c.drop_head_rows, "Discard this many leading records");
  sub->add_flag("--intercept", c.intercept, "Prepend a column of ones");
  add_synthetic_options(sub, c);
}

void check_config_exclusive(const CLI::App* sub) {
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0) continue;
    if (!kRuntimeOptions.contains(opt->get_name())) {
      throw InputError("--config cannot be combined with " + opt->get_name());
    }
  }
}

int execute(CLI::App& app, RunConfig& c, Runtime& rt, std::ostream& out) {
  CLI::App* sub = app.get_subcommands().front();
  c.command = sub->get_name();
  if (!rt.config_path.empty()) {
    check_config_exclusive(sub);
    std::ifstream in(rt.config_path);
    if (!in) throw InputError("cannot open config '" + rt.config_path + "'");
    c = config_from_json(json::parse(in), c.command);
  }
  if (rt.threads < 1) throw InputError("--threads must be at least 1");

  const auto start = std::chrono::steady_clock::now();
  json timings = json::object();
  std::string table;
  json results;
  if (c.command == "fit") {
    results = cmd_fit(c);
  } else if (c.command == "probs") {
    results = cmd_probs(c);
  } else if (c.command == "subsample") {
    results = cmd_subsample(c);
  } else if (c.command == "select") {
    results = cmd_select(c);
  } else if (c.command == "amse") {
    results = cmd_amse(c);
  } else if (c.command == "bench") {
    results = cmd_bench(c, rt, timings, table);
  } else {
    results = cmd_simulate(c, rt);
  }

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = c.command;
  doc["config"] = config_to_json(c);
  doc["results"] = results;
  if (rt.time) {
    timings["total"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    doc["timings_ms"] = timings;
  } else {
    doc["timings_ms"] = nullptr;
  }
  const std::string text = doc.dump(2) + "\n";

  if (!rt.output.empty()) {
    std::ofstream file(rt.output, std::ios::binary);
    if (!file) throw InputError("cannot write '" + rt.output + "'");
    file << text;
  }
  if (!table.empty()) {
    out << table;
  } else if (rt.output.empty()) {
    out << text;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subsampling estimators for large-scale least squares", "subsample"};
  app.require_subcommand(1, 1);
  RunConfig config;
  Runtime rt;

  auto* fit = app.add_subcommand("fit", "Full-sample OLS fit");
  add_data_options(fit, config);
  add_runtime_options(fit, rt);

  auto* probs = app.add_subcommand("probs", "Per-row sampling probabilities");
  add_data_options(probs, config);
  probs->add_option("--scheme", config.scheme, "RAND, BLEV, SLEV, IC, RL or PL")->expected(1);
  probs->add_option("--alpha", config.alpha, "SLEV shrinkage (default 0.9)");
  add_runtime_options(probs, rt);

  auto* subsample = app.add_subcommand("subsample", "One seeded draw and its estimate");
  add_data_options(subsample, config);
  subsample->add_option("--scheme", config.scheme, "RAND, BLEV, SLEV, IC, RL or PL")->expected(1);
  subsample->add_option("--alpha", config.alpha, "SLEV shrinkage (default 0.9)");
  subsample->add_option("--r", config.r, "Subsample size (default 10p)")->expected(1);
  subsample->add_option("--mode", config.mode, "plain (OLS) or weighted (1/pi WLS)");
  add_runtime_options(subsample, rt);

  auto* select = app.add_subcommand("select", "Deterministic or volume-sampled subset selection");
  add_data_options(select, config);
  select->add_option("--scheme", config.scheme, "IBOSS, GREEDY, EXCHANGE, VOLUME or LVOLUME")->expected(1);
  select->add_option("--r", config.r, "Subset size (default 10p)")->expected(1);
  select->add_option("--criterion", config.criterion, "A, D or E for GREEDY/EXCHANGE");
  add_runtime_options(select, rt);

  auto* amse = app.add_subcommand("amse", "Asymptotic variance, trace-AMSE and diagnostics");
  add_data_options(amse, config);
  amse->add_option("--scheme", config.scheme, "RAND, BLEV, SLEV, IC, RL or PL")->expected(1);
  amse->add_option("--alpha", config.alpha, "SLEV shrinkage (default 0.9)");
  amse->add_option("--r", config.r, "Subsample size (default 10p)")->expected(1);
  amse->add_option("--sigma2", config.sigma2, "Noise variance (default: residual estimate)");
  add_runtime_options(amse, rt);

  auto* bench = app.add_subcommand("bench", "Bootstrap EMSE benchmark");
  add_data_options(bench, config);
  bench->add_option("--scheme", config.scheme, "Methods (comma separated)")->delimiter(',');
  bench->add_option("--alpha", config.alpha, "SLEV shrinkage (default 0.9)");
  bench->add_option("--r", config.r, "Subsample sizes (default 5p,10p,15p,20p)")->delimiter(',');
  bench->add_option("--reps", config.reps, "Bootstrap replicates (default 100)");
  bench->add_option("--criterion", config.criterion, "Criterion for GREEDY/EXCHANGE");
  bench->add_option("--threads", rt.threads, "Worker threads (results do not depend on it)");
  bench->add_flag("--table", rt.table, "Print an aligned mean(sd) table");
  add_runtime_options(bench, rt);

  auto* simulate = app.add_subcommand("simulate", "Write a synthetic dataset as CSV");
  add_synthetic_options(simulate, config);
  simulate->add_option("--csv-out", rt.csv_out, "Destination CSV path")->required();
  add_runtime_options(simulate, rt);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInputError;
  }

  try {
    return execute(app, config, rt, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const json::exception& e) {
    err << "input error: bad config: " << e.what() << '\n';
    return kExitInputError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumericalError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumericalError;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace subsample::cli
