// Copyright 2026 The spikecp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "spikecp/change_test.hpp"
#include "spikecp/digest.hpp"
#include "spikecp/errors.hpp"
#include "spikecp/gp_quantile.hpp"
#include "spikecp/io.hpp"
#include "spikecp/limit_kernel.hpp"
#include "spikecp/parallel.hpp"
#include "spikecp/sim_lab.hpp"

namespace spikecp::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string render(double v) { return format_double(v); }
std::string render(std::size_t v) { return std::to_string(v); }
std::string render(const std::string& v) { return v; }
std::string render(bool v) { return v ? "true" : "false"; }
std::string render(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}
std::string render(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

// Options of one subcommand, with a record of how to echo each into
// artifacts. Paths, --threads and --config stay out of the echo so artifacts
// do not depend on them.
class Params {
 public:
  explicit Params(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_,
                     "JSON file of option values (flags take precedence)");
  }

  template <class T>
  CLI::Option* add(const std::string& name, T& var, const std::string& desc,
                   bool echo = true) {
    auto* o = app_->add_option("--" + name, var, desc);
    if constexpr (std::is_same_v<T, std::vector<double>> ||
                  std::is_same_v<T, std::vector<std::string>>)
      o->delimiter(',');
    if (echo) echo_.emplace_back(name, [&var] { return render(var); });
    return o;
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& desc) {
    auto* o = app_->add_flag("--" + name, var, desc);
    echo_.emplace_back(name, [&var] { return render(var); });
    return o;
  }

  /// True when the option was given on the command line or in the config.
  bool given(const std::string& name) const {
    const auto* o = app_->get_option_no_throw("--" + name);
    return (o && o->count() > 0) || from_config_.count(name) > 0;
  }

  void apply_config() {
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    if (!in) throw SpecError("cannot open config file '" + config_path_ + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(0, 0, config_path_ + ": " + e.what());
    }
    if (!j.is_object()) throw SpecError("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
      auto* o = app_->get_option_no_throw("--" + key);
      if (!o || key == "config")
        throw SpecError("unknown config key '" + key + "' for command '" +
                        app_->get_name() + "'");
      if (o->count() > 0) continue;  // the command line wins
      o->add_result(scalar(key, value));
      o->run_callback();
      from_config_.insert(key);
    }
  }

  Metadata echo(const std::string& command) const {
    Metadata meta;
    meta.emplace_back("tool", std::string("spikecp ") + SPIKECP_VERSION);
    meta.emplace_back("command", command);
    Fnv1a h;
    h.add(command);
    for (const auto& [name, get] : echo_) h.add(name).add(get());
    meta.emplace_back("config_digest", to_hex(h.value()));
    for (const auto& [name, get] : echo_) meta.emplace_back(name, get());
    return meta;
  }

 private:
  static std::string scalar(const std::string& key, const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_array()) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + scalar(key, v[i]);
      return s;
    }
    throw SpecError("config key '" + key + "' has an unsupported value type");
  }

  CLI::App* app_;
  std::string config_path_;
  std::set<std::string> from_config_;
  std::vector<std::pair<std::string, std::function<std::string()>>> echo_;
};

std::string join_path(const std::string& dir, const std::string& file) {
  return dir.empty() || dir == "." ? file : dir + "/" + file;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::map<std::string, std::string> as_map(const Metadata& meta) {
  return {meta.begin(), meta.end()};
}

std::vector<double> default_levels() { return {0.90, 0.95, 0.99}; }

struct Common {
  std::size_t threads = default_threads();
  std::string out_dir = ".";
  std::uint64_t seed = 1;
};

void add_common(Params& p, Common& c) {
  p.add("threads", c.threads, "worker threads (does not change results)", false)
      ->check(CLI::PositiveNumber);
  p.add("out-dir", c.out_dir, "directory for output files", false);
  p.add("seed", c.seed, "random seed");
}

// Scenario flags shared by simulate / power / histogram / validate-kernel.
struct ScenarioFlags {
  std::size_t n = 200;
  std::size_t p = 100;
  double t0 = 0.1;
  double t_star = 0.6;
  std::string alternative = "null";
  double delta = 0.0;
  std::vector<double> alphas;
  std::size_t replicates = 500;
  bool full_scale = false;
};

void add_scenario(Params& p, ScenarioFlags& s, bool with_alternative) {
  p.add("n", s.n, "observations per sample");
  p.add("p", s.p, "noise dimension");
  p.add("t0", s.t0, "left end of the monitoring window");
  p.add("t-star", s.t_star, "change point as a fraction of n");
  if (with_alternative) {
    p.add("alternative", s.alternative, "null, alt1, alt2 or alt3");
    p.add("delta", s.delta, "spike shift after the change point");
  }
  p.add("alphas", s.alphas, "baseline spikes a1,a2,... (default: 3 standard spikes)");
  p.add("replicates", s.replicates, "Monte-Carlo replicates");
  p.flag("full-scale", s.full_scale, "n=400, p=200, 2000 replicates unless given");
}

ScenarioSpec scenario_of(const Params& params, const ScenarioFlags& f, std::uint64_t seed) {
  ScenarioSpec s;
  s.n = f.n;
  s.p = f.p;
  s.replicates = f.replicates;
  if (f.full_scale) {
    const ScenarioSpec full = full_scenario();
    if (!params.given("n")) s.n = full.n;
    if (!params.given("p")) s.p = full.p;
    if (!params.given("replicates")) s.replicates = full.replicates;
  }
  s.t0 = f.t0;
  s.t_star = f.t_star;
  s.alternative = parse_alternative(f.alternative);
  s.delta = f.delta;
  s.spikes = f.alphas;
  s.seed = seed;
  s.validate();
  return s;
}

// ---------------------------------------------------------------- test

struct TestArgs {
  Common common;
  std::string input;
  std::string initial;
  std::string quantiles;
  std::vector<double> alphas;
  std::size_t m = 0;
  double t0 = 0.1;
  double level = 0.05;
  std::size_t grid = kDefaultGridPoints;
  std::size_t replicates = 10000;
};

int cmd_test(const Params& params, const TestArgs& a, std::ostream& out) {
  if (a.input.empty()) throw SpecError("--input is required");
  const bool known = !a.alphas.empty();
  if (known == !a.initial.empty())
    throw SpecError("give exactly one of --alphas (known spikes) or --initial (estimated)");
  const CsvData data = read_csv_file(a.input);
  const Metadata meta = params.echo("test");
  SimulationOptions sim;
  sim.replicates = a.replicates;
  sim.seed = a.common.seed;
  sim.threads = a.common.threads;

  TestReport report;
  if (known) {
    if (a.m != 0 && a.m != a.alphas.size())
      throw SpecError("--M disagrees with the number of --alphas");
    ModelSpec spec;
    spec.alphas = a.alphas;
    spec.t0 = a.t0;
    const auto d = static_cast<std::size_t>(data.values.cols());
    if (d <= spec.alphas.size()) throw SpecError("input has too few columns for M spikes");
    spec.y = static_cast<double>(d - spec.alphas.size()) /
             static_cast<double>(data.values.rows());
    spec.validate();
    QuantileTable table;
    if (!a.quantiles.empty()) {
      table = quantile_table_from_json(read_text(a.quantiles));
    } else {
      table = quantile_table(known_kernel(spec), GridSpec::uniform(a.t0, a.grid),
                             {1.0 - a.level}, sim);
    }
    report = test_known(data.values, spec, a.level, table);
  } else {
    if (a.m == 0) throw SpecError("--M is required with --initial");
    const CsvData initial = read_csv_file(a.initial);
    if (initial.values.cols() != data.values.cols())
      throw SpecError("--input and --initial have different column counts");
    const InitialSampleSummary summary = estimate_kernel_inputs(initial.values, a.m, a.t0);
    QuantileTable table;
    if (!a.quantiles.empty()) {
      table = quantile_table_from_json(read_text(a.quantiles));
    } else {
      const double y = static_cast<double>(static_cast<std::size_t>(data.values.cols()) - a.m) /
                       static_cast<double>(data.values.rows());
      table = quantile_table(plug_in_kernel(summary, y), GridSpec::uniform(a.t0, a.grid),
                             {1.0 - a.level}, sim);
    }
    report = test_estimated(data.values, summary, table, a.level);
    report.initial_digest = matrix_digest(initial.values);
  }
  report.config = as_map(meta);
  const std::string path = join_path(a.common.out_dir, "report.json");
  write_file(path, to_json(report));

  out << "mode " << report.mode << ", n = " << report.n << ", p = " << report.p
      << ", M = " << report.spikes << ", level = " << report.level << "\n";
  out << std::setprecision(6);
  out << "  max-type: statistic " << report.statistic_max << ", critical "
      << report.critical_max << ", p ~ " << report.p_value_max << " -> "
      << (report.reject_max ? "REJECT" : "accept") << " (t = " << report.argmax_t
      << ", spike " << report.argmax_spike << ")\n";
  out << "  sum-type: statistic " << report.statistic_sum << ", critical "
      << report.critical_sum << ", p ~ " << report.p_value_sum << " -> "
      << (report.reject_sum ? "REJECT" : "accept") << " (t = " << report.argmax_t_sum
      << ")\n";
  out << "report written to " << path << "\n";
  return report.reject_max || report.reject_sum ? kExitReject : kExitAccept;
}

// ------------------------------------------------------------ simulate

struct SimulateArgs {
  Common common;
  ScenarioFlags scenario;
  std::size_t replicate = 0;
  std::size_t initial_rows = 0;
  std::string output;
};

int cmd_simulate(const Params& params, const SimulateArgs& a, std::ostream& out) {
  ScenarioSpec s = scenario_of(params, a.scenario, a.common.seed);
  Metadata meta = params.echo("simulate");
  meta.emplace_back("scenario_digest", to_hex(s.digest()));
  const DataMatrix x = generate(s, a.replicate);
  const std::size_t m = s.alphas().size();
  std::ostringstream os;
  write_data_csv(os, x, m, meta);
  const std::string path = a.output.empty() ? join_path(a.common.out_dir, "data.csv") : a.output;
  write_file(path, os.str());
  out << "wrote " << x.rows() << " x " << x.cols() << " sample to " << path << "\n";
  if (a.initial_rows > 0) {
    std::ostringstream is;
    Metadata imeta = meta;
    imeta.emplace_back("sample", "initial");
    write_data_csv(is, generate_initial(s, a.replicate, a.initial_rows), m, imeta);
    const std::string ipath = join_path(a.common.out_dir, "initial.csv");
    write_file(ipath, is.str());
    out << "wrote " << a.initial_rows << " x " << x.cols() << " initial sample to " << ipath
        << "\n";
  }
  return kExitAccept;
}

// ----------------------------------------------------------- quantiles

struct QuantileArgs {
  Common common;
  std::vector<double> alphas;
  std::string input;
  std::string initial;
  std::size_t m = 0;
  double y = 0.0;
  double t0 = 0.1;
  std::vector<double> levels = default_levels();
  std::size_t grid = kDefaultGridPoints;
  std::size_t replicates = 10000;
  bool no_samples = false;
};

int cmd_quantiles(const Params& params, const QuantileArgs& a, std::ostream& out) {
  double y = a.y;
  if (!params.given("y")) {
    if (a.input.empty()) throw SpecError("give --y or an --input sample to read p / n from");
    const CsvData data = read_csv_file(a.input);
    const std::size_t m = a.alphas.empty() ? a.m : a.alphas.size();
    if (static_cast<std::size_t>(data.values.cols()) <= m)
      throw SpecError("input has too few columns for M spikes");
    y = static_cast<double>(static_cast<std::size_t>(data.values.cols()) - m) /
        static_cast<double>(data.values.rows());
  }
  const bool known = !a.alphas.empty();
  if (known == !a.initial.empty())
    throw SpecError("give exactly one of --alphas or --initial");
  std::unique_ptr<GaussianKernel> kernel;
  if (known) {
    ModelSpec spec;
    spec.alphas = a.alphas;
    spec.y = y;
    spec.t0 = a.t0;
    kernel = std::make_unique<GaussianKernel>(known_kernel(spec));
  } else {
    if (a.m == 0) throw SpecError("--M is required with --initial");
    const CsvData initial = read_csv_file(a.initial);
    kernel = std::make_unique<GaussianKernel>(
        plug_in_kernel(estimate_kernel_inputs(initial.values, a.m, a.t0), y));
  }
  SimulationOptions sim;
  sim.replicates = a.replicates;
  sim.seed = a.common.seed;
  sim.threads = a.common.threads;
  std::vector<double> levels = a.levels;
  std::sort(levels.begin(), levels.end());
  const QuantileTable table =
      quantile_table(*kernel, GridSpec::uniform(a.t0, a.grid), levels, sim);
  const std::string path = join_path(a.common.out_dir, "quantiles.json");
  write_file(path, to_json(table, !a.no_samples, params.echo("quantiles")));
  out << std::setprecision(6) << "process " << table.process << ", kernel "
      << table.kernel_hash << "\n";
  for (std::size_t i = 0; i < table.levels.size(); ++i)
    out << "  level " << table.levels[i] << ": q_max " << table.q_max[i] << ", q_sum "
        << table.q_sum[i] << "\n";
  out << "table written to " << path << "\n";
  return kExitAccept;
}

// -------------------------------------------------------------- kernel

struct KernelArgs {
  Common common;
  std::vector<double> alphas;
  double y = 0.5;
  double s = 1.0;
  double t = 1.0;
  std::size_t k = 1;
  std::size_t k2 = 0;
  bool plug_in = false;
};

int cmd_kernel(const Params& params, const KernelArgs& a, std::ostream& out) {
  if (a.alphas.empty()) throw SpecError("--alphas is required");
  const std::size_t kb = a.k2 == 0 ? a.k : a.k2;
  if (a.k < 1 || a.k > a.alphas.size() || kb < 1 || kb > a.alphas.size())
    throw SpecError("spike indices must lie in 1..M");
  const MomentInputs moments = MomentInputs::diagonal_gaussian(a.alphas);
  const GaussianKernel kernel = a.plug_in ? h_kernel(a.alphas, a.y, moments)
                                          : g_kernel(a.alphas, a.y, moments);
  const KernelCoefficients c =
      coefficients({a.alphas[a.k - 1], a.s}, {a.alphas[kb - 1], a.t}, a.y);
  const double cov = kernel.covariance(a.k - 1, a.s, kb - 1, a.t);
  Json j;
  j["process"] = a.plug_in ? "H" : "G";
  j["kernel_hash"] = to_hex(kernel.digest());
  j["k"] = a.k;
  j["k2"] = kb;
  j["s"] = a.s;
  j["t"] = a.t;
  j["tau"] = c.tau;
  j["psi"] = c.psi;
  j["kappa"] = c.kappa;
  j["zeta"] = c.zeta;
  j["omega"] = c.omega;
  j["theta"] = c.theta;
  j["covariance"] = cov;
  Json meta = Json::object();
  for (const auto& [key, v] : params.echo("kernel")) meta[key] = v;
  j["metadata"] = meta;
  const std::string text = j.dump(2) + "\n";
  write_file(join_path(a.common.out_dir, "kernel.json"), text);
  out << text;
  return kExitAccept;
}

// ------------------------------------------------------ experiment cmds

struct ExperimentArgs {
  Common common;
  ScenarioFlags scenario;
  std::vector<std::string> alternatives = {"alt1", "alt2", "alt3"};
  std::vector<double> deltas = {0, 2, 4, 8};
  std::string mode = "known";
  double level = 0.05;
  std::size_t grid = kDefaultGridPoints;
  std::size_t quantile_replicates = 10000;
  std::size_t initial_size = 0;
  std::string statistic = "max";
  std::size_t bins = 40;
  std::vector<double> times = {0.5, 0.75, 1.0};
};

ExperimentOptions options_of(const ExperimentArgs& a) {
  ExperimentOptions o;
  if (a.mode == "known")
    o.mode = TestMode::kKnown;
  else if (a.mode == "estimated")
    o.mode = TestMode::kEstimated;
  else
    throw SpecError("--mode must be 'known' or 'estimated'");
  o.level = a.level;
  o.grid_points = a.grid;
  o.quantile_replicates = a.quantile_replicates;
  o.initial_size = a.initial_size;
  o.threads = a.common.threads;
  return o;
}

int cmd_power(const Params& params, const ExperimentArgs& a, std::ostream& out) {
  const ScenarioSpec s = scenario_of(params, a.scenario, a.common.seed);
  std::vector<Alternative> alts;
  for (const auto& name : a.alternatives) alts.push_back(parse_alternative(name));
  const auto curves = level_and_power(s, alts, a.deltas, options_of(a));
  Metadata meta = params.echo("power");
  std::ostringstream csv;
  write_power_csv(csv, curves, meta);
  write_file(join_path(a.common.out_dir, "power.csv"), csv.str());
  std::vector<Series> series;
  for (const auto& c : curves) {
    series.push_back({to_string(c.alternative) + " max", c.deltas, c.rejection_max});
    series.push_back({to_string(c.alternative) + " sum", c.deltas, c.rejection_sum});
  }
  write_file(join_path(a.common.out_dir, "power.svg"),
             line_chart_svg("Empirical rejection rates (" + a.mode + " spikes, n=" +
                                std::to_string(s.n) + ")",
                            "delta", "rejection rate", series, meta));
  out << std::setprecision(4);
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.deltas.size(); ++i)
      out << to_string(c.alternative) << " delta=" << c.deltas[i] << ": max "
          << c.rejection_max[i] << ", sum " << c.rejection_sum[i] << "\n";
  if (!curves.empty() && curves.front().inadmissible > 0)
    out << curves.front().inadmissible << " of " << curves.front().replicates
        << " initial samples gave inadmissible estimates (counted as not rejecting)\n";
  return kExitAccept;
}

int cmd_histogram(const Params& params, const ExperimentArgs& a, std::ostream& out) {
  const ScenarioSpec s = scenario_of(params, a.scenario, a.common.seed);
  Statistic which;
  if (a.statistic == "max")
    which = Statistic::kMax;
  else if (a.statistic == "sum")
    which = Statistic::kSum;
  else
    throw SpecError("--statistic must be 'max' or 'sum'");
  const Histogram h = histogram_experiment(s, which, a.bins, options_of(a));
  const Metadata meta = params.echo("histogram");
  std::ostringstream csv;
  write_histogram_csv(csv, h, meta);
  write_file(join_path(a.common.out_dir, "histogram.csv"), csv.str());
  const std::string label = a.statistic == "max" ? "log M_n" : "log S_n";
  write_file(join_path(a.common.out_dir, "histogram.svg"),
             bar_chart_svg("Histogram of " + label + " (" + to_string(s.alternative) + ")",
                           label, h, meta));
  out << "histogram of " << label << " over " << h.values.size() << " replicates, "
      << h.counts.size() << " bins\n";
  return kExitAccept;
}

int cmd_validate_kernel(const Params& params, const ExperimentArgs& a, std::ostream& out) {
  ScenarioSpec s = scenario_of(params, a.scenario, a.common.seed);
  const auto rows = kernel_validation(s, a.times, a.common.threads);
  const Metadata meta = params.echo("validate-kernel");
  std::ostringstream csv;
  write_kernel_validation_csv(csv, rows, meta);
  write_file(join_path(a.common.out_dir, "kernel_validation.csv"), csv.str());
  // Chart: empirical and analytic variance against t for each spike.
  std::map<std::size_t, std::pair<Series, Series>> by_k;
  for (const auto& r : rows) {
    if (r.s != r.t) continue;
    auto& [emp, ana] = by_k[r.k];
    emp.name = "k=" + std::to_string(r.k) + " empirical";
    ana.name = "k=" + std::to_string(r.k) + " analytic";
    emp.x.push_back(r.t);
    emp.y.push_back(r.empirical);
    ana.x.push_back(r.t);
    ana.y.push_back(r.analytic);
  }
  std::vector<Series> series;
  for (auto& [k, pair] : by_k) {
    series.push_back(pair.first);
    series.push_back(pair.second);
  }
  write_file(join_path(a.common.out_dir, "kernel_validation.svg"),
             line_chart_svg("Variance of the centred eigenvalue process", "t", "variance",
                            series, meta));
  double worst = 0.0;
  out << std::setprecision(5);
  for (const auto& r : rows) {
    worst = std::max(worst, r.rel_err);
    out << "k=" << r.k << " s=" << r.s << " t=" << r.t << ": empirical " << r.empirical
        << ", analytic " << r.analytic << ", rel. error " << r.rel_err << "\n";
  }
  out << "largest relative error " << worst << "\n";
  return kExitAccept;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Change-point tests for spiked covariance eigenvalues", "spikecp"};
  app.set_version_flag("--version", std::string(SPIKECP_VERSION));
  app.require_subcommand(1);

  auto* test = app.add_subcommand("test", "run the max- and sum-type tests on a CSV sample");
  Params test_p(test);
  TestArgs test_a;
  add_common(test_p, test_a.common);
  test_p.add("input", test_a.input, "CSV sample (columns xi_1..xi_M, then noise)", false);
  test_p.add("initial", test_a.initial, "CSV initial sample (estimated-spike mode)", false);
  test_p.add("quantiles", test_a.quantiles, "reuse a quantile table JSON", false);
  test_p.add("alphas", test_a.alphas, "known baseline spikes a1,a2,...");
  test_p.add("M", test_a.m, "number of spikes (estimated mode)");
  test_p.add("t0", test_a.t0, "left end of the monitoring window");
  test_p.add("level", test_a.level, "significance level")->check(CLI::Range(0.0, 1.0));
  test_p.add("grid", test_a.grid, "time grid points for the quantile simulation");
  test_p.add("replicates", test_a.replicates, "quantile simulation replicates");

  auto* simulate = app.add_subcommand("simulate", "generate a CSV sample");
  Params sim_p(simulate);
  SimulateArgs sim_a;
  add_common(sim_p, sim_a.common);
  add_scenario(sim_p, sim_a.scenario, true);
  sim_p.add("replicate", sim_a.replicate, "replicate index within the seed");
  sim_p.add("initial-rows", sim_a.initial_rows, "also write an independent null sample");
  sim_p.add("output", sim_a.output, "output CSV path (default <out-dir>/data.csv)", false);

  auto* quantiles = app.add_subcommand("quantiles", "simulate critical values");
  Params q_p(quantiles);
  QuantileArgs q_a;
  add_common(q_p, q_a.common);
  q_p.add("alphas", q_a.alphas, "known spikes a1,a2,...");
  q_p.add("input", q_a.input, "sample whose shape fixes y = p / n", false);
  q_p.add("initial", q_a.initial, "initial sample for a plug-in table", false);
  q_p.add("M", q_a.m, "number of spikes (plug-in mode)");
  q_p.add("y", q_a.y, "aspect ratio p / n");
  q_p.add("t0", q_a.t0, "left end of the monitoring window");
  q_p.add("levels", q_a.levels, "confidence levels, e.g. 0.9,0.95,0.99");
  q_p.add("grid", q_a.grid, "time grid points");
  q_p.add("replicates", q_a.replicates, "simulation replicates");
  q_p.flag("no-samples", q_a.no_samples, "omit the simulated sample (no p-values later)");

  auto* kernel = app.add_subcommand("kernel", "evaluate the limiting covariance kernel");
  Params k_p(kernel);
  KernelArgs k_a;
  add_common(k_p, k_a.common);
  k_p.add("alphas", k_a.alphas, "spikes a1,a2,...");
  k_p.add("y", k_a.y, "aspect ratio");
  k_p.add("s", k_a.s, "first time");
  k_p.add("t", k_a.t, "second time");
  k_p.add("k", k_a.k, "first spike (1-based)");
  k_p.add("k2", k_a.k2, "second spike (default: same as --k)");
  k_p.flag("plug-in", k_a.plug_in, "plug-in kernel (twice the known-spike kernel)");

  auto* power = app.add_subcommand("power", "empirical level and power curves");
  Params pw_p(power);
  ExperimentArgs pw_a;
  add_common(pw_p, pw_a.common);
  add_scenario(pw_p, pw_a.scenario, false);
  pw_p.add("alternatives", pw_a.alternatives, "alternatives, e.g. alt1,alt2");
  pw_p.add("deltas", pw_a.deltas, "spike shifts, e.g. 0,2,4,8");
  pw_p.add("mode", pw_a.mode, "known or estimated");
  pw_p.add("level", pw_a.level, "significance level");
  pw_p.add("grid", pw_a.grid, "time grid points (known mode)");
  pw_p.add("quantile-replicates", pw_a.quantile_replicates, "quantile simulation replicates");
  pw_p.add("initial-size", pw_a.initial_size, "initial sample rows (default n)");

  auto* histogram = app.add_subcommand("histogram", "histogram of log statistics");
  Params h_p(histogram);
  ExperimentArgs h_a;
  add_common(h_p, h_a.common);
  add_scenario(h_p, h_a.scenario, true);
  h_p.add("statistic", h_a.statistic, "max or sum");
  h_p.add("bins", h_a.bins, "number of bins");

  auto* validate = app.add_subcommand("validate-kernel", "Monte-Carlo check of the kernel");
  Params v_p(validate);
  ExperimentArgs v_a;
  add_common(v_p, v_a.common);
  add_scenario(v_p, v_a.scenario, false);
  v_p.add("times", v_a.times, "time points, e.g. 0.5,0.75,1");

  try {
    std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitAccept;
  } catch (const CLI::CallForVersion&) {
    out << SPIKECP_VERSION << "\n";
    return kExitAccept;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitAccept;
    }
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (test->parsed()) {
      test_p.apply_config();
      return cmd_test(test_p, test_a, out);
    }
    if (simulate->parsed()) {
      sim_p.apply_config();
      return cmd_simulate(sim_p, sim_a, out);
    }
    if (quantiles->parsed()) {
      q_p.apply_config();
      return cmd_quantiles(q_p, q_a, out);
    }
    if (kernel->parsed()) {
      k_p.apply_config();
      return cmd_kernel(k_p, k_a, out);
    }
    if (power->parsed()) {
      pw_p.apply_config();
      return cmd_power(pw_p, pw_a, out);
    }
    if (histogram->parsed()) {
      h_p.apply_config();
      return cmd_histogram(h_p, h_a, out);
    }
    if (validate->parsed()) {
      v_p.apply_config();
      return cmd_validate_kernel(v_p, v_a, out);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  err << "error: no command given\n";
  return kExitError;
}

}  // namespace spikecp::cli
