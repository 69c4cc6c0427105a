// msj: simulator and calculators for the multiserver-job model.
//
//   msj simulate      --config w.json --policy bs:fcfs
//   msj sweep-load    --k 256 --rho 0.5,0.7,0.9 --policies fcfs,bs:fcfs
//   msj scale         --regime critical --k 32,128,512 --theta 0.7
//   msj analyze-trace --swf log.swf --k 512 --rho 0.5,0.7
//   msj erlang 10 8
//   msj partition     --k 20 --class 2:0.5:2 --class 4:0.5:1
//   msj bounds        --theta 0.7

#include <clocale>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msj/analytics.hpp"
#include "msj/experiment.hpp"
#include "msj/partition.hpp"
#include "msj/policies.hpp"
#include "msj/trace.hpp"
#include "msj/workload.hpp"
#include "msj/workload_json.hpp"

namespace {

using namespace msj;

constexpr const char* kVersion = "1.0.0";

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MSJ_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("MSJ_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return 1;
}

struct SimFlags {
  std::int64_t arrivals = 100000;
  std::size_t reps = 5;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double warmup = 0.1;
  unsigned threads = default_threads();
  std::size_t max_in_system = 1000000;
  std::string out;
  std::vector<std::string> policies;

  void add(CLI::App* cmd, bool multi_policy) {
    auto* opt = cmd->add_option("--arrivals", arrivals, "Arrivals per run");
    // Sweeps average over batches and replications; tiny runs give meaningless intervals.
    if (multi_policy) {
      opt->check(CLI::Range(std::int64_t{1000}, std::numeric_limits<std::int64_t>::max()));
    } else {
      opt->check(CLI::PositiveNumber);
    }
    if (multi_policy) {
      cmd->add_option("--reps", reps, "Independent replications per point")->check(CLI::PositiveNumber);
      cmd->add_option("--policies", policies, "Comma-separated policy names")->delimiter(',');
      cmd->add_option("--out", out, "CSV output file (default stdout)");
      cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    }
    cmd->add_option("--seed", seed, "Root seed (default $MSJ_SEED or 1)")
        ->each([this](const std::string&) { seed_given = true; });
    cmd->add_option("--warmup", warmup, "Fraction of arrivals discarded as warmup")->check(CLI::Range(0.0, 0.999999));
    cmd->add_option("--max-in-system", max_in_system, "Abort a run once this many jobs are present");
  }

  std::uint64_t root() const { return seed_given ? seed : default_seed(); }

  RunOptions options() const {
    RunOptions o;
    o.arrivals = arrivals;
    o.warmup_fraction = warmup;
    o.max_in_system = max_in_system;
    return o;
  }

  std::vector<PolicySpec> parsed_policies(const std::vector<std::string>& fallback) const {
    std::vector<PolicySpec> specs;
    for (const auto& p : policies.empty() ? fallback : policies) specs.push_back(parse_policy(p));
    return specs;
  }
};

std::string policy_list(const std::vector<PolicySpec>& specs) {
  std::vector<std::string> names;
  for (const auto& s : specs) names.push_back(s.to_string());
  return join(names, ';');
}

template <typename T>
std::string list_of(const std::vector<T>& xs) {
  std::vector<std::string> cells;
  for (const auto& x : xs) {
    if constexpr (std::is_floating_point_v<T>) {
      cells.push_back(format_number(x));
    } else {
      cells.push_back(std::to_string(x));
    }
  }
  return join(cells, ';');
}

/// Output sink: a file when --out is given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_manifest(std::ostream& os, const std::string& command, std::uint64_t seed_root,
                    const std::vector<std::pair<std::string, std::string>>& params) {
  os << "# msj " << kVersion << " command=" << command << " seed_root=" << seed_root;
  for (const auto& [key, value] : params) os << ' ' << key << '=' << value;
  os << '\n';
}

/// A point of an experiment grid: one configuration under several policies.
struct GridPoint {
  SystemConfig config;
  RowContext ctx;
  std::vector<double> extra;
};

SimOutcome failed_outcome(const PolicySpec& spec, std::uint64_t seed, const RunOptions& opts, std::size_t classes) {
  SimOutcome o;
  o.policy = spec.to_string();
  o.seed = seed;
  o.arrivals = opts.arrivals;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  o.mean_response = o.response_ci95 = o.p_helper = o.helper_utilization = nan;
  ClassOutcome blank;
  blank.mean_response = blank.p_helper = blank.p_routed = nan;
  o.per_class.assign(classes, blank);
  return o;
}

/// Runs every (point, policy, replication) and writes rows in grid order.
/// Runs that trip the instability cap produce NaN rows and a warning.
void run_grid(std::ostream& os, const std::vector<GridPoint>& grid, const std::vector<PolicySpec>& policies,
              const SimFlags& flags, const std::vector<std::string>& extra_cols) {
  if (grid.empty()) throw std::invalid_argument("empty experiment grid");
  const std::size_t reps = flags.reps;
  const std::size_t total = grid.size() * policies.size() * reps;
  std::vector<SimOutcome> results(total);
  std::vector<std::string> warnings(total);
  const RunOptions base = flags.options();
  const std::uint64_t root = flags.root();

  parallel_for(total, flags.threads, [&](std::size_t task) {
    const std::size_t r = task % reps;
    const std::size_t p = (task / reps) % policies.size();
    const std::size_t g = task / (reps * policies.size());
    RunOptions o = base;
    o.seed = replication_seed(root, r);
    try {
      results[task] = run(grid[g].config, policies[p], o);
    } catch (const InstabilityError& e) {
      results[task] = failed_outcome(policies[p], o.seed, o, grid[g].config.classes.size());
      warnings[task] = e.what();
    }
  });

  std::size_t classes = 0;
  for (const auto& g : grid) classes = std::max(classes, g.config.classes.size());
  os << join(csv_header(classes, extra_cols)) << '\n';
  for (std::size_t task = 0; task < total; ++task) {
    const auto& point = grid[task / (reps * policies.size())];
    os << join(csv_row(results[task], point.ctx, point.extra)) << '\n';
    if (!warnings[task].empty()) std::cerr << "warning: " << warnings[task] << '\n';
  }
}

std::vector<double> default_rho_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 9; ++i) grid.push_back(0.5 + 0.05 * i);
  return grid;
}

const std::vector<std::string> kComparisonPolicies = {"fcfs", "bs:fcfs", "serverfilling", "serverfilling-srpt",
                                                      "ff-srpt", "msf", "ff-backfill"};

std::vector<JobClass> parse_class_flags(const std::vector<std::string>& specs) {
  std::vector<JobClass> classes;
  int index = 0;
  for (const auto& s : specs) {
    std::stringstream ss(s);
    std::string need, share, mean;
    if (!std::getline(ss, need, ':') || !std::getline(ss, share, ':') || !std::getline(ss, mean)) {
      throw std::invalid_argument("class must be need:share:mean, got '" + s + "'");
    }
    classes.push_back(JobClass{index++, std::stoll(need), std::stod(share),
                               ServiceDistribution::exponential(std::stod(mean))});
  }
  return classes;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& config_path, const std::string& policy, const SimFlags& flags,
                 std::optional<std::int64_t> k, std::optional<double> lambda, std::optional<double> rho,
                 bool allow_unstable) {
  SystemConfig config = load_config(config_path, false);
  if (k) config.k = *k;
  if (lambda) config.lambda = *lambda;
  if (rho) config.lambda = *rho * static_cast<double>(config.k) / config.total_demand();
  if (allow_unstable) config.require_stable = false;
  config.validate();

  const PolicySpec spec = parse_policy(policy);
  RunOptions o = flags.options();
  o.seed = flags.root();
  const SimOutcome out = run(config, spec, o);
  write_manifest(std::cout, "simulate", o.seed,
                 {{"config", config_path}, {"policy", spec.to_string()}, {"k", std::to_string(config.k)},
                  {"lambda", format_number(config.lambda)}, {"arrivals", std::to_string(o.arrivals)},
                  {"warmup", format_number(o.warmup_fraction)}});
  std::cout << join(csv_header(config.classes.size())) << '\n';
  std::cout << join(csv_row(out, RowContext{config.k, 1, config.load(), 0.0, o.warmup_fraction})) << '\n';
  return 0;
}

int cmd_sweep_load(std::int64_t k, const std::vector<double>& rhos, const std::string& config_path,
                   bool allow_unstable, const SimFlags& flags) {
  std::vector<JobClass> classes;
  std::int64_t f_k = 1;
  if (config_path.empty()) {
    f_k = figure1_growth(k);
    if (f_k < 1) throw std::invalid_argument("the default workload needs k >= 32");
    classes = scale_needs(figure1_classes(), f_k);
  } else {
    classes = load_config(config_path, false).classes;
  }
  std::vector<GridPoint> grid;
  for (double rho : rhos) {
    if (rho >= 1.0 && !allow_unstable) {
      throw std::invalid_argument("load " + format_number(rho) + " >= 1 requires --allow-unstable");
    }
    SystemConfig config = config_at_load(classes, k, rho);
    config.require_stable = !allow_unstable;
    config.validate();
    grid.push_back({config, RowContext{k, f_k, rho, 0.0, flags.warmup}, {}});
  }
  const auto policies = flags.parsed_policies(kComparisonPolicies);
  Sink sink(flags.out);
  write_manifest(sink.stream(), "sweep-load", flags.root(),
                 {{"k", std::to_string(k)}, {"f_k", std::to_string(f_k)}, {"rho", list_of(rhos)},
                  {"policies", policy_list(policies)}, {"arrivals", std::to_string(flags.arrivals)},
                  {"reps", std::to_string(flags.reps)}, {"warmup", format_number(flags.warmup)},
                  {"config", config_path.empty() ? "figure1" : config_path}});
  run_grid(sink.stream(), grid, policies, flags, {});
  return 0;
}

int cmd_scale(const std::string& regime, const std::vector<std::int64_t>& ks, double theta, double rho,
              const std::string& config_path, const std::string& growth, const SimFlags& flags) {
  if (regime != "critical" && regime != "subcritical") {
    throw std::invalid_argument("regime must be 'critical' or 'subcritical'");
  }
  const std::vector<JobClass> base = config_path.empty() ? figure1_classes() : load_config(config_path, false).classes;
  validate_classes(base);
  auto growth_of = [&](std::int64_t k) -> std::int64_t {
    if (growth == "fig1") return figure1_growth(k);
    if (growth == "cbrt") {
      std::int64_t f = static_cast<std::int64_t>(std::cbrt(static_cast<double>(k)));
      while ((f + 1) * (f + 1) * (f + 1) <= k) ++f;
      while (f * f * f > k) --f;
      return f;
    }
    if (growth == "one") return 1;
    throw std::invalid_argument("growth must be fig1, cbrt or one");
  };

  const bool critical = regime == "critical";
  const double bound = critical ? critical_bound(theta, base) : std::numeric_limits<double>::quiet_NaN();
  std::vector<GridPoint> grid;
  for (std::int64_t k : ks) {
    const std::int64_t f_k = growth_of(k);
    if (f_k < 1) throw std::invalid_argument("k=" + std::to_string(k) + " gives f_k < 1");
    SystemConfig config;
    if (critical) {
      config = scale_halfin_whitt(base, k, f_k, theta);
    } else {
      const std::int64_t base_k = max_need(base);
      config = scale_subcritical(config_at_load(base, base_k, rho), k, f_k);
    }
    config.validate();
    const Partition partition = compute_partition(config);
    grid.push_back({config, RowContext{k, f_k, config.load(), critical ? theta : 0.0, flags.warmup},
                    {helper_routing_bound(config, partition), bound, stability_lhs(config, partition)}});
  }
  const auto policies = flags.parsed_policies({"fcfs", "bs:fcfs", "modifiedbs:fcfs", "serverfilling",
                                               "serverfilling-srpt", "ff-srpt"});
  Sink sink(flags.out);
  write_manifest(sink.stream(), "scale", flags.root(),
                 {{"regime", regime}, {"k", list_of(ks)}, {"theta", format_number(theta)},
                  {"rho", format_number(rho)}, {"growth", growth}, {"policies", policy_list(policies)},
                  {"arrivals", std::to_string(flags.arrivals)}, {"reps", std::to_string(flags.reps)},
                  {"warmup", format_number(flags.warmup)}, {"config", config_path.empty() ? "figure1" : config_path}});
  run_grid(sink.stream(), grid, policies, flags, {"ph_bound", "critical_bound", "stability_lhs"});
  return 0;
}

int cmd_analyze_trace(const std::string& swf, std::int64_t k, const std::vector<double>& rhos, std::int64_t max_need,
                      bool replay, const std::string& model_json, SimFlags flags) {
  const auto raw = parse_swf(swf);
  const auto jobs = filter_power_of_two(raw, max_need);
  if (jobs.empty()) throw std::runtime_error(swf + ": no jobs left after the power-of-two filter");
  const ClassModel model = build_class_model(jobs);
  if (!model_json.empty()) {
    std::ofstream out(model_json);
    if (!out) throw std::runtime_error("cannot write '" + model_json + "'");
    out << to_json(model).dump(2) << '\n';
  }

  const bool table_to_stdout = !flags.out.empty();
  std::ostringstream table;
  table << "records " << raw.size() << ", kept " << jobs.size() << " (" << format_number(100.0 * jobs.size() / raw.size())
        << "% power-of-two with need <= " << max_need << ")\n"
        << format_class_table(model);
  if (table_to_stdout) {
    std::cout << table.str();
  } else {
    std::istringstream lines(table.str());
    for (std::string line; std::getline(lines, line);) std::cout << "# " << line << '\n';
  }

  const auto policies = flags.parsed_policies({"fcfs", "bs:fcfs", "serverfilling", "serverfilling-srpt", "ff-srpt"});
  Sink sink(flags.out);
  if (replay) {
    auto classes = model_classes(model);
    SystemConfig config;
    config.k = k;
    config.classes = classes;
    config.require_stable = false;
    config.lambda = 1.0;  // unused by the replay source
    config.validate();
    write_manifest(sink.stream(), "analyze-trace", 0,
                   {{"swf", swf}, {"k", std::to_string(k)}, {"mode", "replay"}, {"policies", policy_list(policies)},
                    {"warmup", format_number(flags.warmup)}});
    sink.stream() << join(csv_header(classes.size())) << '\n';
    for (const auto& spec : policies) {
      ReplayJobSource source(jobs, model);
      RunOptions o = flags.options();
      o.arrivals = static_cast<std::int64_t>(source.size());
      o.seed = 0;
      auto policy = make_policy(spec, config);
      const SimOutcome out = simulate(config, *policy, source, o);
      sink.stream() << join(csv_row(out, RowContext{k, 1, std::numeric_limits<double>::quiet_NaN(), 0.0, o.warmup_fraction}))
                    << '\n';
    }
    return 0;
  }
  std::vector<GridPoint> grid;
  for (double rho : rhos) {
    const SystemConfig config = trace_to_config(model, k, rho);
    grid.push_back({config, RowContext{k, 1, rho, 0.0, flags.warmup}, {}});
  }
  write_manifest(sink.stream(), "analyze-trace", flags.root(),
                 {{"swf", swf}, {"k", std::to_string(k)}, {"rho", list_of(rhos)}, {"max_need", std::to_string(max_need)},
                  {"policies", policy_list(policies)}, {"arrivals", std::to_string(flags.arrivals)},
                  {"reps", std::to_string(flags.reps)}, {"warmup", format_number(flags.warmup)}});
  run_grid(sink.stream(), grid, policies, flags, {});
  return 0;
}

int cmd_erlang(std::int64_t s, double a) {
  std::cout << s << '\t' << format_number(a) << '\t' << format_number(erlang_b(s, a)) << '\n';
  return 0;
}

SystemConfig config_for_tables(const std::string& config_path, std::optional<std::int64_t> k,
                               const std::vector<std::string>& class_flags, std::optional<double> theta) {
  SystemConfig config;
  if (!config_path.empty()) {
    config = load_config(config_path, false);
    if (k) config.k = *k;
  } else if (!class_flags.empty()) {
    if (!k) throw std::invalid_argument("--class needs --k");
    config.k = *k;
    config.classes = parse_class_flags(class_flags);
    config.lambda = 1.0;
    config.require_stable = false;
  } else {
    if (!k) throw std::invalid_argument("give --config, --class or --k (figure-1 family)");
    config = figure1_workload(*k, theta.value_or(0.7));
  }
  return config;
}

int cmd_partition(const std::string& config_path, std::optional<std::int64_t> k,
                  const std::vector<std::string>& class_flags) {
  const SystemConfig config = config_for_tables(config_path, k, class_flags, std::nullopt);
  const Partition p = compute_partition(config);
  std::cout << "class\tneed\tslots\tservers\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::cout << i << '\t' << config.classes[i].need << '\t' << p.slots[i] << '\t' << p.servers[i]
              << (p.helper_only[i] ? "\thelper-only" : "") << '\n';
  }
  std::cout << "helper\t" << p.helper << '\n';
  std::cout << "psi\t" << format_number(p.psi) << '\n';
  return 0;
}

int cmd_bounds(double theta, const std::string& config_path, std::optional<std::int64_t> k) {
  std::cout << "theta\t" << format_number(theta) << '\n';
  if (config_path.empty()) {
    std::cout << "critical_bound\t" << format_number(critical_bound(theta, figure1_classes())) << '\n';
    std::cout << "halfin_whitt_constant\t" << format_number(halfin_whitt_constant(theta)) << '\n';
    if (!k) return 0;
  }
  const SystemConfig config = config_for_tables(config_path, k, {}, theta);
  if (!config_path.empty()) {
    std::cout << "critical_bound\t" << format_number(critical_bound(theta, config.classes)) << '\n';
  }
  const Partition p = compute_partition(config);
  std::cout << "k\t" << config.k << '\n'
            << "load\t" << format_number(config.load()) << '\n'
            << "helper\t" << p.helper << '\n'
            << "psi\t" << format_number(p.psi) << '\n'
            << "stability_lhs\t" << format_number(stability_lhs(config, p)) << '\n'
            << "helper_routing_bound\t" << format_number(helper_routing_bound(config, p)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"Multiserver-job scheduling simulator and Erlang-B calculators"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate one workload file under one policy; prints one CSV row");
  SimFlags sim_flags;
  std::string sim_config, sim_policy = "bs:fcfs";
  std::optional<std::int64_t> sim_k;
  std::optional<double> sim_lambda, sim_rho;
  bool sim_unstable = false;
  sim->add_option("--config", sim_config, "Workload JSON")->required();
  sim->add_option("--policy", sim_policy, "Policy name, e.g. fcfs or bs:fcfs");
  sim->add_option("--k", sim_k, "Override the number of servers");
  sim->add_option("--lambda", sim_lambda, "Override the arrival rate");
  sim->add_option("--rho", sim_rho, "Override the arrival rate through the load");
  sim->add_flag("--allow-unstable", sim_unstable, "Permit load >= 1");
  sim_flags.add(sim, false);

  // sweep-load
  auto* sweep = app.add_subcommand("sweep-load", "Fixed k, varying load");
  SimFlags sweep_flags;
  std::int64_t sweep_k = 256;
  std::vector<double> sweep_rho = default_rho_grid();
  std::string sweep_config;
  bool sweep_unstable = false;
  sweep->add_option("--k", sweep_k, "Number of servers")->check(CLI::PositiveNumber);
  sweep->add_option("--rho", sweep_rho, "Comma-separated loads")->delimiter(',');
  sweep->add_option("--config", sweep_config, "Workload JSON for the classes (default: figure-1 classes)");
  sweep->add_flag("--allow-unstable", sweep_unstable, "Permit loads >= 1");
  sweep_flags.add(sweep, true);

  // scale
  auto* scale = app.add_subcommand("scale", "Many-server scaling: grow k with the demand");
  SimFlags scale_flags;
  std::string scale_regime = "critical", scale_config, scale_growth = "fig1";
  std::vector<std::int64_t> scale_k = {32, 64, 128, 256, 512, 1024, 2048};
  double scale_theta = 0.7, scale_rho = 0.7;
  scale->add_option("--regime", scale_regime, "critical or subcritical");
  scale->add_option("--k", scale_k, "Comma-separated server counts")->delimiter(',');
  scale->add_option("--theta", scale_theta, "Halfin-Whitt spare-capacity parameter")->check(CLI::PositiveNumber);
  scale->add_option("--rho", scale_rho, "Load held fixed in the subcritical regime");
  scale->add_option("--config", scale_config, "Workload JSON with unit-scale needs (default: figure-1 classes)");
  scale->add_option("--growth", scale_growth, "f_k rule: fig1 = floor((k/32)^(2/3)), cbrt, one");
  scale_flags.add(scale, true);

  // analyze-trace
  auto* trace = app.add_subcommand("analyze-trace", "Build a class model from an SWF log and sweep the load");
  SimFlags trace_flags;
  std::string trace_swf, trace_model;
  std::int64_t trace_k = 512, trace_max_need = 64;
  std::vector<double> trace_rho = default_rho_grid();
  bool trace_replay = false;
  trace->add_option("--swf", trace_swf, "SWF trace file")->required();
  trace->add_option("--k", trace_k, "Number of servers")->check(CLI::PositiveNumber);
  trace->add_option("--rho", trace_rho, "Comma-separated loads")->delimiter(',');
  trace->add_option("--max-need", trace_max_need, "Largest server need kept");
  trace->add_option("--model-json", trace_model, "Write the class model as JSON");
  trace->add_flag("--replay", trace_replay, "Replay real submit times instead of a Poisson sweep");
  trace_flags.add(trace, true);

  // erlang
  auto* erl = app.add_subcommand("erlang", "Erlang loss probability E_s(a)");
  std::int64_t erl_s = 0;
  double erl_a = 0.0;
  erl->add_option("servers", erl_s, "s")->required();
  erl->add_option("load", erl_a, "offered load a")->required();

  // partition
  auto* part = app.add_subcommand("partition", "Per-class pools and helper size");
  std::string part_config;
  std::optional<std::int64_t> part_k;
  std::vector<std::string> part_classes;
  part->add_option("--config", part_config, "Workload JSON");
  part->add_option("--k", part_k, "Number of servers (overrides the file)");
  part->add_option("--class", part_classes, "need:share:mean (repeatable)");

  // bounds
  auto* bnd = app.add_subcommand("bounds", "Critical-regime bound and helper statistics");
  double bnd_theta = 0.7;
  std::string bnd_config;
  std::optional<std::int64_t> bnd_k;
  bnd->add_option("--theta", bnd_theta, "Halfin-Whitt parameter")->check(CLI::PositiveNumber);
  bnd->add_option("--config", bnd_config, "Workload JSON (default: figure-1 classes)");
  bnd->add_option("--k", bnd_k, "Also report the figure-1 workload at this k");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(sim_config, sim_policy, sim_flags, sim_k, sim_lambda, sim_rho, sim_unstable);
    if (*sweep) return cmd_sweep_load(sweep_k, sweep_rho, sweep_config, sweep_unstable, sweep_flags);
    if (*scale) return cmd_scale(scale_regime, scale_k, scale_theta, scale_rho, scale_config, scale_growth, scale_flags);
    if (*trace) {
      return cmd_analyze_trace(trace_swf, trace_k, trace_rho, trace_max_need, trace_replay, trace_model, trace_flags);
    }
    if (*erl) return cmd_erlang(erl_s, erl_a);
    if (*part) return cmd_partition(part_config, part_k, part_classes);
    if (*bnd) return cmd_bounds(bnd_theta, bnd_config, bnd_k);
  } catch (const InstabilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
