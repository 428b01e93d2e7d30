#include "janossy/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "janossy/conditioning.hpp"
#include "janossy/distributions.hpp"
#include "janossy/dppcheck.hpp"
#include "janossy/error.hpp"
#include "janossy/fredholm.hpp"
#include "janossy/parallel.hpp"
#include "janossy/sampler.hpp"
#include "janossy/twode.hpp"

namespace janossy::cli {

namespace {

using Json = nlohmann::ordered_json;
using Cell = std::variant<double, std::string>;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Config {
  std::string family = "airy";
  double nu = 0.0;
  std::string s_spec, t_spec;
  int p = 0;
  std::string route = "tw";
  int order = kDefaultOrder;
  double epsilon = 1e-10;
  double lambda = 10.0;
  double mu = kHardEdgeCutoff;
  std::uint64_t seed = 13;
  long count = 100000;
  int n = 128;
  std::string ensemble = "gue";
  std::string output;
  std::string format = "csv";
  int threads = 0;
  double threshold = 1e-6;
  bool singular = false;
  bool route_given = false;
};

// Lower end of the Bessel TW system; it cannot start closer to the origin.
constexpr double kBesselSystemStart = 1e-10;

// Prints "label: done/total" on every tenth of a sweep.
class Progress {
 public:
  Progress(std::ostream& err, std::string label, std::size_t total)
      : err_(err), label_(std::move(label)), total_(total) {}
  void tick() {
    const std::size_t done = ++done_;
    if (total_ < 2) return;
    const std::size_t step = std::max<std::size_t>(1, total_ / 10);
    if (done % step == 0 || done == total_) {
      std::lock_guard<std::mutex> lock(mutex_);
      err_ << label_ << ": " << done << "/" << total_ << "\n";
    }
  }

 private:
  std::ostream& err_;
  std::string label_;
  std::size_t total_;
  std::atomic<std::size_t> done_{0};
  std::mutex mutex_;
};

FamilyTag family_of(const Config& c) {
  if (c.family == "airy") return FamilyTag::airy();
  if (c.family == "bessel") return FamilyTag::bessel(c.nu);
  throw ConfigError("unknown family '" + c.family + "' (expected airy or bessel)");
}

Route route_of(const Config& c) {
  if (c.route == "tw") return Route::tw;
  if (c.route == "nystrom") return Route::nystrom;
  throw ConfigError("unknown route '" + c.route + "' (expected tw or nystrom)");
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate_common(const Config& c) {
  check(c.format == "csv" || c.format == "json", "--format must be csv or json");
  check(c.threads >= 0, "--threads must be >= 0");
  check(std::isfinite(c.nu) && c.nu > -1.0, "--nu must be a real number > -1");
  check(c.order >= 8 && c.order <= 4000, "--M must be in [8, 4000]");
  check(std::isfinite(c.epsilon) && c.epsilon > 0.0 && c.epsilon <= 1e-6,
        "--epsilon must be in (0, 1e-6]");
  check(std::isfinite(c.lambda) && c.lambda >= 8.0 && c.lambda <= 200.0, "--lambda must be in [8, 200]");
  check(std::isfinite(c.mu) && c.mu > 0.0 && c.mu <= 1e-8, "--mu must be in (0, 1e-8]");
}

std::vector<double> grid_of(const std::string& spec, const char* flag) {
  if (spec.empty()) throw ConfigError(std::string(flag) + " is required");
  try {
    return parse_grid(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(flag) + ": " + e.what());
  }
}

DistributionOptions options_of(const Config& c) {
  DistributionOptions o;
  o.order = c.order;
  o.airy_cutoff = c.lambda;
  o.bessel_cutoff = c.mu;
  o.tw_bessel_cutoff = std::max(c.mu, kBesselSystemStart);
  o.epsilon = c.epsilon;
  o.threads = c.threads;
  return o;
}

Json base_meta(const std::string& command, const Config& c) {
  Json meta;
  meta["command"] = command;
  meta["family"] = c.family;
  if (c.family == "bessel") meta["nu"] = c.nu;
  return meta;
}

void emit(const Table& table, const Json& meta, const Config& c, std::ostream& out) {
  if (c.format == "json") {
    Json doc;
    doc["meta"] = meta;
    doc["rows"] = Json::array();
    for (const auto& row : table.rows) {
      Json r;
      for (std::size_t j = 0; j < table.columns.size(); ++j) {
        if (const auto* x = std::get_if<double>(&row[j])) {
          r[table.columns[j]] = *x;
        } else {
          r[table.columns[j]] = std::get<std::string>(row[j]);
        }
      }
      doc["rows"].push_back(std::move(r));
    }
    out << doc.dump(2) << "\n";
    return;
  }
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    out << (j ? "," : "") << table.columns[j];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ",";
      if (const auto* x = std::get_if<double>(&row[j])) {
        out << format_number(*x);
      } else {
        out << std::get<std::string>(row[j]);
      }
    }
    out << "\n";
  }
}

Table cmd_gap(const Config& c, Json& meta, std::ostream& err) {
  const FamilyTag family = family_of(c);
  check(c.p >= 0 && c.p <= 64, "--p must be in [0, 64]");
  check(!c.route_given || c.route == "nystrom",
        "gap supports --route nystrom only (the TW system needs a conditioned kernel)");
  const auto s = grid_of(c.s_spec, "--s");
  const DistributionOptions o = options_of(c);
  meta["route"] = "nystrom";
  meta["M"] = c.order;
  if (c.family == "airy") meta["lambda"] = c.lambda;
  else meta["mu"] = c.mu;

  std::vector<std::vector<double>> values(s.size());
  Progress progress(err, "gap", s.size());
  parallel_for(s.size(), c.threads, [&](std::size_t i) {
    values[i] = counting_probabilities(family, s[i], c.p, o);
    progress.tick();
  });
  Table table;
  table.columns.push_back("s");
  for (int k = 0; k <= c.p; ++k) table.columns.push_back("E" + std::to_string(k));
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<Cell> row{s[i]};
    for (double v : values[i]) row.emplace_back(v);
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table cmd_joint(const Config& c, Json& meta, std::ostream& err) {
  const FamilyTag family = family_of(c);
  const Route route = route_of(c);
  check(!c.singular || c.family == "bessel", "--singular applies to the bessel family only");
  const auto t = grid_of(c.t_spec, "--t");
  const auto s = grid_of(c.s_spec, "--s");
  if (c.singular) {
    for (double x : t) check(x > 0.0, "--t must be > 0 with --singular");
    for (double x : s) check(x > 0.0, "--s must be > 0 with --singular");
  }
  const DistributionOptions o = options_of(c);
  meta["route"] = route_name(route);
  meta["epsilon"] = c.epsilon;
  meta["M"] = c.order;
  if (c.family == "airy") meta["lambda"] = c.lambda;
  else meta["mu"] = c.mu;
  meta["singular"] = c.singular;

  std::vector<double> s_arg = s;
  if (c.singular) {
    for (double& x : s_arg) x *= x;
  }
  std::vector<std::vector<double>> rows(t.size());
  Progress progress(err, "joint", t.size());
  parallel_for(t.size(), c.threads, [&](std::size_t i) {
    const double ti = c.singular ? t[i] * t[i] : t[i];
    rows[i] = joint_p12_row(family, ti, s_arg, route, o);
    if (c.singular) {
      for (std::size_t j = 0; j < s.size(); ++j) rows[i][j] *= 4.0 * t[i] * s[j];
    }
    progress.tick();
  });
  Table table;
  table.columns = {"t", "s", "P12"};
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) table.rows.push_back({t[i], s[j], rows[i][j]});
  }
  return table;
}

Table cmd_validate(const Config& c, Json& meta, std::ostream& err, double& max_dev) {
  const FamilyTag family = family_of(c);
  check(std::isfinite(c.threshold) && c.threshold > 0.0, "--threshold must be > 0");
  const auto t = grid_of(c.t_spec, "--t");
  const auto s = grid_of(c.s_spec, "--s");
  const bool airy = c.family == "airy";
  meta["epsilon"] = c.epsilon;
  meta["M"] = c.order;
  if (airy) meta["lambda"] = c.lambda;
  else meta["mu"] = c.mu;
  meta["threshold"] = c.threshold;

  const KernelSpec base = make_kernel(family);
  Table table;
  table.columns = {"t", "s", "tw", "nystrom", "rel_dev"};
  max_dev = 0.0;
  Progress progress(err, "validate", t.size() * s.size());
  for (double ti : t) {
    const KernelSpec ck = condition(base, cplx(ti, c.epsilon));
    const TWSystemSpec sys = build_system(ck);
    TWSolveOptions so = default_solve_options(sys.family);
    so.cutoff = airy ? c.lambda : std::max(c.mu, kBesselSystemStart);
    const TWSolution sol = solve(sys, s, so);
    if (sol.imag_warning) {
      err << "warning: imaginary residue " << sol.max_imag_residue << " at t=" << ti << "\n";
    }
    std::vector<double> nystrom(s.size());
    parallel_for(s.size(), c.threads, [&](std::size_t j) {
      const auto spectrum = airy ? nystrom_spectrum(ck, s[j], c.lambda, c.order)
                                 : nystrom_spectrum(ck, c.mu, s[j], c.order);
      nystrom[j] = -log_fredholm_det(spectrum);
      progress.tick();
    });
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double tw = sol.points[j].integral;
      double dev;
      if (nystrom[j] != 0.0) dev = (tw - nystrom[j]) / nystrom[j];
      else dev = tw == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      if (!(std::abs(dev) <= max_dev)) max_dev = std::isnan(dev) ? dev : std::abs(dev);
      table.rows.push_back({ti, s[j], tw, nystrom[j], dev});
    }
  }
  meta["max_abs_rel_dev"] = max_dev;
  return table;
}

Table cmd_sample(const Config& c, Json& meta, std::ostream& err) {
  check(c.n >= 16 && c.n <= 100000, "--n must be in [16, 100000]");
  check(c.count >= 1 && c.count <= 100000000, "--count must be in [1, 1e8]");
  SampleBatch batch;
  if (c.ensemble == "gue") {
    batch = sample_gue_edge(c.n, c.count, c.seed, c.threads);
  } else if (c.ensemble == "wishart") {
    check(c.nu >= 0.0 && c.nu == std::floor(c.nu) && c.nu <= 1e6,
          "--nu must be a non-negative integer for wishart");
    batch = sample_wishart_hard_edge(c.n, static_cast<int>(c.nu), c.count, c.seed, c.threads);
  } else {
    throw ConfigError("unknown ensemble '" + c.ensemble + "' (expected gue or wishart)");
  }
  err << "sample: " << batch.pairs.size() << " pairs\n";
  meta = Json();
  meta["command"] = "sample";
  meta["ensemble"] = c.ensemble;
  meta["n"] = c.n;
  if (c.ensemble == "wishart") meta["nu"] = static_cast<int>(c.nu);
  meta["count"] = c.count;
  meta["seed"] = c.seed;
  Table table;
  table.columns = {"first", "second"};
  table.rows.reserve(batch.pairs.size());
  for (const auto& [a, b] : batch.pairs) table.rows.push_back({a, b});
  return table;
}

Table cmd_selftest(const Config& c, Json& meta, bool& all_passed) {
  const DppSuiteReport report = run_identity_suite(100, c.seed);
  double k1 = 0.0;
  constexpr int kGrid = 50;
  for (int i = 0; i < kGrid; ++i) {
    const double x = 0.1 + 9.9 * (i + 1) / (kGrid + 1);
    for (int j = 0; j < kGrid; ++j) {
      const double y = 0.1 + 9.9 * (j + 1) / (kGrid + 1);
      const auto [value, closed] = sine_k1_check(x, y);
      k1 = std::max(k1, std::abs(value - closed));
    }
  }
  struct Line {
    std::string name;
    double error, tolerance;
  };
  const std::vector<Line> lines = {
      {"dpp_janossy_routes", report.max_route_error, report.route_tolerance},
      {"dpp_janossy_extra_points", report.max_extra_error, report.route_tolerance},
      {"dpp_conditional_correlations", report.max_correlation_error, report.route_tolerance},
      {"dpp_transformed_projection", report.max_projection_error, report.projection_tolerance},
      {"sine_conditioned_kernel", k1, 1e-12},
  };
  meta = Json();
  meta["command"] = "selftest";
  meta["seed"] = c.seed;
  meta["dpp_instances"] = report.instances;
  meta["dpp_checks"] = report.checks;
  Table table;
  table.columns = {"identity", "max_error", "tolerance", "status"};
  all_passed = true;
  for (const auto& l : lines) {
    const bool ok = l.error <= l.tolerance;
    all_passed = all_passed && ok;
    table.rows.push_back({l.name, l.error, l.tolerance, std::string(ok ? "PASS" : "FAIL")});
  }
  return table;
}

void add_family(CLI::App* cmd, Config& c) {
  cmd->add_option("--family", c.family, "airy or bessel")->capture_default_str();
  cmd->add_option("--nu", c.nu, "Bessel order, > -1")->capture_default_str();
}

void add_numerics(CLI::App* cmd, Config& c) {
  cmd->add_option("--M", c.order, "Nystrom quadrature order")->capture_default_str();
  cmd->add_option("--lambda", c.lambda, "Airy right cutoff")->capture_default_str();
  cmd->add_option("--mu", c.mu, "Bessel left cutoff")->capture_default_str();
}

void add_output(CLI::App* cmd, Config& c) {
  cmd->add_option("--output", c.output, "write data to this file instead of stdout");
  cmd->add_option("--format", c.format, "csv or json")->capture_default_str();
  cmd->add_option("--threads", c.threads, "workers, 0 for JANOSSY_THREADS or all cores")
      ->capture_default_str();
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  auto number = [&](const std::string& text) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number: '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) {
      throw std::invalid_argument("not a finite number: '" + text + "'");
    }
    return v;
  };
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (!spec.empty() && spec.back() == ':') parts.push_back("");
  if (parts.size() == 1) return {number(parts[0])};
  if (parts.size() != 3) throw std::invalid_argument("expected start:stop:step, got '" + spec + "'");
  const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (stop < start) throw std::invalid_argument("empty grid: stop < start");
  const double span = (stop - start) / step + 1e-9;
  if (span > 1e7) throw std::invalid_argument("grid has more than 1e7 points");
  const auto count = static_cast<std::size_t>(std::floor(span)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
  return grid;
}

std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Joint distributions of extreme points of determinantal point processes"};
  app.require_subcommand(1);

  auto* gap = app.add_subcommand("gap", "gap probabilities E_0..E_p on a grid of s");
  add_family(gap, c);
  gap->add_option("--s", c.s_spec, "grid start:stop:step or a number")->required();
  gap->add_option("--p", c.p, "largest number of points counted")->capture_default_str();
  gap->add_option("--route", c.route, "nystrom (the only route for unconditioned gaps)");
  add_numerics(gap, c);
  add_output(gap, c);

  auto* joint = app.add_subcommand("joint", "joint density P12(t, s) of the two extreme points");
  add_family(joint, c);
  joint->add_option("--t", c.t_spec, "grid of the first point")->required();
  joint->add_option("--s", c.s_spec, "grid of the second point")->required();
  joint->add_option("--route", c.route, "tw or nystrom")->capture_default_str();
  joint->add_option("--epsilon", c.epsilon, "imaginary part of the locus")->capture_default_str();
  joint->add_flag("--singular", c.singular, "bessel: t and s are singular values");
  add_numerics(joint, c);
  add_output(joint, c);

  auto* validate = app.add_subcommand("validate", "TW integral against Nystrom -log Det");
  add_family(validate, c);
  validate->add_option("--t", c.t_spec, "locus or grid of loci")->required();
  validate->add_option("--s", c.s_spec, "grid of endpoints")->required();
  validate->add_option("--epsilon", c.epsilon, "imaginary part of the locus")
      ->capture_default_str();
  validate->add_option("--threshold", c.threshold, "largest accepted |relative deviation|")
      ->capture_default_str();
  add_numerics(validate, c);
  add_output(validate, c);

  auto* sample = app.add_subcommand("sample", "scaled extreme pairs of random matrices");
  sample->add_option("--ensemble", c.ensemble, "gue or wishart")->capture_default_str();
  sample->add_option("--n", c.n, "matrix size")->capture_default_str();
  sample->add_option("--nu", c.nu, "wishart: extra columns")->capture_default_str();
  sample->add_option("--count", c.count, "number of pairs")->capture_default_str();
  sample->add_option("--seed", c.seed, "random seed")->capture_default_str();
  add_output(sample, c);

  auto* selftest = app.add_subcommand("selftest", "discrete and sine-kernel identity checks");
  selftest->add_option("--seed", c.seed, "seed of the random DPPs")->capture_default_str();
  add_output(selftest, c);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  c.route_given = gap->count("--route") > 0;
  try {
    validate_common(c);
    Json meta;
    Table table;
    int code = kExitOk;
    if (*gap) {
      meta = base_meta("gap", c);
      table = cmd_gap(c, meta, err);
    } else if (*joint) {
      meta = base_meta("joint", c);
      table = cmd_joint(c, meta, err);
    } else if (*validate) {
      meta = base_meta("validate", c);
      double max_dev = 0.0;
      table = cmd_validate(c, meta, err, max_dev);
      const bool ok = std::abs(max_dev) <= c.threshold;
      err << "max |relative deviation| " << format_number(max_dev) << " threshold "
          << format_number(c.threshold) << (ok ? " PASS" : " FAIL") << "\n";
      if (!ok) code = kExitNumerical;
    } else if (*sample) {
      table = cmd_sample(c, meta, err);
    } else {
      bool passed = true;
      table = cmd_selftest(c, meta, passed);
      if (!passed) code = kExitNumerical;
    }
    if (c.output.empty()) {
      emit(table, meta, c, out);
    } else {
      std::ofstream file(c.output, std::ios::binary);
      if (!file) throw ConfigError("cannot open output file '" + c.output + "'");
      emit(table, meta, c, file);
      if (!file) throw ConvergenceError("failed writing '" + c.output + "'");
    }
    return code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace janossy::cli
