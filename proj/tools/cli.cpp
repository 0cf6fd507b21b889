#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "trisieve/copula.hpp"
#include "trisieve/dataset.hpp"
#include "trisieve/estimator.hpp"
#include "trisieve/identlab.hpp"
#include "trisieve/inference.hpp"
#include "trisieve/numerics.hpp"
#include "trisieve/report.hpp"
#include "trisieve/simulation.hpp"

namespace trisieve::cli {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    if (!cur.empty()) {
      out.push_back(cur);
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot write '" + path + "'");
  }
  out << text;
  if (!out) {
    throw std::invalid_argument("write to '" + path + "' failed");
  }
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("cannot parse '" + path + "': " + e.what());
  }
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) {
      throw std::invalid_argument(s);
    }
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("cannot parse ") + what + " '" + s + "'");
  }
}

BootstrapWeights parse_weights(const std::string& s) {
  if (s == "exponential") {
    return BootstrapWeights::Exponential;
  }
  if (s == "lognormal") {
    return BootstrapWeights::LogNormal;
  }
  if (s == "unit") {
    return BootstrapWeights::Unit;
  }
  throw std::invalid_argument("unknown bootstrap weights '" + s + "'");
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string csv;
  std::string y = "y";
  std::string d = "d";
  std::string x;
  std::string z;
  std::vector<std::string> models{"parametric"};
  std::string copula = "gaussian";
  std::string g = "normal";
  std::string kn = "auto";
  std::string marginal = "location-scale";
  std::vector<std::string> pin_alpha;
  std::vector<std::string> pin_beta;
  std::string ate_x;
  int boot = 0;
  std::string weights = "exponential";
  std::vector<double> levels{0.95};
  std::uint64_t seed = 20240101;
  int threads = 0;
  int max_iter = 500;
  std::string out;
};

void add_estimate(CLI::App& app, EstimateArgs& a) {
  app.add_option("csv", a.csv, "input CSV with a header row")->required();
  app.add_option("--y", a.y, "outcome column");
  app.add_option("--d", a.d, "treatment column");
  app.add_option("--x", a.x, "comma-separated covariate columns (default: names starting with x)");
  app.add_option("--z", a.z, "comma-separated instrument columns (default: names starting with z)");
  app.add_option("--model", a.models, "parametric and/or sieve (comma-separated for several blocks)")
      ->delimiter(',')
      ->check(CLI::IsMember({"parametric", "sieve"}));
  app.add_option("--copula", a.copula, "gaussian, frank, clayton or gumbel");
  app.add_option("--g", a.g, "reference distribution G: normal, t3 or logistic");
  app.add_option("--kn", a.kn, "sieve order: an integer or auto");
  app.add_option("--marginal", a.marginal, "parametric marginals: location-scale or fixed")
      ->check(CLI::IsMember({"location-scale", "fixed"}));
  app.add_option("--pin-alpha", a.pin_alpha, "column=value pinned in the treatment equation (default: first x = -1)");
  app.add_option("--pin-beta", a.pin_beta, "column=value pinned in the outcome equation (default: first x = -1)");
  app.add_option("--ate-x", a.ate_x, "comma-separated ATE evaluation point (default: column means)");
  app.add_option("--boot", a.boot, "weighted-bootstrap draws (0 for none)")->check(CLI::NonNegativeNumber);
  app.add_option("--boot-weights", a.weights, "exponential, lognormal or unit");
  app.add_option("--level", a.levels, "interval levels")->delimiter(',');
  app.add_option("--seed", a.seed, "random seed");
  app.add_option("--threads", a.threads, "worker threads (default: TRISIEVE_THREADS or all cores)");
  app.add_option("--max-iter", a.max_iter, "optimizer iteration cap per start")->check(CLI::PositiveNumber);
  app.add_option("--out", a.out, "machine-readable output (JSON lines)");
}

std::vector<std::pair<int, double>> resolve_pins(const std::vector<std::string>& pins, const Dataset& data) {
  std::vector<std::pair<int, double>> out;
  if (pins.empty()) {
    out.emplace_back(0, -1.0);
    return out;
  }
  for (const auto& p : pins) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("pin '" + p + "' must look like column=value");
    }
    const std::string col = p.substr(0, eq);
    const auto it = std::find(data.x_names.begin(), data.x_names.end(), col);
    if (it == data.x_names.end()) {
      throw std::invalid_argument("pin refers to unknown covariate column '" + col + "'");
    }
    out.emplace_back(static_cast<int>(it - data.x_names.begin()), parse_double(p.substr(eq + 1), "pin value"));
  }
  return out;
}

ModelSpec build_spec(const std::string& model, const EstimateArgs& a, const Dataset& data, int* order) {
  ModelSpec spec;
  spec.copula = parse_copula_family(a.copula);
  const TransformG g = parse_transform(a.g);
  const Normalization pinned =
      Normalization::fixed_coefficient(resolve_pins(a.pin_alpha, data), resolve_pins(a.pin_beta, data));
  *order = 0;
  if (model == "parametric") {
    if (a.marginal == "fixed") {
      spec.eps = MarginalSpec::fixed(g);
      spec.nu = MarginalSpec::fixed(g);
      spec.normalization = Normalization::mean_var_unit();
    } else {
      spec.eps = MarginalSpec::location_scale(g);
      spec.nu = MarginalSpec::location_scale(g);
      spec.normalization = pinned;
    }
  } else {
    int k = 0;
    if (a.kn == "auto") {
      k = SieveOrderPolicy{}.order_for(static_cast<std::size_t>(data.n()));
    } else {
      const double v = parse_double(a.kn, "--kn");
      if (v < 0 || v != static_cast<int>(v)) {
        throw std::invalid_argument("--kn must be a nonnegative integer or auto");
      }
      k = static_cast<int>(v);
    }
    *order = k;
    spec.eps = MarginalSpec::sieve(g, k);
    spec.nu = MarginalSpec::sieve(g, k);
    spec.normalization = pinned;
  }
  spec.validate(data.kx(), data.kz());
  return spec;
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  CsvColumns cols;
  cols.y = a.y;
  cols.d = a.d;
  cols.x = split_list(a.x);
  cols.z = split_list(a.z);
  const Dataset data = read_csv(a.csv, cols);
  if (data.kx() == 0) {
    throw DataError("no covariate columns selected");
  }
  Eigen::VectorXd x = data.x_means();
  if (!a.ate_x.empty()) {
    const auto parts = split_list(a.ate_x);
    if (static_cast<Eigen::Index>(parts.size()) != data.kx()) {
      throw std::invalid_argument("--ate-x needs " + std::to_string(data.kx()) + " values");
    }
    for (std::size_t j = 0; j < parts.size(); ++j) {
      x[static_cast<Eigen::Index>(j)] = parse_double(parts[j], "--ate-x");
    }
  }
  const BootstrapWeights weights = parse_weights(a.weights);

  std::vector<ModelSpec> specs;
  std::vector<int> orders;
  for (const auto& m : a.models) {
    int k = 0;
    specs.push_back(build_spec(m, a, data, &k));
    orders.push_back(k);
  }

  Json config;
  config["csv"] = a.csv;
  config["n"] = data.n();
  config["y"] = a.y;
  config["d"] = a.d;
  config["x"] = data.x_names;
  config["z"] = data.z_names;
  Json models = Json::array();
  for (std::size_t m = 0; m < specs.size(); ++m) {
    models.push_back({{"label", a.models[m]}, {"spec", to_json(specs[m])}});
  }
  config["models"] = models;
  config["ate_x"] = std::vector<double>(x.data(), x.data() + x.size());
  config["boot"] = a.boot;
  config["boot_weights"] = a.weights;
  config["levels"] = a.levels;
  config["max_iter"] = a.max_iter;

  FitOptions fo;
  fo.seed = a.seed;
  fo.optimizer.max_iter = a.max_iter;
  std::string records = run_header("estimate", a.seed, config).dump() + "\n";
  bool all_converged = true;

  for (std::size_t m = 0; m < specs.size(); ++m) {
    const ModelSpec& spec = specs[m];
    const FitResult fit = fit_model(data, spec, fo);
    all_converged = all_converged && fit.converged;
    Json block;
    block["block"] = a.models[m];
    if (spec.is_sieve()) {
      block["kn"] = orders[m];
    }
    block["fit"] = to_json(fit);

    out << "== " << a.models[m] << " (copula " << to_string(spec.copula);
    if (spec.is_sieve()) {
      out << ", G = " << spec.eps.base.name() << ", k_n = " << orders[m];
    }
    out << ", n = " << data.n() << ") ==\n";

    std::optional<EfficientScoreFit> es;
    try {
      es = efficient_score_variance(fit, data);
      block["efficient_score"] = to_json(*es);
    } catch (const NumericalError& e) {
      block["efficient_score"] = {{"error", e.what()}};
      err << "warning: efficient-score SEs unavailable: " << e.what() << "\n";
    }
    out << fit_table(fit, es ? &*es : nullptr);

    try {
      const AteVariance av = ate_variance(fit, data, x);
      block["ate"] = {{"x", config["ate_x"]}, {"value", av.ate}, {"se", av.se}, {"sigma2", av.sigma2}};
      out << "ATE " << fixed(av.ate) << " (SE " << fixed(av.se) << ")\n";
    } catch (const NumericalError& e) {
      const double v = ate(spec, fit.theta_hat, x);
      block["ate"] = {{"x", config["ate_x"]}, {"value", v}, {"error", e.what()}};
      out << "ATE " << fixed(v) << " (SE unavailable)\n";
    }

    if (a.boot > 0) {
      std::vector<Target> targets;
      for (const auto& p : fit.map.params()) {
        if (p.role == ParamRole::Alpha) {
          targets.push_back(Target::alpha(p.index, p.name));
        } else if (p.role == ParamRole::Beta) {
          targets.push_back(Target::beta(p.index, p.name));
        } else if (p.role == ParamRole::Gamma) {
          targets.push_back(Target::gamma(p.index, p.name));
        }
      }
      targets.push_back(Target::delta1());
      targets.push_back(Target::rho_spearman());
      targets.push_back(Target::ate(x));
      BootstrapOptions bo;
      bo.B = a.boot;
      bo.seed = a.seed;
      bo.weights = weights;
      bo.levels = a.levels;
      bo.threads = a.threads;
      bo.optimizer = fo.optimizer;
      const BootstrapResult br = weighted_bootstrap(data, fit, targets, bo);
      block["bootstrap"] = to_json(br);
      out << "bootstrap: B = " << br.B << ", " << br.failures << " failed\n";
      char line[160];
      std::snprintf(line, sizeof line, "%-16s%12s%12s", "target", "point", "boot SE");
      out << line;
      for (double lv : a.levels) {
        std::snprintf(line, sizeof line, "%24s", ("PCI " + fixed(lv, 2)).c_str());
        out << line;
      }
      out << "\n";
      for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        std::snprintf(line, sizeof line, "%-16s%12s%12s", targets[t].name.c_str(), fixed(br.point[ti]).c_str(),
                      fixed(br.se[ti]).c_str());
        out << line;
        for (const auto& iv : br.pci[t]) {
          const std::string s = "[" + fixed(iv.lower) + ", " + fixed(iv.upper) + "]";
          std::snprintf(line, sizeof line, "%24s", s.c_str());
          out << line;
        }
        out << "\n";
      }
    }
    out << "\n";
    records += block.dump() + "\n";
  }
  if (!a.out.empty()) {
    write_file(a.out, records);
  }
  if (!all_converged) {
    err << "error: at least one fit did not converge\n";
    return kExitNumerical;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate, draw, coverage

struct SimulateArgs {
  std::string preset;
  std::string config;
  int reps = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  std::string out;
  std::string table;
  std::string estimates;
};

Scenario resolve_scenario(const SimulateArgs& a) {
  if (a.preset.empty() == a.config.empty()) {
    throw std::invalid_argument("give either a preset name or --config");
  }
  Scenario s = a.config.empty() ? make_preset(a.preset) : scenario_from_json(read_json(a.config));
  if (a.reps > 0) {
    s.replications = a.reps;
  }
  if (a.n > 0) {
    s.n = a.n;
  }
  if (a.seed_set) {
    s.seed = a.seed;
  }
  s.threads = a.threads;
  s.validate();
  return s;
}

void add_scenario_options(CLI::App& app, SimulateArgs& a) {
  app.add_option("preset", a.preset, "preset name (see `presets list`)");
  app.add_option("--config", a.config, "scenario JSON file")->excludes(app.get_option("preset"));
  app.add_option("--reps", a.reps, "override the number of replications")->check(CLI::PositiveNumber);
  app.add_option("--n", a.n, "override the sample size")->check(CLI::PositiveNumber);
  app.add_option_function<std::uint64_t>(
      "--seed",
      [&a](const std::uint64_t& v) {
        a.seed = v;
        a.seed_set = true;
      },
      "override the scenario seed");
  app.add_option("--threads", a.threads, "worker threads (default: TRISIEVE_THREADS or all cores)");
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const Scenario s = resolve_scenario(a);
  const McSummary summary = run_monte_carlo(s);
  const Json header = run_header("simulate", s.seed, to_json(s));
  const std::string table = mc_table(summary);
  out << table;
  if (!a.out.empty()) {
    write_file(a.out, mc_records(summary, header));
  }
  if (!a.table.empty()) {
    write_file(a.table, "# " + header.dump() + "\n" + table);
  }
  if (!a.estimates.empty()) {
    std::ostringstream os;
    os << "# " << header.dump() << "\n";
    os << "replication,model";
    for (const auto& t : summary.targets) {
      os << "," << t;
    }
    os << "\n";
    char buf[32];
    for (std::size_t m = 0; m < summary.models.size(); ++m) {
      const Eigen::MatrixXd& e = summary.estimates[m];
      for (Eigen::Index r = 0; r < e.rows(); ++r) {
        os << summary.replication_index[static_cast<std::size_t>(r)] << "," << summary.models[m];
        for (Eigen::Index t = 0; t < e.cols(); ++t) {
          std::snprintf(buf, sizeof buf, ",%.17g", e(r, t));
          os << buf;
        }
        os << "\n";
      }
    }
    write_file(a.estimates, os.str());
  }
  return kExitOk;
}

struct DrawArgs {
  SimulateArgs scenario;
  std::uint64_t rep = 0;
  std::string out;
};

int cmd_draw(const DrawArgs& a, std::ostream& out) {
  const Scenario s = resolve_scenario(a.scenario);
  const Dataset data = simulate_dataset(s, a.rep);
  const std::string csv = to_csv(data);
  if (a.out.empty()) {
    out << csv;
  } else {
    write_file(a.out, csv);
  }
  return kExitOk;
}

CoverageStudy coverage_from_json(const Json& j) {
  CoverageStudy c;
  if (!j.contains("id") || !j.contains("scenario")) {
    throw std::invalid_argument("config: coverage study needs 'id' and 'scenario'");
  }
  c.id = j.at("id").get<std::string>();
  c.scenario = scenario_from_json(j.at("scenario"));
  c.bootstrap_draws = j.value("bootstrap_draws", c.bootstrap_draws);
  c.level = j.value("level", c.level);
  c.weights = parse_weights(j.value("weights", std::string("exponential")));
  return c;
}

struct CoverageArgs {
  SimulateArgs scenario;
  int boot = 0;
};

int cmd_coverage(const CoverageArgs& a, std::ostream& out) {
  const SimulateArgs& sa = a.scenario;
  if (sa.preset.empty() == sa.config.empty()) {
    throw std::invalid_argument("give either a coverage preset name or --config");
  }
  CoverageStudy c = sa.config.empty() ? make_coverage_preset(sa.preset) : coverage_from_json(read_json(sa.config));
  if (sa.reps > 0) {
    c.scenario.replications = sa.reps;
  }
  if (sa.n > 0) {
    c.scenario.n = sa.n;
  }
  if (sa.seed_set) {
    c.scenario.seed = sa.seed;
  }
  if (a.boot > 0) {
    c.bootstrap_draws = a.boot;
  }
  c.scenario.threads = sa.threads;
  c.scenario.validate();
  const CoverageSummary summary = run_coverage_study(c);
  const Json header = run_header("coverage", c.scenario.seed, to_json(c));
  out << coverage_table(summary);
  if (!sa.out.empty()) {
    std::string text = header.dump() + "\n";
    Json body = to_json(summary);
    for (auto& row : body["rows"]) {
      Json r;
      r["study"] = summary.id;
      for (auto it = row.begin(); it != row.end(); ++it) {
        r[it.key()] = it.value();
      }
      text += r.dump() + "\n";
    }
    body.erase("rows");
    text += body.dump() + "\n";
    write_file(sa.out, text);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// identlab

int cmd_counterexample(const std::string& path, std::ostream& out) {
  const BinaryCounterexample ex = BinaryCounterexample::paper();
  const CounterexampleReport rep = verify_binary_counterexample(ex);
  constexpr double kTol = 1e-14;
  const bool pass = rep.max_discrepancy <= kTol;
  out << "binary counterexample: set A independence, set B comonotone\n";
  out << "  x  cell      set A      set B\n";
  const char* names[4] = {"p11", "p10", "p01", "p00"};
  const int yd[4][2] = {{1, 1}, {1, 0}, {0, 1}, {0, 0}};
  Json cells = Json::array();
  for (int x = 0; x < 2; ++x) {
    for (int c = 0; c < 4; ++c) {
      const double pa = rep.cells[static_cast<std::size_t>(x)][0].get(yd[c][0], yd[c][1]);
      const double pb = rep.cells[static_cast<std::size_t>(x)][1].get(yd[c][0], yd[c][1]);
      char line[96];
      std::snprintf(line, sizeof line, "  %d  %-4s  %.12f  %.12f\n", x, names[c], pa, pb);
      out << line;
      cells.push_back({{"x", x}, {"cell", names[c]}, {"a", pa}, {"b", pb}});
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1e", rep.max_discrepancy);
  out << "max discrepancy " << buf << " (tolerance 1e-14) " << (pass ? "PASS" : "FAIL") << "\n";
  if (!path.empty()) {
    Json cfg = {{"demo", "binary-counterexample"}, {"tolerance", kTol}};
    std::string text = run_header("identlab", 0, cfg).dump() + "\n";
    text += Json({{"cells", cells}, {"max_discrepancy", rep.max_discrepancy}, {"pass", pass}}).dump() + "\n";
    write_file(path, text);
  }
  return pass ? kExitOk : kExitNumerical;
}

int cmd_failure(const FailureOptions& o, const std::string& path, std::ostream& out) {
  const FailureDistribution f = solve_failure_distribution(o);
  const bool pass = f.converged && f.strictly_increasing && f.sup_deviation > 0.0 && f.sup_deviation < 0.1;
  out << "failure distribution (q = t = Phi, rho = 0 vs rho* = 1)\n";
  out << "  delta1*            " << fixed(f.delta1_star, 6) << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", f.residual);
  out << "  residual sup-norm  " << buf << " after " << f.iterations << " iterations\n";
  out << "  strictly increasing " << (f.strictly_increasing ? "yes" : "no") << "\n";
  out << "  sup |F~ - Phi| on [-3,3]  " << fixed(f.sup_deviation, 6) << "\n";
  out << (pass ? "PASS" : "FAIL") << "\n";
  if (!path.empty()) {
    Json cfg = {{"demo", "failure-distribution"},
                {"grid_points", o.grid_points},
                {"grid_half_width", o.grid_half_width},
                {"knots", o.knots},
                {"knot_half_width", o.knot_half_width},
                {"smoothness", o.smoothness},
                {"ridge", o.ridge},
                {"damping", o.damping},
                {"tolerance", o.tolerance},
                {"max_iter", o.max_iter}};
    std::ostringstream os;
    os << "# " << run_header("identlab", 0, cfg).dump() << "\n";
    os << "# delta1_star=" << f.delta1_star << " residual=" << f.residual << "\n";
    os << "v,F_tilde,Phi\n";
    char line[96];
    for (int i = 0; i <= 600; ++i) {
      const double v = -3.0 + i * 0.01;
      std::snprintf(line, sizeof line, "%.2f,%.10f,%.10f\n", v, f.cdf(v), numerics::norm_cdf(v));
      os << line;
    }
    write_file(path, os.str());
  }
  return pass ? kExitOk : kExitNumerical;
}

int cmd_positivity(const std::string& family, int grid, int rho_count, const std::string& path, std::ostream& out) {
  std::vector<CopulaFamily> fams;
  if (family == "all") {
    fams.assign(kAllCopulaFamilies.begin(), kAllCopulaFamilies.end());
  } else {
    fams.push_back(parse_copula_family(family));
  }
  const auto u = interior_unit_grid(grid);
  bool ok = true;
  Json rows = Json::array();
  for (CopulaFamily f : fams) {
    const auto r = positivity_scan(f, default_rho_grid(f, rho_count), u);
    ok = ok && r.ok();
    char line[128];
    std::snprintf(line, sizeof line, "%-8s points %6zu  min Crho %.3e  violations %zu  %s\n", to_string(f).c_str(),
                  r.points_checked, r.min_crho, r.violations.size(), r.ok() ? "PASS" : "FAIL");
    out << line;
    rows.push_back(to_json(r));
  }
  if (!path.empty()) {
    Json cfg = {{"demo", "positivity"}, {"family", family}, {"grid", grid}, {"rho_count", rho_count}};
    std::string text = run_header("identlab", 0, cfg).dump() + "\n";
    for (const auto& r : rows) {
      text += r.dump() + "\n";
    }
    write_file(path, text);
  }
  return ok ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------------------
// presets

int cmd_presets_list(std::ostream& out) {
  for (const auto& name : preset_names()) {
    out << name << "  " << make_preset(name).description << "\n";
  }
  for (const auto& name : coverage_preset_names()) {
    out << name << "  coverage study\n";
  }
  return kExitOk;
}

int cmd_presets_show(const std::string& name, std::ostream& out) {
  const auto cov = coverage_preset_names();
  if (std::find(cov.begin(), cov.end(), name) != cov.end()) {
    out << to_json(make_coverage_preset(name)).dump(2) << "\n";
  } else {
    out << to_json(make_preset(name)).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_presets_export(const std::string& dir, std::ostream& out) {
  int count = 0;
  for (const auto& name : preset_names()) {
    write_file(dir + "/" + name + ".json", to_json(make_preset(name)).dump(2) + "\n");
    ++count;
  }
  for (const auto& name : coverage_preset_names()) {
    write_file(dir + "/" + name + ".json", to_json(make_coverage_preset(name)).dump(2) + "\n");
    ++count;
  }
  out << "wrote " << count << " presets to " << dir << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Triangular binary-choice models with a dummy endogenous regressor: parametric and sieve copula ML"};
  app.name("trisieve");
  app.set_version_flag("--version", software_version());
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "fit models to a CSV file");
  add_estimate(*estimate, est);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo scenario");
  add_scenario_options(*simulate, sim);
  simulate->add_option("--out", sim.out, "machine-readable summary (JSON lines)");
  simulate->add_option("--table", sim.table, "aligned-text table file");
  simulate->add_option("--estimates", sim.estimates, "per-replication estimates (CSV)");

  DrawArgs draw;
  auto* drawc = app.add_subcommand("draw", "write one simulated dataset of a scenario as CSV");
  add_scenario_options(*drawc, draw.scenario);
  drawc->add_option("--rep", draw.rep, "replication index");
  drawc->add_option("--out", draw.out, "output CSV (default: stdout)");

  CoverageArgs cov;
  auto* coverage = app.add_subcommand("coverage", "bootstrap coverage study");
  add_scenario_options(*coverage, cov.scenario);
  coverage->add_option("--boot", cov.boot, "override the bootstrap draws")->check(CLI::PositiveNumber);
  coverage->add_option("--out", cov.scenario.out, "machine-readable summary (JSON lines)");

  auto* ident = app.add_subcommand("identlab", "identification demonstrations");
  ident->require_subcommand(1);
  std::string ce_out;
  auto* ce = ident->add_subcommand("binary-counterexample", "observationally equivalent pair without an instrument");
  ce->add_option("--out", ce_out, "machine-readable report");
  FailureOptions fo;
  std::string fd_out;
  auto* fd = ident->add_subcommand("failure-distribution", "solve for the distribution that defeats identification");
  fd->add_option("--grid-points", fo.grid_points, "covariate grid size");
  fd->add_option("--knots", fo.knots, "knots of the quantile perturbation");
  fd->add_option("--tolerance", fo.tolerance, "residual sup-norm tolerance");
  fd->add_option("--max-iter", fo.max_iter, "iteration cap");
  fd->add_option("--out", fd_out, "plot-ready CSV of F~ and Phi on [-3,3]");
  std::string pos_family = "all";
  int pos_grid = 19;
  int pos_rho = 9;
  std::string pos_out;
  auto* pos = ident->add_subcommand("positivity", "check dC/drho > 0 on an interior grid");
  pos->add_option("--family", pos_family, "copula family or all");
  pos->add_option("--grid", pos_grid, "interior points per axis")->check(CLI::PositiveNumber);
  pos->add_option("--rho-count", pos_rho, "dependence values per family")->check(CLI::PositiveNumber);
  pos->add_option("--out", pos_out, "machine-readable report");

  auto* cop = app.add_subcommand("copula", "copula utilities");
  cop->require_subcommand(1);
  std::string c_family;
  double c_a = 0.0;
  double c_u = 0.0;
  double c_v = 0.0;
  int digits = 4;
  cop->add_option("--digits", digits, "decimal places")->check(CLI::Range(0, 17));
  auto* sp = cop->add_subcommand("spearman", "Spearman rho of a native parameter");
  sp->add_option("family", c_family)->required();
  sp->add_option("rho", c_a)->required();
  auto* fs = cop->add_subcommand("from-spearman", "native parameter for a Spearman rho");
  fs->add_option("family", c_family)->required();
  fs->add_option("rho_sp", c_a)->required();
  auto* cdf = cop->add_subcommand("cdf", "C(u, v; rho)");
  cdf->add_option("family", c_family)->required();
  cdf->add_option("rho", c_a)->required();
  cdf->add_option("u", c_u)->required();
  cdf->add_option("v", c_v)->required();

  auto* presets = app.add_subcommand("presets", "list, show or export scenario presets");
  presets->require_subcommand(1);
  auto* plist = presets->add_subcommand("list", "preset names");
  std::string show_name;
  auto* pshow = presets->add_subcommand("show", "print one preset as JSON");
  pshow->add_option("name", show_name)->required();
  std::string export_dir = "presets";
  auto* pexport = presets->add_subcommand("export", "write every preset as JSON");
  pexport->add_option("--dir", export_dir, "target directory (must exist)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (estimate->parsed()) {
      return cmd_estimate(est, out, err);
    }
    if (simulate->parsed()) {
      return cmd_simulate(sim, out);
    }
    if (drawc->parsed()) {
      return cmd_draw(draw, out);
    }
    if (coverage->parsed()) {
      return cmd_coverage(cov, out);
    }
    if (ce->parsed()) {
      return cmd_counterexample(ce_out, out);
    }
    if (fd->parsed()) {
      return cmd_failure(fo, fd_out, out);
    }
    if (pos->parsed()) {
      return cmd_positivity(pos_family, pos_grid, pos_rho, pos_out, out);
    }
    if (sp->parsed() || fs->parsed() || cdf->parsed()) {
      const CopulaFamily f = parse_copula_family(c_family);
      double v = 0.0;
      if (sp->parsed()) {
        v = copula::spearman_rho(DependenceParam(f, c_a));
      } else if (fs->parsed()) {
        v = copula::from_spearman(f, c_a).rho();
      } else {
        v = copula::cdf(DependenceParam(f, c_a), c_u, c_v);
      }
      out << fixed(v, digits) << "\n";
      return kExitOk;
    }
    if (plist->parsed()) {
      return cmd_presets_list(out);
    }
    if (pshow->parsed()) {
      return cmd_presets_show(show_name, out);
    }
    if (pexport->parsed()) {
      return cmd_presets_export(export_dir, out);
    }
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace trisieve::cli
