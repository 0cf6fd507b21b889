#include "trisieve/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "trisieve/numerics.hpp"
#include "trisieve/parallel.hpp"
#include "trisieve/rng.hpp"

namespace trisieve {

namespace {

// Stream families derived from a scenario seed.
constexpr std::uint64_t kFitStream = 0x5f17;
constexpr std::uint64_t kBootStream = 0xb007;

Dataset simulate_with(const Dgp& dgp, const std::optional<DependenceParam>& dep, std::size_t n,
                      std::uint64_t seed, std::uint64_t rep, Eigen::MatrixXd* latent) {
  const Eigen::Index kx = dgp.kx();
  const Eigen::Index kz = dgp.kz();
  const Eigen::Index kc = kx + kz;
  const auto rows = static_cast<Eigen::Index>(n);
  RngStream rng(seed, rep);

  const Eigen::MatrixXd L = dgp.covariate_corr.llt().matrixL();
  Eigen::MatrixXd cov(rows, kc);
  Eigen::VectorXd e(kc);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < kc; ++j) {
      e[j] = rng.normal();
    }
    cov.row(i) = (L * e).transpose();
  }
  std::vector<std::array<double, 2>> u;
  if (dep) {
    u = copula::sample(*dep, n, rng);
  } else {
    u.resize(n);
    for (auto& p : u) {
      p[0] = rng.uniform();
      p[1] = p[0];
    }
  }

  Dataset data;
  data.y.resize(rows);
  data.d.resize(rows);
  data.x = cov.leftCols(kx);
  data.z = cov.rightCols(kz);
  for (Eigen::Index j = 0; j < kx; ++j) {
    data.x_names.push_back("x" + std::to_string(j + 1));
  }
  for (Eigen::Index j = 0; j < kz; ++j) {
    data.z_names.push_back("z" + std::to_string(j + 1));
  }
  if (latent != nullptr) {
    latent->resize(rows, 2);
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& ui = u[static_cast<std::size_t>(i)];
    const double eps = dgp.eps.quantile(ui[0]);
    const double nu = dgp.nu.quantile(ui[1]);
    const double idx_d = data.x.row(i).dot(dgp.alpha) + data.z.row(i).dot(dgp.gamma);
    const int d = idx_d >= nu ? 1 : 0;
    const double idx_y = data.x.row(i).dot(dgp.beta) + d * dgp.delta1;
    data.d[i] = d;
    data.y[i] = idx_y >= eps ? 1 : 0;
    if (latent != nullptr) {
      (*latent)(i, 0) = eps;
      (*latent)(i, 1) = nu;
    }
  }
  return data;
}

std::optional<DependenceParam> dgp_dependence(const Dgp& dgp) {
  if (dgp.comonotone) {
    return std::nullopt;
  }
  return dgp.dependence();
}

bool same_normalization(const Normalization& a, const Normalization& b) {
  return a.scheme == b.scheme && a.alpha_pinned == b.alpha_pinned && a.beta_pinned == b.beta_pinned;
}

// Index of an earlier model usable as the parametric warm start of model m.
int warm_source(const Scenario& s, std::size_t m) {
  const FittedModel& fm = s.models[m];
  if (!fm.sieve) {
    return -1;
  }
  for (std::size_t j = 0; j < m; ++j) {
    const FittedModel& c = s.models[j];
    if (!c.sieve && c.copula == fm.copula && same_normalization(c.normalization, fm.normalization)) {
      return static_cast<int>(j);
    }
  }
  return -1;
}

}  // namespace

DependenceParam Dgp::dependence() const { return copula::from_spearman(copula, rho_sp); }

double Dgp::true_ate(const Eigen::VectorXd& x) const {
  const double i0 = x.dot(beta);
  return eps.cdf(i0 + delta1) - eps.cdf(i0);
}

void Dgp::validate() const {
  if (beta.size() != alpha.size()) {
    throw std::invalid_argument("dgp: alpha and beta lengths differ");
  }
  const Eigen::Index kc = kx() + kz();
  if (covariate_corr.rows() != kc || covariate_corr.cols() != kc) {
    throw std::invalid_argument("dgp: covariate correlation matrix has the wrong size");
  }
  if (((covariate_corr.diagonal().array() - 1.0).abs() > 1e-12).any()) {
    throw std::invalid_argument("dgp: covariate correlation matrix needs a unit diagonal");
  }
  if (covariate_corr.llt().info() != Eigen::Success) {
    throw std::invalid_argument("dgp: covariate correlation matrix is not positive definite");
  }
  if (!comonotone) {
    (void)dependence();
  }
}

std::string Dgp::describe() const {
  std::ostringstream os;
  os << "copula=" << (comonotone ? std::string("comonotone") : to_string(copula)) << " rho_sp=" << rho_sp
     << " eps=" << eps.describe() << " nu=" << nu.describe() << " delta1=" << delta1;
  return os.str();
}

ModelSpec FittedModel::spec_for(std::size_t n) const {
  ModelSpec spec;
  spec.copula = copula;
  spec.normalization = normalization;
  if (sieve) {
    const int k = order_policy.order_for(n);
    spec.eps = MarginalSpec::sieve(g, k);
    spec.nu = MarginalSpec::sieve(g, k);
  } else {
    spec.eps = MarginalSpec::location_scale(TransformG(TransformKind::StandardNormal));
    spec.nu = MarginalSpec::location_scale(TransformG(TransformKind::StandardNormal));
  }
  return spec;
}

Eigen::VectorXd Scenario::ate_point() const {
  return ate_x.size() == 0 ? Eigen::VectorXd::Zero(dgp.kx()) : ate_x;
}

void Scenario::validate() const {
  dgp.validate();
  if (n < 2) {
    throw std::invalid_argument("scenario: n must be at least 2");
  }
  if (replications < 1) {
    throw std::invalid_argument("scenario: replications must be positive");
  }
  if (models.empty()) {
    throw std::invalid_argument("scenario: no fitted models");
  }
  if (ate_x.size() != 0 && ate_x.size() != dgp.kx()) {
    throw std::invalid_argument("scenario: ATE point has the wrong length");
  }
  for (const auto& m : models) {
    m.spec_for(n).validate(dgp.kx(), dgp.kz());
  }
}

Dataset simulate_dataset(const Dgp& dgp, std::size_t n, std::uint64_t seed, std::uint64_t rep,
                         Eigen::MatrixXd* latent) {
  return simulate_with(dgp, dgp_dependence(dgp), n, seed, rep, latent);
}

Dataset simulate_dataset(const Dgp& dgp, std::size_t n, std::uint64_t seed, std::uint64_t rep) {
  return simulate_dataset(dgp, n, seed, rep, nullptr);
}

Dataset simulate_dataset(const Scenario& scenario, std::uint64_t rep) {
  return simulate_dataset(scenario.dgp, scenario.n, scenario.seed, rep, nullptr);
}

McCell summarize_column(const std::vector<double>& values, double truth) {
  McCell c;
  c.truth = truth;
  c.replications = static_cast<int>(values.size());
  if (values.empty()) {
    return c;
  }
  const auto m = static_cast<double>(values.size());
  c.mean = numerics::pairwise_sum(values) / m;
  std::vector<double> dev(values.size());
  std::vector<double> err(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    dev[i] = (values[i] - c.mean) * (values[i] - c.mean);
    err[i] = (values[i] - truth) * (values[i] - truth);
  }
  c.sd = std::sqrt(numerics::pairwise_sum(dev) / m);
  c.bias = c.mean - truth;
  c.rmse = std::sqrt(numerics::pairwise_sum(err) / m);
  return c;
}

const McCell& McSummary::cell(const std::string& model, const std::string& target) const {
  for (const auto& c : cells) {
    if (c.model == model && c.target == target) {
      return c;
    }
  }
  throw std::out_of_range("McSummary: no cell for " + model + "/" + target);
}

McSummary run_monte_carlo(const Scenario& scenario) {
  scenario.validate();
  const std::optional<DependenceParam> dep = dgp_dependence(scenario.dgp);
  const Eigen::VectorXd x_ate = scenario.ate_point();
  const std::size_t nm = scenario.models.size();
  const auto reps = static_cast<std::size_t>(scenario.replications);
  std::vector<ModelSpec> specs;
  std::vector<int> warm;
  for (std::size_t m = 0; m < nm; ++m) {
    specs.push_back(scenario.models[m].spec_for(scenario.n));
    warm.push_back(warm_source(scenario, m));
  }

  const std::uint64_t fit_seed = derive_seed(scenario.seed, kFitStream);
  std::vector<std::optional<Eigen::MatrixXd>> results(reps);
  parallel_for(reps, scenario.threads, [&](std::size_t r) {
    try {
      const Dataset data = simulate_with(scenario.dgp, dep, scenario.n, scenario.seed, r, nullptr);
      FitOptions opts = scenario.fit;
      opts.seed = derive_seed(fit_seed, r);
      std::vector<std::optional<FitResult>> fits(nm);
      Eigen::MatrixXd est(static_cast<Eigen::Index>(nm), 4);
      for (std::size_t m = 0; m < nm; ++m) {
        const FitResult* w = warm[m] >= 0 ? &*fits[static_cast<std::size_t>(warm[m])] : nullptr;
        fits[m] = specs[m].is_sieve() ? fit_sieve(data, specs[m], opts, w) : fit_parametric(data, specs[m], opts);
        const FitResult& f = *fits[m];
        if (!f.converged) {
          return;
        }
        const auto row = static_cast<Eigen::Index>(m);
        est(row, 0) = f.theta_hat.gamma[0];
        est(row, 1) = f.theta_hat.delta1;
        est(row, 2) = fitted_spearman(f);
        est(row, 3) = ate(f.spec(), f.theta_hat, x_ate);
      }
      results[r] = std::move(est);
    } catch (const NumericalError&) {
    } catch (const DataError&) {
    } catch (const std::domain_error&) {
    }
  });

  McSummary out;
  out.scenario_id = scenario.id;
  out.targets = {"gamma", "delta1", "rho_sp", "ATE"};
  out.replications = scenario.replications;
  for (std::size_t m = 0; m < nm; ++m) {
    out.models.push_back(scenario.models[m].label);
    out.sieve_orders.push_back(specs[m].is_sieve() ? specs[m].eps.sieve_order : 0);
  }
  for (std::size_t r = 0; r < reps; ++r) {
    if (results[r]) {
      out.replication_index.push_back(static_cast<int>(r));
    } else {
      ++out.failures;
    }
  }
  if (static_cast<double>(out.failures) > 0.05 * static_cast<double>(scenario.replications)) {
    std::ostringstream msg;
    msg << "monte carlo " << scenario.id << ": " << out.failures << " of " << scenario.replications
        << " replications failed";
    throw NumericalError(msg.str());
  }
  const double truths[4] = {scenario.dgp.gamma[0], scenario.dgp.delta1, scenario.dgp.rho_sp,
                            scenario.dgp.true_ate(x_ate)};
  const auto ok = static_cast<Eigen::Index>(out.replication_index.size());
  for (std::size_t m = 0; m < nm; ++m) {
    Eigen::MatrixXd est(ok, 4);
    for (Eigen::Index k = 0; k < ok; ++k) {
      est.row(k) = results[static_cast<std::size_t>(out.replication_index[static_cast<std::size_t>(k)])]->row(
          static_cast<Eigen::Index>(m));
    }
    for (int t = 0; t < 4; ++t) {
      std::vector<double> col(static_cast<std::size_t>(ok));
      for (Eigen::Index k = 0; k < ok; ++k) {
        col[static_cast<std::size_t>(k)] = est(k, t);
      }
      McCell c = summarize_column(col, truths[t]);
      c.model = out.models[m];
      c.target = out.targets[static_cast<std::size_t>(t)];
      out.cells.push_back(c);
    }
    out.estimates.push_back(std::move(est));
  }
  return out;
}

std::vector<Target> coverage_targets(const Scenario& scenario, const ParameterMap& map) {
  std::vector<Target> t{Target::ate(scenario.ate_point())};
  for (const auto& p : map.params()) {
    if (p.role == ParamRole::Alpha) {
      t.push_back(Target::alpha(p.index, p.name));
    }
  }
  for (const auto& p : map.params()) {
    if (p.role == ParamRole::Gamma && p.index == 0) {
      t.push_back(Target::gamma(0, p.name));
    }
  }
  for (const auto& p : map.params()) {
    if (p.role == ParamRole::Beta) {
      t.push_back(Target::beta(p.index, p.name));
    }
  }
  t.push_back(Target::delta1());
  t.push_back(Target::rho());
  return t;
}

std::vector<double> coverage_truths(const Scenario& scenario, const std::vector<Target>& targets) {
  const Dgp& g = scenario.dgp;
  std::vector<double> out;
  for (const auto& t : targets) {
    switch (t.kind) {
      case Target::Kind::Alpha:
        out.push_back(g.alpha[t.index]);
        break;
      case Target::Kind::Beta:
        out.push_back(g.beta[t.index]);
        break;
      case Target::Kind::Gamma:
        out.push_back(g.gamma[t.index]);
        break;
      case Target::Kind::Delta1:
        out.push_back(g.delta1);
        break;
      case Target::Kind::Rho:
        out.push_back(g.dependence().rho());
        break;
      case Target::Kind::RhoSpearman:
        out.push_back(g.rho_sp);
        break;
      case Target::Kind::Ate:
        out.push_back(g.true_ate(t.x));
        break;
    }
  }
  return out;
}

const CoverageRow& CoverageSummary::row(const std::string& target) const {
  for (const auto& r : rows) {
    if (r.target == target) {
      return r;
    }
  }
  throw std::out_of_range("CoverageSummary: no row for " + target);
}

CoverageSummary run_coverage_study(const CoverageStudy& study) {
  const Scenario& sc = study.scenario;
  sc.validate();
  if (sc.models.front().sieve) {
    throw std::invalid_argument("coverage study: the fitted model must be parametric");
  }
  const std::optional<DependenceParam> dep = dgp_dependence(sc.dgp);
  const ModelSpec spec = sc.models.front().spec_for(sc.n);
  const ParameterMap map(spec, sc.dgp.kx(), sc.dgp.kz());
  const std::vector<Target> targets = coverage_targets(sc, map);
  const std::vector<double> truth = coverage_truths(sc, targets);
  const std::size_t nt = targets.size();
  const auto sims = static_cast<std::size_t>(sc.replications);

  struct SimOutcome {
    std::vector<double> point;
    std::vector<double> se;
    std::vector<bool> normal_hit;
    std::vector<bool> pci_hit;
  };
  const std::uint64_t fit_seed = derive_seed(sc.seed, kFitStream);
  const std::uint64_t boot_seed = derive_seed(sc.seed, kBootStream);
  std::vector<std::optional<SimOutcome>> outcomes(sims);
  parallel_for(sims, sc.threads, [&](std::size_t s) {
    try {
      const Dataset data = simulate_with(sc.dgp, dep, sc.n, sc.seed, s, nullptr);
      FitOptions opts = sc.fit;
      opts.seed = derive_seed(fit_seed, s);
      const FitResult fit = fit_parametric(data, spec, opts);
      if (!fit.converged) {
        return;
      }
      BootstrapOptions bo;
      bo.B = study.bootstrap_draws;
      bo.seed = derive_seed(boot_seed, s);
      bo.weights = study.weights;
      bo.levels = {study.level};
      bo.threads = 1;
      bo.optimizer = sc.fit.optimizer;
      const BootstrapResult br = weighted_bootstrap(data, fit, targets, bo);
      SimOutcome o;
      for (std::size_t k = 0; k < nt; ++k) {
        o.point.push_back(br.point[static_cast<Eigen::Index>(k)]);
        o.se.push_back(br.se[static_cast<Eigen::Index>(k)]);
        o.normal_hit.push_back(br.normal_ci[k][0].contains(truth[k]));
        o.pci_hit.push_back(br.pci[k][0].contains(truth[k]));
      }
      outcomes[s] = std::move(o);
    } catch (const NumericalError&) {
    } catch (const DataError&) {
    } catch (const std::domain_error&) {
    }
  });

  CoverageSummary out;
  out.id = study.id;
  out.simulations = sc.replications;
  out.bootstrap_draws = study.bootstrap_draws;
  out.level = study.level;
  std::vector<std::size_t> ok;
  for (std::size_t s = 0; s < sims; ++s) {
    if (outcomes[s]) {
      ok.push_back(s);
    } else {
      ++out.failures;
    }
  }
  if (static_cast<double>(out.failures) > 0.05 * static_cast<double>(sc.replications)) {
    std::ostringstream msg;
    msg << "coverage study " << study.id << ": " << out.failures << " of " << sc.replications
        << " simulations failed";
    throw NumericalError(msg.str());
  }
  const auto m = static_cast<double>(ok.size());
  for (std::size_t k = 0; k < nt; ++k) {
    CoverageRow row;
    row.target = targets[k].name;
    row.truth = truth[k];
    std::vector<double> pts;
    std::vector<double> ses;
    int nh = 0;
    int ph = 0;
    for (std::size_t s : ok) {
      const SimOutcome& o = *outcomes[s];
      pts.push_back(o.point[k]);
      ses.push_back(o.se[k]);
      nh += o.normal_hit[k] ? 1 : 0;
      ph += o.pci_hit[k] ? 1 : 0;
    }
    row.normal_coverage = nh / m;
    row.percentile_coverage = ph / m;
    row.mean_se = numerics::pairwise_sum(ses) / m;
    row.mc_sd = summarize_column(pts, truth[k]).sd;
    out.rows.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

constexpr double kTable2Ate = 0.1066;

enum class Mixture { None, Raw, Standardized };

Dgp section5_dgp(CopulaFamily family, double rho_sp, Mixture mixture) {
  Dgp g;
  g.copula = family;
  g.rho_sp = rho_sp;
  g.alpha = Eigen::VectorXd::Constant(1, -1.0);
  g.beta = Eigen::VectorXd::Constant(1, -1.0);
  g.gamma = Eigen::VectorXd::Constant(1, 0.8);
  g.delta1 = 1.1;
  g.covariate_corr.resize(2, 2);
  g.covariate_corr << 1.0, -0.1, -0.1, 1.0;
  if (mixture == Mixture::Raw) {
    static const ParametricMarginal raw = calibrate_mixture(kTable2Ate, 1.1, {0.6, 0.4}, {-1.0, 1.5}, false);
    g.eps = raw;
    g.nu = raw;
  } else if (mixture == Mixture::Standardized) {
    static const ParametricMarginal standardized = calibrate_mixture(kTable2Ate, 1.1);
    g.eps = standardized;
    g.nu = standardized;
  }
  return g;
}

Normalization pin_first_x() { return Normalization::fixed_coefficient({{0, -1.0}}, {{0, -1.0}}); }

FittedModel parametric_model(CopulaFamily f) {
  FittedModel m;
  m.label = "parametric-" + to_string(f);
  m.copula = f;
  m.normalization = pin_first_x();
  return m;
}

FittedModel sieve_model(CopulaFamily f, TransformKind g = TransformKind::StandardNormal,
                        const std::string& suffix = "") {
  FittedModel m;
  m.label = "sieve-" + to_string(f) + suffix;
  m.copula = f;
  m.sieve = true;
  m.g = TransformG(g);
  m.normalization = pin_first_x();
  return m;
}

Scenario base_scenario(std::string id, std::string desc, Dgp dgp, std::size_t n) {
  Scenario s;
  s.id = std::move(id);
  s.description = std::move(desc);
  s.n = n;
  s.replications = 200;
  s.seed = 20240101;
  s.dgp = std::move(dgp);
  return s;
}

std::string rho_tag(double r) {
  if (r == -0.5) {
    return "neg05";
  }
  if (r == 0.2) {
    return "02";
  }
  return "07";
}

struct PresetTable {
  std::vector<std::string> names;
  std::map<std::string, Scenario> scenarios;

  void add(Scenario s) {
    names.push_back(s.id);
    scenarios.emplace(s.id, std::move(s));
  }
};

const PresetTable& presets() {
  static const PresetTable table = [] {
    PresetTable t;
    const std::size_t sizes[2] = {500, 1000};
    for (bool mixture : {false, true}) {
      for (std::size_t n : sizes) {
        for (CopulaFamily f : kAllCopulaFamilies) {
          std::string id = std::string(mixture ? "table2-" : "table1-") + to_string(f);
          if (n == 1000) {
            id += "-n1000";
          }
          Scenario s = base_scenario(id,
                                     std::string(mixture ? "raw mixture marginals" : "normal marginals") +
                                         ", " + to_string(f) + " copula, parametric vs sieve",
                                     section5_dgp(f, 0.5, mixture ? Mixture::Raw : Mixture::None), n);
          s.models = {parametric_model(f), sieve_model(f)};
          t.add(std::move(s));
        }
      }
    }
    for (CopulaFamily f : kAllCopulaFamilies) {
      Scenario s = base_scenario("table2std-" + to_string(f),
                                 "standardized mixture marginals, " + to_string(f) + " copula, parametric vs sieve",
                                 section5_dgp(f, 0.5, Mixture::Standardized), 500);
      s.models = {parametric_model(f), sieve_model(f)};
      t.add(std::move(s));
    }
    for (std::size_t n : sizes) {
      int k = 1;
      for (CopulaFamily truth : kAllCopulaFamilies) {
        std::string id = "cop" + std::to_string(k++);
        if (n == 1000) {
          id += "-n1000";
        }
        Scenario s = base_scenario(id,
                                   "mixture marginals, true " + to_string(truth) +
                                       " copula fitted with the other families",
                                   section5_dgp(truth, 0.5, Mixture::Raw), n);
        for (CopulaFamily f : kAllCopulaFamilies) {
          if (f != truth) {
            s.models.push_back(parametric_model(f));
            s.models.push_back(sieve_model(f));
          }
        }
        t.add(std::move(s));
      }
    }
    {
      Dgp g = section5_dgp(CopulaFamily::Gaussian, 0.5, Mixture::None);
      g.eps = ParametricMarginal::student_t(3.0);
      g.nu = ParametricMarginal::student_t(3.0);
      Scenario s = base_scenario("t3", "t(3) marginals; sieve with G = normal and G = t3", g, 500);
      s.models = {parametric_model(CopulaFamily::Gaussian), sieve_model(CopulaFamily::Gaussian),
                  sieve_model(CopulaFamily::Gaussian, TransformKind::StudentT3, "-g-t3")};
      t.add(std::move(s));
    }
    for (double r : {-0.5, 0.2, 0.7}) {
      for (bool mixture : {false, true}) {
        for (CopulaFamily f : kAllCopulaFamilies) {
          if (r < 0.0 && (f == CopulaFamily::Clayton || f == CopulaFamily::Gumbel)) {
            continue;
          }
          std::string id = "rho-" + rho_tag(r) + (mixture ? "-mixture-" : "-correct-") + to_string(f);
          std::ostringstream desc;
          desc << "rho_sp = " << r << ", " << (mixture ? "mixture" : "normal") << " marginals, " << to_string(f)
               << " copula";
          Scenario s = base_scenario(id, desc.str(), section5_dgp(f, r, mixture ? Mixture::Raw : Mixture::None), 500);
          s.models = {parametric_model(f), sieve_model(f)};
          t.add(std::move(s));
        }
      }
    }
    return t;
  }();
  return table;
}

Scenario coverage_scenario() {
  Dgp g;
  g.copula = CopulaFamily::Gaussian;
  g.rho_sp = 0.5;
  g.alpha.resize(2);
  g.alpha << -1.0, 0.5;
  g.beta.resize(2);
  g.beta << -1.0, 0.8;
  g.gamma = Eigen::VectorXd::Constant(1, 0.8);
  g.delta1 = 1.1;
  g.covariate_corr = Eigen::MatrixXd::Constant(3, 3, -0.1);
  g.covariate_corr.diagonal().setOnes();
  Scenario s = base_scenario("cp-boot", "bootstrap coverage, Gaussian copula, normal marginals", g, 500);
  s.models = {parametric_model(CopulaFamily::Gaussian)};
  return s;
}

}  // namespace

Scenario make_preset(const std::string& name) {
  const auto& t = presets();
  const auto it = t.scenarios.find(name);
  if (it == t.scenarios.end()) {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return it->second;
}

std::vector<std::string> preset_names() { return presets().names; }

CoverageStudy make_coverage_preset(const std::string& name) {
  CoverageStudy c;
  c.scenario = coverage_scenario();
  if (name == "cp-boot") {
    c.id = name;
    c.scenario.replications = 200;
    c.bootstrap_draws = 200;
  } else if (name == "cp-boot-smoke") {
    c.id = name;
    c.scenario.id = name;
    c.scenario.replications = 50;
    c.bootstrap_draws = 100;
  } else {
    throw std::invalid_argument("unknown coverage preset '" + name + "'");
  }
  return c;
}

std::vector<std::string> coverage_preset_names() { return {"cp-boot", "cp-boot-smoke"}; }

}  // namespace trisieve
