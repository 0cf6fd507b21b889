#include "trisieve/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#ifndef TRISIEVE_VERSION
#define TRISIEVE_VERSION "0.0.0"
#endif

namespace trisieve {

namespace {

Json vec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    a.push_back(v[i]);
  }
  return a;
}

Json mat(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    a.push_back(vec(m.row(i).transpose()));
  }
  return a;
}

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument(std::string("config: missing key '") + key + "'");
  }
  return j.at(key);
}

template <class T>
T get_as(const Json& j, const char* key) {
  try {
    return need(j, key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(std::string("config: bad value for '") + key + "'");
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) {
    return fallback;
  }
  return get_as<T>(j, key);
}

Eigen::VectorXd vec_from(const Json& j, const char* key) {
  const auto v = get_as<std::vector<double>>(j, key);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd mat_from(const Json& j, const char* key) {
  const auto rows = get_as<std::vector<std::vector<double>>>(j, key);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != m.cols()) {
      throw std::invalid_argument(std::string("config: ragged matrix '") + key + "'");
    }
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return m;
}

CopulaFamily family_from(const Json& j, const char* key) {
  try {
    return parse_copula_family(get_as<std::string>(j, key));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument(std::string("config: bad copula family in '") + key + "'");
  }
}

Json pins_json(const std::vector<std::pair<int, double>>& pins) {
  Json a = Json::array();
  for (const auto& [idx, val] : pins) {
    a.push_back(Json::array({idx, val}));
  }
  return a;
}

std::vector<std::pair<int, double>> pins_from(const Json& j, const char* key) {
  std::vector<std::pair<int, double>> out;
  if (!j.contains(key)) {
    return out;
  }
  for (const auto& p : j.at(key)) {
    if (!p.is_array() || p.size() != 2) {
      throw std::invalid_argument(std::string("config: '") + key + "' entries are [index, value]");
    }
    out.emplace_back(p[0].get<int>(), p[1].get<double>());
  }
  return out;
}

Json normalization_json(const Normalization& n) {
  Json j;
  if (n.scheme == Normalization::Scheme::MeanVarUnit) {
    j["scheme"] = "mean-var-unit";
  } else {
    j["scheme"] = "fixed-coefficient";
    j["alpha_pinned"] = pins_json(n.alpha_pinned);
    j["beta_pinned"] = pins_json(n.beta_pinned);
  }
  return j;
}

Normalization normalization_from(const Json& j) {
  const auto scheme = get_as<std::string>(j, "scheme");
  if (scheme == "mean-var-unit") {
    return Normalization::mean_var_unit();
  }
  if (scheme == "fixed-coefficient") {
    return Normalization::fixed_coefficient(pins_from(j, "alpha_pinned"), pins_from(j, "beta_pinned"));
  }
  throw std::invalid_argument("config: unknown normalization scheme '" + scheme + "'");
}

Json marginal_spec_json(const MarginalSpec& m) {
  Json j;
  switch (m.kind) {
    case MarginalKind::Fixed:
      j["kind"] = "fixed";
      break;
    case MarginalKind::LocationScale:
      j["kind"] = "location-scale";
      break;
    case MarginalKind::Sieve:
      j["kind"] = "sieve";
      break;
  }
  j["g"] = m.base.name();
  if (m.kind == MarginalKind::Sieve) {
    j["order"] = m.sieve_order;
  }
  return j;
}

Json policy_json(const SieveOrderPolicy& p) {
  Json j;
  switch (p.kind) {
    case SieveOrderPolicy::Kind::Proportional:
      j["policy"] = "proportional";
      j["constant"] = p.constant;
      break;
    case SieveOrderPolicy::Kind::TheoryRate:
      j["policy"] = "theory";
      j["constant"] = p.constant;
      j["smoothness"] = p.smoothness;
      break;
    case SieveOrderPolicy::Kind::Fixed:
      j["policy"] = "fixed";
      j["order"] = p.fixed_order;
      break;
  }
  return j;
}

SieveOrderPolicy policy_from(const Json& j) {
  SieveOrderPolicy p;
  const auto kind = get_as<std::string>(j, "policy");
  if (kind == "proportional") {
    p.kind = SieveOrderPolicy::Kind::Proportional;
    p.constant = get_or(j, "constant", p.constant);
  } else if (kind == "theory") {
    p.kind = SieveOrderPolicy::Kind::TheoryRate;
    p.constant = get_or(j, "constant", p.constant);
    p.smoothness = get_or(j, "smoothness", p.smoothness);
  } else if (kind == "fixed") {
    p.kind = SieveOrderPolicy::Kind::Fixed;
    p.fixed_order = get_as<int>(j, "order");
    if (p.fixed_order < 0) {
      throw std::invalid_argument("config: sieve order must be nonnegative");
    }
  } else {
    throw std::invalid_argument("config: unknown sieve order policy '" + kind + "'");
  }
  return p;
}

Json fit_options_json(const FitOptions& f) {
  Json j;
  j["n_starts"] = f.n_starts;
  j["sieve_random_starts"] = f.sieve_random_starts;
  j["sieve_start_scale"] = f.sieve_start_scale;
  j["jitter_scale"] = f.jitter_scale;
  j["seed"] = f.seed;
  j["tol_g"] = f.optimizer.tol_g;
  j["max_iter"] = f.optimizer.max_iter;
  j["max_step"] = f.optimizer.max_step;
  return j;
}

FitOptions fit_options_from(const Json& j) {
  FitOptions f;
  f.n_starts = get_or(j, "n_starts", f.n_starts);
  f.sieve_random_starts = get_or(j, "sieve_random_starts", f.sieve_random_starts);
  f.sieve_start_scale = get_or(j, "sieve_start_scale", f.sieve_start_scale);
  f.jitter_scale = get_or(j, "jitter_scale", f.jitter_scale);
  f.seed = get_or(j, "seed", f.seed);
  f.optimizer.tol_g = get_or(j, "tol_g", f.optimizer.tol_g);
  f.optimizer.max_iter = get_or(j, "max_iter", f.optimizer.max_iter);
  f.optimizer.max_step = get_or(j, "max_step", f.optimizer.max_step);
  if (f.n_starts < 1 || f.sieve_random_starts < 0 || f.optimizer.max_iter < 1 || !(f.optimizer.tol_g > 0.0)) {
    throw std::invalid_argument("config: bad fit options");
  }
  return f;
}

std::string weights_name(BootstrapWeights w) {
  switch (w) {
    case BootstrapWeights::Exponential:
      return "exponential";
    case BootstrapWeights::LogNormal:
      return "lognormal";
    case BootstrapWeights::Unit:
      return "unit";
  }
  return "unknown";
}

Json intervals_json(const std::vector<Interval>& v) {
  Json a = Json::array();
  for (const auto& i : v) {
    a.push_back({{"level", i.level}, {"lower", i.lower}, {"upper", i.upper}});
  }
  return a;
}

std::string pad(const std::string& s, std::size_t w, bool left = false) {
  if (s.size() >= w) {
    return s;
  }
  return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
}

}  // namespace

std::string software_version() { return TRISIEVE_VERSION; }

Json run_header(const std::string& command, std::uint64_t seed, const Json& config) {
  Json h;
  h["software"] = "trisieve";
  h["version"] = software_version();
  h["command"] = command;
  h["seed"] = seed;
  h["config"] = config;
  return h;
}

Json to_json(const ParametricMarginal& m) {
  Json j;
  const auto& law = m.law();
  if (const auto* n = std::get_if<ParametricMarginal::Normal>(&law)) {
    j["law"] = "normal";
    j["mu"] = n->mu;
    j["sigma"] = n->sigma;
  } else if (const auto* t = std::get_if<ParametricMarginal::StudentT>(&law)) {
    j["law"] = "student_t";
    j["df"] = t->df;
  } else {
    const auto& mx = std::get<ParametricMarginal::NormalMixture>(law);
    j["law"] = "mixture";
    j["weights"] = mx.weights;
    j["means"] = mx.means;
    j["sigmas"] = mx.sigmas;
    j["standardized"] = mx.standardized;
  }
  return j;
}

ParametricMarginal marginal_from_json(const Json& j) {
  const auto law = get_as<std::string>(j, "law");
  if (law == "normal") {
    return ParametricMarginal::normal(get_or(j, "mu", 0.0), get_or(j, "sigma", 1.0));
  }
  if (law == "student_t") {
    return ParametricMarginal::student_t(get_as<double>(j, "df"));
  }
  if (law == "mixture") {
    return ParametricMarginal::mixture(get_as<std::vector<double>>(j, "weights"),
                                       get_as<std::vector<double>>(j, "means"),
                                       get_as<std::vector<double>>(j, "sigmas"),
                                       get_or(j, "standardized", false));
  }
  throw std::invalid_argument("config: unknown marginal law '" + law + "'");
}

Json to_json(const ModelSpec& spec) {
  Json j;
  j["copula"] = to_string(spec.copula);
  j["eps"] = marginal_spec_json(spec.eps);
  j["nu"] = marginal_spec_json(spec.nu);
  j["normalization"] = normalization_json(spec.normalization);
  return j;
}

Json to_json(const Dgp& dgp) {
  Json j;
  j["copula"] = to_string(dgp.copula);
  j["rho_sp"] = dgp.rho_sp;
  j["comonotone"] = dgp.comonotone;
  j["eps"] = to_json(dgp.eps);
  j["nu"] = to_json(dgp.nu);
  j["alpha"] = vec(dgp.alpha);
  j["beta"] = vec(dgp.beta);
  j["gamma"] = vec(dgp.gamma);
  j["delta1"] = dgp.delta1;
  j["covariate_corr"] = mat(dgp.covariate_corr);
  return j;
}

Dgp dgp_from_json(const Json& j) {
  Dgp g;
  g.copula = family_from(j, "copula");
  g.rho_sp = get_or(j, "rho_sp", g.rho_sp);
  g.comonotone = get_or(j, "comonotone", false);
  if (j.contains("eps")) {
    g.eps = marginal_from_json(j.at("eps"));
  }
  if (j.contains("nu")) {
    g.nu = marginal_from_json(j.at("nu"));
  }
  g.alpha = vec_from(j, "alpha");
  g.beta = vec_from(j, "beta");
  g.gamma = vec_from(j, "gamma");
  g.delta1 = get_as<double>(j, "delta1");
  const Eigen::Index kc = g.kx() + g.kz();
  if (j.contains("covariate_corr")) {
    g.covariate_corr = mat_from(j, "covariate_corr");
  } else {
    g.covariate_corr = Eigen::MatrixXd::Identity(kc, kc);
  }
  g.validate();
  return g;
}

Json to_json(const FittedModel& m) {
  Json j;
  j["label"] = m.label;
  j["copula"] = to_string(m.copula);
  j["sieve"] = m.sieve;
  if (m.sieve) {
    j["g"] = m.g.name();
    j["kn"] = policy_json(m.order_policy);
  }
  j["normalization"] = normalization_json(m.normalization);
  return j;
}

FittedModel fitted_model_from_json(const Json& j) {
  FittedModel m;
  m.label = get_as<std::string>(j, "label");
  m.copula = family_from(j, "copula");
  m.sieve = get_or(j, "sieve", false);
  if (m.sieve) {
    try {
      m.g = parse_transform(get_or<std::string>(j, "g", "normal"));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("config: bad value for 'g'");
    }
    if (j.contains("kn")) {
      m.order_policy = policy_from(j.at("kn"));
    }
  }
  m.normalization = normalization_from(need(j, "normalization"));
  return m;
}

Json to_json(const Scenario& s) {
  Json j;
  j["id"] = s.id;
  j["description"] = s.description;
  j["n"] = s.n;
  j["replications"] = s.replications;
  j["seed"] = s.seed;
  j["dgp"] = to_json(s.dgp);
  Json models = Json::array();
  for (const auto& m : s.models) {
    models.push_back(to_json(m));
  }
  j["models"] = models;
  j["ate_x"] = vec(s.ate_point());
  j["fit"] = fit_options_json(s.fit);
  return j;
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.id = get_as<std::string>(j, "id");
  s.description = get_or<std::string>(j, "description", "");
  s.n = get_as<std::size_t>(j, "n");
  s.replications = get_or(j, "replications", s.replications);
  s.seed = get_or(j, "seed", s.seed);
  s.dgp = dgp_from_json(need(j, "dgp"));
  for (const auto& m : need(j, "models")) {
    s.models.push_back(fitted_model_from_json(m));
  }
  if (j.contains("ate_x")) {
    s.ate_x = vec_from(j, "ate_x");
  }
  if (j.contains("fit")) {
    s.fit = fit_options_from(j.at("fit"));
  }
  s.validate();
  return s;
}

Json to_json(const CoverageStudy& c) {
  Json j;
  j["id"] = c.id;
  j["bootstrap_draws"] = c.bootstrap_draws;
  j["level"] = c.level;
  j["weights"] = weights_name(c.weights);
  j["scenario"] = to_json(c.scenario);
  return j;
}

Json to_json(const FitResult& fit) {
  Json j;
  j["model"] = to_json(fit.spec());
  j["normalization"] = fit.normalization_record;
  j["converged"] = fit.converged;
  j["loglik"] = fit.loglik_value;
  j["iterations"] = fit.iterations;
  j["evaluations"] = fit.evaluations;
  j["gradient_norm"] = fit.gradient_norm;
  j["starts"] = fit.start_points_used;
  j["starts_converged"] = fit.starts_converged;
  Json free = Json::object();
  const auto names = fit.map.names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    free[names[k]] = fit.free_hat[static_cast<Eigen::Index>(k)];
  }
  j["free"] = free;
  const Theta& t = fit.theta_hat;
  Json th;
  th["alpha"] = vec(t.alpha);
  th["beta"] = vec(t.beta);
  th["gamma"] = vec(t.gamma);
  if (fit.spec().normalization.has_intercepts()) {
    th["alpha0"] = t.alpha0;
    th["beta0"] = t.beta0;
  }
  th["delta1"] = t.delta1;
  th["rho"] = t.rho;
  th["rho_sp"] = fitted_spearman(fit);
  auto marg = [](const MarginalSpec& spec, const MarginalParams& p) {
    Json m;
    if (spec.kind == MarginalKind::LocationScale) {
      m["mu"] = p.mu;
      m["sigma"] = p.sigma;
    } else if (spec.kind == MarginalKind::Sieve) {
      m["a"] = vec(p.a);
    }
    return m;
  };
  th["eps"] = marg(fit.spec().eps, t.eps);
  th["nu"] = marg(fit.spec().nu, t.nu);
  j["theta"] = th;
  j["warnings"] = fit.warnings;
  return j;
}

Json to_json(const EfficientScoreFit& es) {
  Json j;
  j["names"] = es.names;
  j["se"] = vec(es.se);
  j["covariance"] = mat(es.covariance);
  j["information"] = mat(es.I_star_hat);
  j["min_eigenvalue"] = es.min_eigenvalue;
  j["max_eigenvalue"] = es.max_eigenvalue;
  j["max_orthogonality"] = es.max_orthogonality;
  j["nuisance_dim"] = es.nuisance_dim;
  return j;
}

Json to_json(const BootstrapResult& br) {
  Json j;
  j["B"] = br.B;
  j["failures"] = br.failures;
  Json targets = Json::array();
  for (std::size_t t = 0; t < br.targets.size(); ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    Json r;
    r["target"] = br.targets[t].name;
    r["point"] = br.point[ti];
    r["se"] = br.se[ti];
    r["percentile"] = intervals_json(br.pci[t]);
    r["normal"] = intervals_json(br.normal_ci[t]);
    targets.push_back(r);
  }
  j["targets"] = targets;
  return j;
}

Json to_json(const McCell& c) {
  Json j;
  j["model"] = c.model;
  j["target"] = c.target;
  j["truth"] = c.truth;
  j["mean"] = c.mean;
  j["sd"] = c.sd;
  j["bias"] = c.bias;
  j["rmse"] = c.rmse;
  j["replications"] = c.replications;
  return j;
}

Json to_json(const CoverageSummary& c) {
  Json j;
  j["id"] = c.id;
  j["simulations"] = c.simulations;
  j["failures"] = c.failures;
  j["bootstrap_draws"] = c.bootstrap_draws;
  j["level"] = c.level;
  Json rows = Json::array();
  for (const auto& r : c.rows) {
    rows.push_back({{"target", r.target},
                    {"truth", r.truth},
                    {"normal_coverage", r.normal_coverage},
                    {"percentile_coverage", r.percentile_coverage},
                    {"mean_se", r.mean_se},
                    {"mc_sd", r.mc_sd}});
  }
  j["rows"] = rows;
  return j;
}

Json to_json(const copula::SiReport& r) {
  Json j;
  j["family"] = to_string(r.family);
  j["points_checked"] = r.points_checked;
  j["min_crho"] = r.min_crho;
  j["violations"] = r.violations.size();
  j["ok"] = r.ok();
  return j;
}

std::string mc_records(const McSummary& s, const Json& header) {
  std::string out = header.dump() + "\n";
  for (const auto& c : s.cells) {
    Json r;
    r["scenario"] = s.scenario_id;
    r["model"] = c.model;
    r["target"] = c.target;
    r["truth"] = c.truth;
    r["mean"] = c.mean;
    r["sd"] = c.sd;
    r["bias"] = c.bias;
    r["rmse"] = c.rmse;
    out += r.dump() + "\n";
  }
  return out;
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) {
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  // Avoid printing "-0.0000".
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

std::string mc_table(const McSummary& s) {
  std::ostringstream os;
  os << "scenario " << s.scenario_id << ": " << s.replications << " replications, " << s.failures
     << " failed\n";
  const std::size_t w0 = 13;
  const std::size_t w = 10;
  for (std::size_t m = 0; m < s.models.size(); ++m) {
    os << "\n" << s.models[m];
    if (s.sieve_orders[m] > 0) {
      os << " (k_n = " << s.sieve_orders[m] << ")";
    }
    os << "\n" << pad("", w0, true);
    for (const auto& t : s.targets) {
      os << pad(t, w);
    }
    os << "\n";
    const char* rows[5] = {"True Values", "Estimate", "S.D", "Bias", "RMSE"};
    for (int r = 0; r < 5; ++r) {
      os << pad(rows[r], w0, true);
      for (const auto& t : s.targets) {
        const McCell& c = s.cell(s.models[m], t);
        const double v[5] = {c.truth, c.mean, c.sd, c.bias, c.rmse};
        os << pad(fixed(v[r]), w);
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string coverage_table(const CoverageSummary& c) {
  std::ostringstream os;
  os << "coverage " << c.id << ": " << c.simulations << " simulations, " << c.failures << " failed, B = "
     << c.bootstrap_draws << ", level " << fixed(c.level, 2) << "\n";
  os << pad("target", 14, true) << pad("truth", 10) << pad("PCI", 10) << pad("normal", 10) << pad("mean SE", 10)
     << pad("MC SD", 10) << "\n";
  for (const auto& r : c.rows) {
    os << pad(r.target, 14, true) << pad(fixed(r.truth), 10) << pad(fixed(r.percentile_coverage, 3), 10)
       << pad(fixed(r.normal_coverage, 3), 10) << pad(fixed(r.mean_se), 10) << pad(fixed(r.mc_sd), 10) << "\n";
  }
  return os.str();
}

std::string fit_table(const FitResult& fit, const EfficientScoreFit* es) {
  std::ostringstream os;
  os << "model " << fit.spec().describe() << "\n";
  os << "loglik " << fixed(fit.loglik_value, 6) << ", " << (fit.converged ? "converged" : "NOT converged")
     << " after " << fit.iterations << " iterations (" << fit.starts_converged << "/" << fit.start_points_used
     << " starts converged)\n";
  const auto names = fit.map.names();
  os << pad("parameter", 16, true) << pad("estimate", 12);
  if (es != nullptr) {
    os << pad("SE", 12);
  }
  os << "\n";
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto ki = static_cast<Eigen::Index>(k);
    double value = fit.free_hat[ki];
    std::string name = names[k];
    if (ki == fit.map.rho_index()) {
      value = fit.theta_hat.rho;
      name = "rho";
    }
    os << pad(name, 16, true) << pad(fixed(value), 12);
    if (es != nullptr && ki < static_cast<Eigen::Index>(es->se.size())) {
      os << pad(fixed(es->se[ki]), 12);
    }
    os << "\n";
  }
  os << pad("rho_sp", 16, true) << pad(fixed(fitted_spearman(fit)), 12) << "\n";
  for (const auto& w : fit.warnings) {
    os << "warning: " << w << "\n";
  }
  return os.str();
}

}  // namespace trisieve
