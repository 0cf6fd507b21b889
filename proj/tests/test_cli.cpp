#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "trisieve/report.hpp"
#include "trisieve/simulation.hpp"

using namespace trisieve;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("trisieve_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<Json> json_lines(const std::string& text) {
  std::vector<Json> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) {
      out.push_back(Json::parse(line));
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("copula utilities") {
    Run r = run({"copula", "spearman", "gaussian", "0.5176"});
    CHECK(r.code == 0);
    CHECK(r.out == "0.5000\n");
    r = run({"copula", "--digits", "5", "cdf", "frank", "5", "0.5", "0.5"});
    CHECK(r.out == "0.37715\n");
    r = run({"copula", "from-spearman", "gaussian", "0.5"});
    CHECK(r.out == "0.5176\n");
    CHECK(run({"copula", "spearman", "plackett", "1"}).code == cli::kExitUsage);
  }

  TEST_CASE("usage errors") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run({"--help"}).code == cli::kExitOk);
    const Run r = run({"simulate", "table7-gaussian"});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("table7-gaussian") != std::string::npos);
    CHECK(run({"simulate"}).code == cli::kExitUsage);
    CHECK(run({"estimate", (scratch_dir() / "absent.csv").string()}).code == cli::kExitUsage);
  }

  TEST_CASE("identlab demos") {
    Run r = run({"identlab", "binary-counterexample"});
    CHECK(r.code == 0);
    CHECK(r.out.find("max discrepancy") != std::string::npos);
    CHECK(r.out.find("PASS") != std::string::npos);
    r = run({"identlab", "positivity", "--family", "frank"});
    CHECK(r.code == 0);
    CHECK(r.out.find("violations 0") != std::string::npos);
    const fs::path csv = scratch_dir() / "fig1.csv";
    r = run({"identlab", "failure-distribution", "--out", csv.string()});
    CHECK(r.code == 0);
    CHECK(slurp(csv).find("v,F_tilde,Phi") != std::string::npos);
  }

  TEST_CASE("missing column") {
    const fs::path csv = scratch_dir() / "nod.csv";
    std::ofstream(csv) << "y,x1,z1\n1,0.5,0.2\n0,-0.3,1.1\n";
    const Run r = run({"estimate", csv.string()});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("'d'") != std::string::npos);
  }

  TEST_CASE("simulate-then-estimate round trip and result blocks") {
    const fs::path csv = scratch_dir() / "t1.csv";
    REQUIRE(run({"draw", "table1-gaussian", "--rep", "11", "--out", csv.string()}).code == 0);
    const fs::path out = scratch_dir() / "est.jsonl";
    Run r = run({"estimate", csv.string(), "--out", out.string()});
    REQUIRE(r.code == 0);
    auto lines = json_lines(slurp(out));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0]["command"] == "estimate");
    CHECK(lines[0].contains("config"));
    CHECK(lines[0].contains("version"));
    const Json& blk = lines[1];
    const std::vector<std::string> names = blk["efficient_score"]["names"];
    const std::vector<double> se = blk["efficient_score"]["se"];
    std::map<std::string, double> se_of;
    for (std::size_t k = 0; k < names.size(); ++k) {
      se_of[names[k]] = se[k];
    }
    const double gamma = blk["fit"]["theta"]["gamma"][0];
    const double delta = blk["fit"]["theta"]["delta1"];
    CHECK(std::abs(gamma - 0.8) < 3.0 * se_of.at("gamma[z1]"));
    CHECK(std::abs(delta - 1.1) < 3.0 * se_of.at("delta1"));
    const Scenario s = make_preset("table1-gaussian");
    const std::vector<double> xm = blk["ate"]["x"];
    const double truth = s.dgp.true_ate(Eigen::Map<const Eigen::VectorXd>(xm.data(), 1));
    CHECK(std::abs(blk["ate"]["value"].get<double>() - truth) < 3.0 * blk["ate"]["se"].get<double>());

    r = run({"estimate", csv.string(), "--model", "parametric", "--copula", "frank", "--model", "sieve", "--out",
             out.string()});
    REQUIRE(r.code == 0);
    lines = json_lines(slurp(out));
    REQUIRE(lines.size() == 3);
    CHECK(lines[1]["block"] == "parametric");
    CHECK_FALSE(lines[1].contains("kn"));
    CHECK(lines[2]["block"] == "sieve");
    CHECK(lines[2]["kn"] == 2);
    CHECK(lines[2]["fit"]["model"]["copula"] == "frank");
    CHECK(r.out.find("k_n = 2") != std::string::npos);

    r = run({"estimate", csv.string(), "--boot", "10", "--threads", "1", "--out", out.string()});
    REQUIRE(r.code == 0);
    lines = json_lines(slurp(out));
    CHECK(lines[1]["bootstrap"]["B"] == 10);
    CHECK(r.out.find("PCI 0.95") != std::string::npos);

    CHECK(run({"estimate", csv.string(), "--max-iter", "1"}).code == cli::kExitNumerical);
    CHECK(run({"estimate", csv.string(), "--kn", "two", "--model", "sieve"}).code == cli::kExitUsage);
    CHECK(run({"estimate", csv.string(), "--pin-alpha", "w=1"}).code == cli::kExitUsage);
  }

  TEST_CASE("simulate output is reproducible and embeds its configuration") {
    const fs::path a = scratch_dir() / "a.jsonl";
    const fs::path b = scratch_dir() / "b.jsonl";
    const fs::path c = scratch_dir() / "c.jsonl";
    const fs::path cfg = scratch_dir() / "cfg.json";
    REQUIRE(run({"simulate", "table1-gumbel", "--reps", "3", "--threads", "1", "--out", a.string()}).code == 0);
    REQUIRE(run({"simulate", "table1-gumbel", "--reps", "3", "--threads", "2", "--out", b.string()}).code == 0);
    CHECK(slurp(a) == slurp(b));
    std::ofstream(cfg) << run({"presets", "show", "table1-gumbel"}).out;
    const Run r = run({"simulate", "--config", cfg.string(), "--reps", "3", "--out", c.string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(a) == slurp(c));
    CHECK(r.out.find("True Values") != std::string::npos);
    CHECK(r.out.find("RMSE") != std::string::npos);
    const auto lines = json_lines(slurp(a));
    REQUIRE(lines.size() == 9);
    CHECK(lines[0]["config"]["id"] == "table1-gumbel");
    CHECK(lines[0]["seed"] == 20240101);
    CHECK(lines[1]["scenario"] == "table1-gumbel");
    for (const char* key : {"model", "target", "truth", "mean", "sd", "bias", "rmse"}) {
      CHECK(lines[1].contains(key));
    }
  }

  TEST_CASE("presets export") {
    const fs::path dir = scratch_dir() / "presets";
    fs::create_directories(dir);
    const Run r = run({"presets", "export", "--dir", dir.string()});
    CHECK(r.code == 0);
    std::size_t count = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
      count += e.path().extension() == ".json" ? 1 : 0;
    }
    CHECK(count == preset_names().size() + coverage_preset_names().size());
  }
}

TEST_SUITE("report") {
  TEST_CASE("scenario JSON round trip") {
    for (const auto& n : preset_names()) {
      CAPTURE(n);
      const Json j = to_json(make_preset(n));
      CHECK(to_json(scenario_from_json(j)).dump() == j.dump());
    }
  }

  TEST_CASE("config errors name the key") {
    Json j = to_json(make_preset("table1-gaussian"));
    j["dgp"].erase("delta1");
    try {
      scenario_from_json(j);
      FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("delta1") != std::string::npos);
    }
    j = to_json(make_preset("table1-gaussian"));
    j["models"][0]["copula"] = "plackett";
    CHECK_THROWS_AS(scenario_from_json(j), std::invalid_argument);
  }

  TEST_CASE("fixed-point rendering") {
    CHECK(fixed(0.36431) == "0.3643");
    CHECK(fixed(-0.00001) == "0.0000");
    CHECK(fixed(-0.25, 2) == "-0.25");
  }
}
