#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fssm/errors.hpp"
#include "fssm/io.hpp"
#include "fssm/mixture.hpp"
#include "fssm/samplers.hpp"

using namespace fssm;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("fssm_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string cli_path() {
  const char* env = std::getenv("FSSM_CLI");
  return env ? env : "./fssm";
}

int run_cli(const std::string& args) {
  std::string cmd = "\"" + cli_path() + "\" " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

FunctionalPanel random_panel(int T, int K, std::uint64_t seed) {
  FunctionalPanel panel;
  panel.arguments.resize(K);
  for (int k = 0; k < K; ++k) panel.arguments[k] = (k + 1.0) / (K + 1.0);
  panel.y.resize(T, K);
  RngStream rng(seed, 0);
  for (int t = 0; t < T; ++t) {
    double acc = 0.0;
    for (int k = 0; k < K; ++k) {
      acc += rng.uniform() / K;
      panel.y(t, k) = acc / 3.0;
    }
  }
  return panel;
}

bool same_basis(const std::vector<BasisFunction>& a, const std::vector<BasisFunction>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].family != b[i].family || a[i].a != b[i].a || a[i].b != b[i].b) return false;
  return true;
}

DrawStore tiny_fssm_store() {
  auto set = build_basis_set({{BasisFamily::Beta, 1.0, 1.0}, {BasisFamily::Beta, 3.0, 1.0}},
                             {0.3, 0.6});
  FunctionalPanel panel;
  panel.arguments = set.arguments;
  panel.y.resize(4, 2);
  for (int t = 0; t < 4; ++t)
    for (int k = 0; k < 2; ++k) panel.y(t, k) = 0.5 * set.H(k, 0) + 0.5 * set.H(k, 1);
  McmcConfig config;
  config.n_iter = 7;
  config.n_burnin = 2;
  config.seed = 901;
  config.store_states = true;
  return run_chain(config, panel, set, PriorHyperparams::defaults(1));
}

}  // namespace

TEST_CASE("format_double emits round-trippable shortest decimals") {
  for (double x : {1.0 / 3.0, 1e-300, 6.02214076e23, -0.125, 0.0, 2.718281828459045}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(-3.0) == "-3");
}

TEST_CASE("panel CSV round trip and malformed files") {
  fs::path dir = scratch_dir("panel");
  FunctionalPanel panel = random_panel(6, 3, 902);
  fs::path path = dir / "panel.csv";
  write_panel_csv(path.string(), panel);
  FunctionalPanel back = read_panel_csv(path.string());
  REQUIRE(back.T() == 6);
  REQUIRE(back.K() == 3);
  CHECK(back.arguments == panel.arguments);
  CHECK(back.y == panel.y);

  CHECK_THROWS_AS(read_panel_csv((dir / "absent.csv").string()), IoError);

  fs::path bad = dir / "bad.csv";
  write_text(bad, "time,x,y\n1,0.5,0.2\n");
  CHECK_THROWS_AS(read_panel_csv(bad.string()), IoError);  // header
  write_text(bad, "t,x,y\n");
  CHECK_THROWS_AS(read_panel_csv(bad.string()), IoError);  // no rows
  write_text(bad, "t,x,y\n1,0.25,0.1\n1,0.75,0.6\n2,0.25,0.2\n");
  CHECK_THROWS_AS(read_panel_csv(bad.string()), IoError);  // ragged panel
  write_text(bad, "t,x,y\n1,0.25,0.1\n2,0.35,0.2\n");
  CHECK_THROWS_AS(read_panel_csv(bad.string()), IoError);  // grid mismatch
  write_text(bad, "t,x,y\n0,0.25,0.1\n");
  CHECK_THROWS_AS(read_panel_csv(bad.string()), IoError);  // t < 1
  write_text(bad, "t,x,y\n1,0.25,zebra\n");
  CHECK_THROWS_AS(read_panel_csv(bad.string()), IoError);  // bad number
  write_text(bad, "t,x,y\n1,0.25\n");
  CHECK_THROWS_AS(read_panel_csv(bad.string()), IoError);  // field count
}

TEST_CASE("truth weight and gini CSV round trips") {
  fs::path dir = scratch_dir("truth");
  Eigen::MatrixXd pi(3, 2);
  pi << 0.25, 0.75, 1.0 / 3.0, 2.0 / 3.0, 0.9, 0.1;
  fs::path ppath = dir / "pi.csv";
  write_truth_pi_csv(ppath.string(), pi);
  CHECK(read_truth_pi_csv(ppath.string()) == pi);

  Eigen::VectorXd gini(4);
  gini << 0.1, 0.2, 1.0 / 7.0, 0.4;
  fs::path gpath = dir / "gini.csv";
  write_truth_gini_csv(gpath.string(), gini);
  CHECK(read_truth_gini_csv(gpath.string()) == gini);

  fs::path bad = dir / "bad.csv";
  write_text(bad, "t,l,pi_true\n1,1,0.5\n1,2,0.5\n2,1,0.6\n");
  CHECK_THROWS_AS(read_truth_pi_csv(bad.string()), IoError);  // incomplete grid
  write_text(bad, "t,gini_true\n1,0.1\n3,0.2\n");
  CHECK_THROWS_AS(read_truth_gini_csv(bad.string()), IoError);  // gap in t
}

TEST_CASE("draw store round trips exactly for both models") {
  fs::path dir = scratch_dir("store");
  DrawStore store = tiny_fssm_store();
  REQUIRE(store.n_draws() == 7);
  write_draw_store(dir.string(), store);
  DrawStore back = read_draw_store(dir.string());
  REQUIRE(back.n_draws() == store.n_draws());
  CHECK(back.model == "fssm");
  CHECK(back.T == store.T);
  CHECK(back.L == store.L);
  CHECK(back.chain == store.chain);
  CHECK(back.iter == store.iter);
  CHECK(back.phi_accept_rate == store.phi_accept_rate);
  CHECK(back.wall_seconds == store.wall_seconds);
  REQUIRE(back.weights.size() == store.weights.size());
  for (std::size_t i = 0; i < store.n_draws(); ++i) {
    CHECK(back.params[i].mu == store.params[i].mu);
    CHECK(back.params[i].phi == store.params[i].phi);
    CHECK(back.params[i].sigma2 == store.params[i].sigma2);
    CHECK(back.params[i].nu2 == store.params[i].nu2);
    CHECK(back.gini[i] == store.gini[i]);
    CHECK(back.weights[i] == store.weights[i]);
  }

  // Mixture store carries component variances instead of nu2.
  auto set = build_basis_set({{BasisFamily::Beta, 1.0, 1.0}, {BasisFamily::Beta, 3.0, 1.0}},
                             {0.3, 0.6});
  FunctionalPanel panel;
  panel.arguments = set.arguments;
  panel.y.resize(4, 2);
  for (int t = 0; t < 4; ++t)
    for (int k = 0; k < 2; ++k) panel.y(t, k) = 0.5 * set.H(k, 0) + 0.5 * set.H(k, 1);
  McmcConfig config;
  config.n_iter = 5;
  config.seed = 903;
  DrawStore mix = run_mixture_chain(config, panel, set, PriorHyperparams::defaults(1, true));
  fs::path mdir = scratch_dir("store_mix");
  write_draw_store(mdir.string(), mix);
  DrawStore mback = read_draw_store(mdir.string());
  CHECK(mback.model == "mixture");
  REQUIRE(mback.comp_var.size() == mix.comp_var.size());
  for (std::size_t i = 0; i < mix.n_draws(); ++i) CHECK(mback.comp_var[i] == mix.comp_var[i]);
  CHECK(mback.weights.empty());
}

TEST_CASE("truncated or inconsistent draw stores are rejected") {
  fs::path dir = scratch_dir("trunc");
  DrawStore store = tiny_fssm_store();
  write_draw_store(dir.string(), store);

  // Drop the last line of params.csv.
  std::string text = read_text(dir / "params.csv");
  std::size_t cut = text.rfind('\n', text.size() - 2);
  write_text(dir / "params.csv", text.substr(0, cut + 1));
  CHECK_THROWS_AS(read_draw_store(dir.string()), NumericalError);

  // Restore, then corrupt the gini file's time order.
  write_draw_store(dir.string(), store);
  std::string gtext = read_text(dir / "gini.csv");
  std::size_t pos = gtext.find("\n0,0,2,");
  REQUIRE(pos != std::string::npos);
  gtext.replace(pos, 7, "\n0,0,9,");
  write_text(dir / "gini.csv", gtext);
  CHECK_THROWS_AS(read_draw_store(dir.string()), NumericalError);

  // Missing directory is an I/O problem, not corruption.
  CHECK_THROWS_AS(read_draw_store((dir / "nowhere").string()), IoError);
}

TEST_CASE("run config JSON round trip preserves every field") {
  RunConfig config;
  config.model = "mixture";
  config.basis = {{BasisFamily::Beta, 1.0, 1.0},
                  {BasisFamily::Pareto, 0.5, 1.0},
                  {BasisFamily::Beta, 3.0, 1.0}};
  config.input = "panel.csv";
  config.out = "fit_out";
  config.mcmc.n_iter = 400;
  config.mcmc.n_burnin = 100;
  config.mcmc.thin = 2;
  config.mcmc.seed = 12345;
  config.mcmc.n_chains = 3;
  config.mcmc.threads = 2;
  config.mcmc.store_states = true;
  config.priors = PriorHyperparams::defaults(2, true);
  config.priors.mu_mean << 0.2, -0.1;
  config.priors.phi_var << 0.09, 0.04;
  config.priors.nu2_d0 = 0.25;

  RunConfig back = config_from_json(config_to_json(config));
  CHECK(back.model == config.model);
  CHECK(same_basis(back.basis, config.basis));
  CHECK(back.input == config.input);
  CHECK(back.out == config.out);
  CHECK(back.mcmc.n_iter == config.mcmc.n_iter);
  CHECK(back.mcmc.n_burnin == config.mcmc.n_burnin);
  CHECK(back.mcmc.thin == config.mcmc.thin);
  CHECK(back.mcmc.seed == config.mcmc.seed);
  CHECK(back.mcmc.n_chains == config.mcmc.n_chains);
  CHECK(back.mcmc.threads == config.mcmc.threads);
  CHECK(back.mcmc.store_states == config.mcmc.store_states);
  CHECK(back.priors.mu_mean == config.priors.mu_mean);
  CHECK(back.priors.mu_var == config.priors.mu_var);
  CHECK(back.priors.phi_mean == config.priors.phi_mean);
  CHECK(back.priors.phi_var == config.priors.phi_var);
  CHECK(back.priors.sigma2_n0 == config.priors.sigma2_n0);
  CHECK(back.priors.sigma2_d0 == config.priors.sigma2_d0);
  CHECK(back.priors.nu2_n0 == config.priors.nu2_n0);
  CHECK(back.priors.nu2_d0 == config.priors.nu2_d0);

  fs::path dir = scratch_dir("config");
  fs::path path = dir / "config.json";
  write_run_config(path.string(), config);
  RunConfig file_back = read_run_config(path.string());
  CHECK(file_back.mcmc.seed == config.mcmc.seed);
  CHECK(same_basis(file_back.basis, config.basis));

  // Scalar priors broadcast across columns.
  nlohmann::json j = config_to_json(config);
  j["priors"] = {{"phi_var", 0.01}};
  RunConfig bc = config_from_json(j);
  CHECK(bc.priors.phi_var == Eigen::VectorXd::Constant(2, 0.01));
  CHECK(bc.priors.nu2_n0 == 0.01);  // untouched fields keep mixture defaults

  CHECK_THROWS_AS(read_run_config((dir / "absent.json").string()), IoError);
  write_text(dir / "broken.json", "{not json");
  CHECK_THROWS_AS(read_run_config((dir / "broken.json").string()), ConfigError);
}

TEST_CASE("config violations are reported together") {
  nlohmann::json j;
  j["model"] = "bogus";
  j["basis"] = nlohmann::json::array({nlohmann::json{{"family", "beta"}, {"a", 1.0}, {"b", 1.0}}});
  j["mcmc"] = {{"n_iter", 0}, {"thin", 0}};
  j["extra"] = 1;
  try {
    config_from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    for (const char* part : {"model: must be 'fssm' or 'mixture'", "basis: expected an array",
                             "input: required", "mcmc.n_iter: must be >= 1",
                             "mcmc.thin: must be >= 1", "config: unknown key 'extra'"}) {
      INFO(part);
      CHECK(msg.find(part) != std::string::npos);
    }
  }

  RunConfig unchecked;
  unchecked.basis = {{BasisFamily::Beta, 1.0, 1.0}, {BasisFamily::Pareto, 1.5, 1.0}};
  unchecked.input = "missing_file.csv";
  unchecked.mcmc.n_chains = 0;
  try {
    unchecked.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("pareto parameters") != std::string::npos);
    CHECK(msg.find("input: file not found") != std::string::npos);
    CHECK(msg.find("mcmc.n_chains") != std::string::npos);
  }

  CHECK(manifest_deviation_notes().size() == 2);
}

TEST_CASE("command-line pipeline end to end") {
  fs::path base = scratch_dir("cli");
  fs::path sim = base / "sim";
  std::string simflags = "simulate --K 4 --phi 0.5 --seed 42 --out \"" + sim.string() + "\"";
  REQUIRE(run_cli(simflags) == 0);
  CHECK(fs::exists(sim / "panel.csv"));
  CHECK(fs::exists(sim / "truth_pi.csv"));
  CHECK(fs::exists(sim / "truth_gini.csv"));
  CHECK(fs::exists(sim / "manifest.json"));
  FunctionalPanel panel = read_panel_csv((sim / "panel.csv").string());
  CHECK(panel.T() == 200);
  CHECK(panel.K() == 4);

  // Same seed, same bytes.
  fs::path sim2 = base / "sim2";
  REQUIRE(run_cli("simulate --K 4 --phi 0.5 --seed 42 --out \"" + sim2.string() + "\"") == 0);
  CHECK(read_text(sim / "panel.csv") == read_text(sim2 / "panel.csv"));
  CHECK(read_text(sim / "truth_pi.csv") == read_text(sim2 / "truth_pi.csv"));

  CHECK(run_cli("simulate --phi 1.5 --out \"" + (base / "x").string() + "\"") == 1);
  CHECK(run_cli("simulate --K 0 --out \"" + (base / "x").string() + "\"") == 1);

  // Fit from a JSON config.
  nlohmann::json cfg;
  cfg["model"] = "fssm";
  cfg["input"] = (sim / "panel.csv").string();
  cfg["out"] = (base / "fit").string();
  cfg["basis"] = nlohmann::json::array({nlohmann::json{{"family", "beta"}, {"a", 1.0}, {"b", 1.0}},
                                        nlohmann::json{{"family", "beta"}, {"a", 3.0}, {"b", 1.0}},
                                        nlohmann::json{{"family", "beta"}, {"a", 1.0}, {"b", 0.3}}});
  cfg["mcmc"] = {{"n_iter", 30}, {"n_burnin", 10}, {"thin", 1},
                 {"seed", 7},    {"n_chains", 1},  {"store_states", true}};
  write_json_file((base / "config.json").string(), cfg);
  REQUIRE(run_cli("fit --config \"" + (base / "config.json").string() + "\"") == 0);
  DrawStore store = read_draw_store((base / "fit").string());
  CHECK(store.n_draws() == 30);
  CHECK(store.model == "fssm");
  CHECK(store.T == 200);
  nlohmann::json manifest = read_json_file((base / "fit" / "manifest.json").string());
  CHECK(manifest.at("n_draws").get<int>() == 30);
  CHECK(manifest.at("deviation_notes").size() == 2);
  CHECK(manifest.at("config").at("mcmc").at("seed").get<int>() == 7);

  // Refitting with the same seed reproduces the draw files byte for byte.
  REQUIRE(run_cli("fit --config \"" + (base / "config.json").string() + "\" --out \"" +
                  (base / "fit2").string() + "\"") == 0);
  CHECK(read_text(base / "fit" / "params.csv") == read_text(base / "fit2" / "params.csv"));
  CHECK(read_text(base / "fit" / "gini.csv") == read_text(base / "fit2" / "gini.csv"));
  CHECK(read_text(base / "fit" / "weights.csv") == read_text(base / "fit2" / "weights.csv"));

  // A different seed changes the draws.
  REQUIRE(run_cli("fit --config \"" + (base / "config.json").string() + "\" --seed 8 --out \"" +
                  (base / "fit3").string() + "\"") == 0);
  CHECK(read_text(base / "fit" / "params.csv") != read_text(base / "fit3" / "params.csv"));

  // Bad configs exit with code 1.
  cfg["mcmc"]["n_iter"] = 0;
  write_json_file((base / "bad.json").string(), cfg);
  CHECK(run_cli("fit --config \"" + (base / "bad.json").string() + "\"") == 1);
  write_text(base / "broken.json", "{oops");
  CHECK(run_cli("fit --config \"" + (base / "broken.json").string() + "\"") == 1);
  CHECK(run_cli("fit --config \"" + (base / "ghost.json").string() + "\"") == 2);

  // Summaries with and without truth files.
  REQUIRE(run_cli("summarize --draws \"" + (base / "fit").string() + "\" --truth-pi \"" +
                  (sim / "truth_pi.csv").string() + "\" --truth-gini \"" +
                  (sim / "truth_gini.csv").string() + "\" --panel \"" +
                  (sim / "panel.csv").string() + "\" --out \"" + (base / "sum").string() +
                  "\"") == 0);
  std::string summary = read_text(base / "sum" / "summary.csv");
  CHECK(summary.rfind("name,mean,q025,q975,ess\n", 0) == 0);
  CHECK(summary.find("mu_1,") != std::string::npos);
  CHECK(summary.find("phi_2,") != std::string::npos);
  CHECK(summary.find("nu2,") != std::string::npos);
  std::string metrics = read_text(base / "sum" / "metrics.csv");
  CHECK(metrics.rfind("quantity,rmse_x100,cp,al\n", 0) == 0);
  CHECK(metrics.find("\npi,") != std::string::npos);
  CHECK(metrics.find("\ngini,") != std::string::npos);
  std::string loss = read_text(base / "sum" / "loss.csv");
  CHECK(loss.rfind("ppv,ppse,log_ppv,log_ppse\n", 0) == 0);
  {
    std::stringstream ss(loss.substr(loss.find('\n') + 1));
    std::string ppv_s, ppse_s;
    std::getline(ss, ppv_s, ',');
    std::getline(ss, ppse_s, ',');
    CHECK(std::stod(ppse_s) >= std::stod(ppv_s));
  }

  REQUIRE(run_cli("summarize --draws \"" + (base / "fit").string() + "\" --out \"" +
                  (base / "sum2").string() + "\"") == 0);
  CHECK(fs::exists(base / "sum2" / "summary.csv"));
  CHECK(!fs::exists(base / "sum2" / "metrics.csv"));

  CHECK(run_cli("summarize --draws \"" + (base / "void").string() + "\"") == 2);

  // Gini summary with bounds and truth column.
  REQUIRE(run_cli("gini --draws \"" + (base / "fit").string() + "\" --panel \"" +
                  (sim / "panel.csv").string() + "\" --truth-gini \"" +
                  (sim / "truth_gini.csv").string() + "\" --out \"" + (base / "gini").string() +
                  "\"") == 0);
  std::string gsum = read_text(base / "gini" / "gini_summary.csv");
  CHECK(gsum.rfind("t,mean,q025,q975,lower_bound,upper_bound,gini_true\n", 0) == 0);
  int lines = 0;
  std::stringstream ss(gsum);
  std::string line;
  std::getline(ss, line);  // header
  bool bounds_checked = false;
  while (std::getline(ss, line)) {
    ++lines;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (line.back() == ',') f.emplace_back();
    REQUIRE(f.size() == 7);
    double q025 = std::stod(f[2]), q975 = std::stod(f[3]);
    CHECK(q025 <= q975);
    if (!f[4].empty() && !f[5].empty()) {
      CHECK(std::stod(f[4]) <= std::stod(f[5]) + 1e-12);
      bounds_checked = true;
    }
  }
  CHECK(lines == 200);
  CHECK(bounds_checked);

  CHECK(run_cli("nonsense") == 1);
  CHECK(run_cli("gini --draws \"" + (base / "fit").string() + "\"") == 1);  // missing --panel
}
