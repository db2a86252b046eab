// Command-line driver: simulate / fit / summarize / gini.
//
// Exit codes: 0 success, 1 configuration or validation error, 2 I/O error,
// 3 numerical abort (diagnostics written next to the outputs when possible).

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fssm/errors.hpp"
#include "fssm/experiments.hpp"
#include "fssm/gibbs.hpp"
#include "fssm/io.hpp"
#include "fssm/mixture.hpp"
#include "fssm/samplers.hpp"

using namespace fssm;
using nlohmann::json;

namespace {

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json basis_json(const BasisSet& basis) {
  json jb = json::array();
  for (int l = 0; l < basis.L(); ++l)
    jb.push_back({{"family", basis_family_name(basis.bases[l].family)},
                  {"a", basis.bases[l].a},
                  {"b", basis.bases[l].b},
                  {"gini", basis.ginis[l]}});
  return jb;
}

// ------------------------------------------------------------------ simulate

int cmd_simulate(int K, double phi, std::uint64_t seed, const std::string& out) {
  if (K < 1) throw ConfigError("--K must be a positive panel size");
  if (!(phi > -1.0 && phi < 1.0)) throw ConfigError("--phi must lie in (-1, 1)");
  ensure_directory(out);
  RngStream rng(seed, 0);
  SyntheticTruth truth = generate_synthetic(rng, K, phi);
  write_panel_csv(out + "/panel.csv", truth.panel);
  write_truth_pi_csv(out + "/truth_pi.csv", truth.pi);
  write_truth_gini_csv(out + "/truth_gini.csv", truth.gini);

  json manifest;
  manifest["command"] = "simulate";
  manifest["seed"] = seed;
  manifest["scenario"] = {{"K", K}, {"phi", phi}, {"T", truth.panel.T()}};
  manifest["basis"] = basis_json(truth.basis);
  manifest["arguments"] = truth.panel.arguments;
  manifest["outputs"] = {"panel.csv", "truth_pi.csv", "truth_gini.csv"};
  manifest["deviation_notes"] = manifest_deviation_notes();
  manifest["generated_at"] = utc_now();
  write_json_file(out + "/manifest.json", manifest);
  std::cout << "wrote " << truth.panel.T() << "x" << truth.panel.K() << " panel to " << out
            << "\n";
  return 0;
}

// ----------------------------------------------------------------------- fit

int cmd_fit(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<int> threads, std::optional<std::string> out_override) {
  RunConfig config = read_run_config(config_path);
  if (seed) config.mcmc.seed = *seed;
  if (threads) config.mcmc.threads = *threads;
  if (out_override) config.out = *out_override;
  config.validate();

  FunctionalPanel panel = read_panel_csv(config.input);
  panel.validate();
  if (panel.K() < 1) throw ConfigError("input panel has no observation columns");
  BasisSet basis = build_basis_set(config.basis, panel.arguments);
  auto nonconvex = warn_nonconvex(config.basis);
  for (int idx : nonconvex)
    std::cerr << "warning: basis " << (idx + 1) << " is not convex on [0,1]\n";

  ensure_directory(config.out);
  DrawStore store;
  try {
    store = config.model == "mixture"
                ? run_mixture_chains(config.mcmc, panel, basis, config.priors)
                : run_chains(config.mcmc, panel, basis, config.priors);
  } catch (const NumericalError& e) {
    std::ofstream diag(config.out + "/diagnostics.txt");
    diag << "numerical abort during fit\n" << e.what() << "\n";
    throw;
  }
  write_draw_store(config.out, store);

  double wall_total = 0.0;
  for (double w : store.wall_seconds) wall_total += w;
  json manifest;
  manifest["command"] = "fit";
  manifest["model"] = store.model;
  manifest["config"] = config_to_json(config);
  manifest["panel"] = {{"path", config.input}, {"T", panel.T()}, {"K", panel.K()}};
  manifest["basis"] = basis_json(basis);
  manifest["arguments"] = panel.arguments;
  manifest["n_draws"] = store.n_draws();
  manifest["phi_accept_rate"] = store.phi_accept_rate;
  manifest["wall_seconds"] = store.wall_seconds;
  manifest["wall_seconds_total"] = wall_total;
  manifest["nonconvex_basis_indices"] = nonconvex;
  manifest["deviation_notes"] = manifest_deviation_notes();
  manifest["generated_at"] = utc_now();
  write_json_file(config.out + "/manifest.json", manifest);

  std::cout << "stored " << store.n_draws() << " draws in " << config.out << " ("
            << wall_total << " s";
  for (std::size_t c = 0; c < store.phi_accept_rate.size(); ++c)
    std::cout << (c == 0 ? "; phi acceptance " : ", ") << store.phi_accept_rate[c];
  std::cout << ")\n";
  return 0;
}

// ----------------------------------------------------------------- summarize

struct NamedSeries {
  std::string name;
  std::vector<double> values;
};

std::vector<NamedSeries> parameter_series(const DrawStore& store) {
  std::vector<NamedSeries> out;
  int Lm1 = store.L - 1;
  std::size_t n = store.n_draws();
  auto add = [&](const std::string& name, auto getter) {
    NamedSeries s{name, {}};
    s.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.values.push_back(getter(i));
    out.push_back(std::move(s));
  };
  for (int l = 0; l < Lm1; ++l)
    add("mu_" + std::to_string(l + 1), [&, l](std::size_t i) { return store.params[i].mu[l]; });
  for (int l = 0; l < Lm1; ++l)
    add("phi_" + std::to_string(l + 1), [&, l](std::size_t i) { return store.params[i].phi[l]; });
  for (int l = 0; l < Lm1; ++l)
    add("sigma2_" + std::to_string(l + 1),
        [&, l](std::size_t i) { return store.params[i].sigma2[l]; });
  if (store.model == "mixture") {
    for (int l = 0; l < store.L; ++l)
      add("comp_var_" + std::to_string(l + 1),
          [&, l](std::size_t i) { return store.comp_var[i][l]; });
  } else {
    add("nu2", [&](std::size_t i) { return store.params[i].nu2; });
  }
  return out;
}

// ESS needs at least 100 draws; shorter series fall back to the draw count.
double ess_or_n(const std::vector<double>& values) {
  if (values.size() < 100) return static_cast<double>(values.size());
  return ess(values);
}

// Rebuilds the basis recorded in a fit manifest (for predictive draws).
std::optional<BasisSet> basis_from_manifest(const json& manifest) {
  if (!manifest.contains("basis") || !manifest.contains("arguments")) return std::nullopt;
  std::vector<BasisFunction> bases;
  for (const auto& e : manifest.at("basis")) {
    BasisFunction bf;
    std::string fam = e.at("family").get<std::string>();
    bf.family = fam == "pareto" ? BasisFamily::Pareto : BasisFamily::Beta;
    bf.a = e.at("a").get<double>();
    bf.b = e.at("b").get<double>();
    bases.push_back(bf);
  }
  auto arguments = manifest.at("arguments").get<std::vector<double>>();
  return build_basis_set(bases, arguments);
}

// One posterior-predictive panel replicate per stored draw.
std::vector<Eigen::MatrixXd> predictive_replicates(RngStream& rng, const DrawStore& store,
                                                   const BasisSet& basis) {
  std::vector<Eigen::MatrixXd> reps;
  reps.reserve(store.n_draws());
  int K = basis.K();
  for (std::size_t i = 0; i < store.n_draws(); ++i) {
    const Eigen::MatrixXd& pi = store.weights[i];
    Eigen::MatrixXd rep(store.T, K);
    for (int t = 0; t < store.T; ++t) {
      if (store.model == "mixture") {
        for (int k = 0; k < K; ++k) {
          double cum = rng.uniform(), acc = 0.0;
          int z = store.L - 1;
          for (int l = 0; l < store.L; ++l) {
            acc += pi(t, l);
            if (cum <= acc) { z = l; break; }
          }
          rep(t, k) = draw_normal(rng, basis.H(k, z), std::sqrt(store.comp_var[i][z]));
        }
      } else {
        Eigen::VectorXd mean = basis.H * pi.row(t).transpose();
        double sd = std::sqrt(store.params[i].nu2);
        for (int k = 0; k < K; ++k) rep(t, k) = draw_normal(rng, mean[k], sd);
      }
    }
    reps.push_back(std::move(rep));
  }
  return reps;
}

int cmd_summarize(const std::string& draws_dir, const std::string& truth_pi_path,
                  const std::string& truth_gini_path, const std::string& panel_path,
                  std::string out) {
  DrawStore store = read_draw_store(draws_dir);
  if (store.n_draws() == 0) throw NumericalError("draw store in " + draws_dir + " is empty");
  if (out.empty()) out = draws_dir;
  ensure_directory(out);

  auto series = parameter_series(store);
  {
    std::ofstream f(out + "/summary.csv", std::ios::binary);
    if (!f) throw IoError("cannot open " + out + "/summary.csv for writing");
    f << "name,mean,q025,q975,ess\n";
    for (const auto& s : series) {
      double mean = 0.0;
      for (double v : s.values) mean += v;
      mean /= s.values.size();
      f << s.name << ',' << format_double(mean) << ','
        << format_double(sample_quantile(s.values, 0.025)) << ','
        << format_double(sample_quantile(s.values, 0.975)) << ','
        << format_double(ess_or_n(s.values)) << '\n';
    }
    if (!f.flush()) throw IoError("error while writing " + out + "/summary.csv");
  }
  std::cout << "wrote " << out << "/summary.csv (" << series.size() << " parameters, "
            << store.n_draws() << " draws)\n";

  bool want_metrics = !truth_pi_path.empty() || !truth_gini_path.empty();
  if (want_metrics) {
    std::ofstream f(out + "/metrics.csv", std::ios::binary);
    if (!f) throw IoError("cannot open " + out + "/metrics.csv for writing");
    f << "quantity,rmse_x100,cp,al\n";
    std::size_t n = store.n_draws();
    if (!truth_pi_path.empty()) {
      if (store.weights.empty())
        throw ConfigError("pi metrics need stored states; rerun fit with store_states=true");
      Eigen::MatrixXd truth_pi = read_truth_pi_csv(truth_pi_path);
      if (truth_pi.rows() != store.T || truth_pi.cols() != store.L)
        throw ConfigError("truth_pi dimensions do not match the draw store");
      Eigen::VectorXd flat_truth(store.T * store.L);
      Eigen::MatrixXd flat_draws(n, store.T * store.L);
      for (int t = 0; t < store.T; ++t)
        for (int l = 0; l < store.L; ++l) {
          flat_truth[t * store.L + l] = truth_pi(t, l);
          for (std::size_t i = 0; i < n; ++i)
            flat_draws(i, t * store.L + l) = store.weights[i](t, l);
        }
      IntervalMetrics m = interval_metrics(flat_truth, flat_draws);
      f << "pi," << format_double(m.rmse_x100) << ',' << format_double(m.cp) << ','
        << format_double(m.al) << '\n';
    }
    if (!truth_gini_path.empty()) {
      Eigen::VectorXd truth_gini = read_truth_gini_csv(truth_gini_path);
      if (truth_gini.size() != store.T)
        throw ConfigError("truth_gini length does not match the draw store");
      Eigen::MatrixXd gini_draws(n, store.T);
      for (std::size_t i = 0; i < n; ++i) gini_draws.row(i) = store.gini[i].transpose();
      IntervalMetrics m = interval_metrics(truth_gini, gini_draws);
      f << "gini," << format_double(m.rmse_x100) << ',' << format_double(m.cp) << ','
        << format_double(m.al) << '\n';
    }
    if (!f.flush()) throw IoError("error while writing " + out + "/metrics.csv");
    std::cout << "wrote " << out << "/metrics.csv\n";
  }

  if (!panel_path.empty()) {
    if (store.weights.empty())
      throw ConfigError("predictive loss needs stored states; rerun fit with store_states=true");
    FunctionalPanel panel = read_panel_csv(panel_path);
    json manifest = read_json_file(draws_dir + "/manifest.json");
    auto basis = basis_from_manifest(manifest);
    if (!basis) throw ConfigError(draws_dir + "/manifest.json lacks the basis specification");
    if (panel.T() != store.T || panel.K() != basis->K())
      throw ConfigError("panel dimensions do not match the draw store");
    std::uint64_t seed = manifest.contains("config")
                             ? manifest.at("config").at("mcmc").at("seed").get<std::uint64_t>()
                             : 0;
    RngStream rng(seed, 1000000007ULL);  // fixed side stream, independent of the chains
    auto reps = predictive_replicates(rng, store, *basis);
    PredictiveLoss loss = posterior_predictive_loss(panel.y, reps);
    std::ofstream f(out + "/loss.csv", std::ios::binary);
    if (!f) throw IoError("cannot open " + out + "/loss.csv for writing");
    f << "ppv,ppse,log_ppv,log_ppse\n";
    f << format_double(loss.ppv) << ',' << format_double(loss.ppse) << ','
      << format_double(loss.log_ppv) << ',' << format_double(loss.log_ppse) << '\n';
    if (!f.flush()) throw IoError("error while writing " + out + "/loss.csv");
    std::cout << "wrote " << out << "/loss.csv\n";
  }
  return 0;
}

// ---------------------------------------------------------------------- gini

int cmd_gini(const std::string& draws_dir, const std::string& panel_path,
             const std::string& truth_gini_path, std::string out) {
  DrawStore store = read_draw_store(draws_dir);
  if (store.n_draws() == 0) throw NumericalError("draw store in " + draws_dir + " is empty");
  FunctionalPanel panel = read_panel_csv(panel_path);
  if (panel.T() != store.T) throw ConfigError("panel length does not match the draw store");
  Eigen::VectorXd truth;
  if (!truth_gini_path.empty()) {
    truth = read_truth_gini_csv(truth_gini_path);
    if (truth.size() != store.T) throw ConfigError("truth_gini length does not match");
  }
  if (out.empty()) out = draws_dir;
  ensure_directory(out);

  std::size_t n = store.n_draws();
  std::vector<double> col(n);
  int skipped = 0;
  std::ofstream f(out + "/gini_summary.csv", std::ios::binary);
  if (!f) throw IoError("cannot open " + out + "/gini_summary.csv for writing");
  f << "t,mean,q025,q975,lower_bound,upper_bound";
  if (truth.size() > 0) f << ",gini_true";
  f << '\n';
  for (int t = 0; t < store.T; ++t) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = store.gini[i][t];
      mean += col[i];
    }
    mean /= n;
    f << (t + 1) << ',' << format_double(mean) << ','
      << format_double(sample_quantile(col, 0.025)) << ','
      << format_double(sample_quantile(col, 0.975)) << ',';
    // Bounds from the raw Lorenz points; noisy rows can violate
    // monotonicity, in which case the bound cells stay empty.
    try {
      std::vector<double> frow(panel.K());
      for (int k = 0; k < panel.K(); ++k) frow[k] = panel.y(t, k);
      auto bounds = polygon_gini_bounds(panel.arguments, frow);
      f << format_double(bounds.first) << ',' << format_double(bounds.second);
    } catch (const DomainError&) {
      ++skipped;
      f << ',';
    }
    if (truth.size() > 0) f << ',' << format_double(truth[t]);
    f << '\n';
  }
  if (!f.flush()) throw IoError("error while writing " + out + "/gini_summary.csv");
  if (skipped > 0)
    std::cerr << "warning: " << skipped
              << " time points had non-monotone raw curves; bounds left empty\n";
  std::cout << "wrote " << out << "/gini_summary.csv (" << store.T << " time points)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic convex-combination model for grouped distributional panels"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic panel with known truth");
  int K = 4;
  double phi = 0.95;
  std::uint64_t sim_seed = 1;
  std::string sim_out = ".";
  sim->add_option("--K", K, "Number of grid points per curve");
  sim->add_option("--phi", phi, "AR coefficient of the latent states");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "Output directory");

  auto* fit = app.add_subcommand("fit", "Run the Gibbs sampler from a JSON configuration");
  std::string config_path;
  std::uint64_t fit_seed = 0;
  int fit_threads = -1;
  std::string fit_out;
  fit->add_option("--config", config_path, "Run configuration (JSON)")->required();
  auto* seed_opt = fit->add_option("--seed", fit_seed, "Override the configured seed");
  auto* threads_opt = fit->add_option("--threads", fit_threads, "Override the thread count");
  auto* out_opt = fit->add_option("--out", fit_out, "Override the output directory");

  auto* summ = app.add_subcommand("summarize", "Posterior summaries from a stored fit");
  std::string s_draws, s_truth_pi, s_truth_gini, s_panel, s_out;
  summ->add_option("--draws", s_draws, "Directory written by fit")->required();
  summ->add_option("--truth-pi", s_truth_pi, "Truth weights CSV for metric rows");
  summ->add_option("--truth-gini", s_truth_gini, "Truth Gini CSV for metric rows");
  summ->add_option("--panel", s_panel, "Observed panel CSV for predictive loss");
  summ->add_option("--out", s_out, "Output directory (default: the draws directory)");

  auto* gini = app.add_subcommand("gini", "Posterior Gini series with nonparametric bounds");
  std::string g_draws, g_panel, g_truth, g_out;
  gini->add_option("--draws", g_draws, "Directory written by fit")->required();
  gini->add_option("--panel", g_panel, "Observed panel CSV")->required();
  gini->add_option("--truth-gini", g_truth, "Truth Gini CSV (adds a truth column)");
  gini->add_option("--out", g_out, "Output directory (default: the draws directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(K, phi, sim_seed, sim_out);
    if (fit->parsed())
      return cmd_fit(config_path,
                     seed_opt->count() ? std::optional<std::uint64_t>(fit_seed) : std::nullopt,
                     threads_opt->count() ? std::optional<int>(fit_threads) : std::nullopt,
                     out_opt->count() ? std::optional<std::string>(fit_out) : std::nullopt);
    if (summ->parsed()) return cmd_summarize(s_draws, s_truth_pi, s_truth_gini, s_panel, s_out);
    if (gini->parsed()) return cmd_gini(g_draws, g_panel, g_truth, g_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const AccuracyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
