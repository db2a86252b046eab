#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "fssm/core.hpp"
#include "fssm/gibbs.hpp"

namespace fssm {

// ---------------------------------------------------------------- CSV files

// Long format, header "t,x,y"; rows ordered by t then x.
void write_panel_csv(const std::string& path, const FunctionalPanel& panel);
FunctionalPanel read_panel_csv(const std::string& path);

// Header "t,l,pi_true" with t = 1..T, l = 1..L.
void write_truth_pi_csv(const std::string& path, const Eigen::MatrixXd& pi);
Eigen::MatrixXd read_truth_pi_csv(const std::string& path);

// Header "t,gini_true".
void write_truth_gini_csv(const std::string& path, const Eigen::VectorXd& gini);
Eigen::VectorXd read_truth_gini_csv(const std::string& path);

// --------------------------------------------------------------- DrawStore

// Writes params.csv (chain,iter,name,value), gini.csv (chain,iter,t,value)
// and, when states were stored, weights.csv (chain,iter,t,l,value) into dir.
void write_draw_store(const std::string& dir, const DrawStore& store);

// Reads the files above plus draws_meta.json back. Inconsistent row counts
// raise NumericalError (truncated store).
DrawStore read_draw_store(const std::string& dir);

// -------------------------------------------------------------- RunConfig

struct RunConfig {
  std::string model = "fssm";  // "fssm" or "mixture"
  std::vector<BasisFunction> basis;
  std::string input;  // panel CSV path
  std::string out = ".";
  McmcConfig mcmc;
  PriorHyperparams priors;  // sized to basis.size() - 1

  void validate() const;  // throws ConfigError listing every violation
  // check_paths: also require the referenced input file to exist.
  void collect_violations(std::vector<std::string>& violations, bool check_paths) const;
};

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

RunConfig read_run_config(const std::string& path);
void write_run_config(const std::string& path, const RunConfig& config);

// --------------------------------------------------------------- Manifest

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

// Deviation notes recorded in every manifest (conditional-update reading of
// the AR coefficient step; polygon bound arithmetic).
std::vector<std::string> manifest_deviation_notes();

// Shared helpers.
std::string format_double(double x);  // shortest round-trippable decimal
void ensure_directory(const std::string& dir);

}  // namespace fssm
