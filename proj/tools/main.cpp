// Command-line front end: ingest raw rating/trust dumps, run cross-validated
// method comparisons, sweep theta or the list length, and dump the degree
// distribution of recommended objects. Data goes to files or stdout,
// diagnostics to stderr. Exit status: 0 ok, 1 usage error, 2 data error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "diffrec/commands.hpp"

namespace {

constexpr const char* kMethodsHelp =
    "Comma-separated methods: GR, UCF, HC, MD, CosRA, CosRA_T (default: all six)";

std::vector<std::string> split_method_list(const std::string& text) {
  std::vector<std::string> names;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) names.push_back(token);
  }
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network-diffusion recommenders over rating + trust graphs"};
  app.require_subcommand(1);

  // --- ingest ---------------------------------------------------------
  diffrec::IngestOptions ingest;
  auto* cmd_ingest = app.add_subcommand("ingest", "Convert raw TSV dumps to a canonical dataset");
  cmd_ingest->add_option("--ratings", ingest.ratings_path, "Raw rating file (user object rating)")
      ->required();
  cmd_ingest->add_option("--trust", ingest.trust_path, "Raw trust file (truster trustee)")
      ->required();
  cmd_ingest->add_option("--threshold", ingest.threshold,
                         "Keep ratings >= this value")
      ->capture_default_str();
  cmd_ingest->add_option("--out", ingest.out_path, "Canonical dataset output path")->required();

  // --- evaluate -------------------------------------------------------
  diffrec::EvaluateOptions evaluate;
  std::string eval_methods = "GR,UCF,HC,MD,CosRA,CosRA_T";
  std::string eval_lengths = "10";
  auto* cmd_eval = app.add_subcommand("evaluate", "Cross-validated method comparison");
  cmd_eval->add_option("--dataset", evaluate.dataset_path, "Canonical dataset file")->required();
  cmd_eval->add_option("--methods", eval_methods, kMethodsHelp)->capture_default_str();
  cmd_eval->add_option("--L", eval_lengths, "List length(s), e.g. 10 or 10,20,50")
      ->capture_default_str();
  cmd_eval->add_option("--theta", evaluate.theta, "Scaling parameter for CosRA_T")
      ->capture_default_str();
  cmd_eval->add_option("--folds", evaluate.folds, "Cross-validation folds")->capture_default_str();
  cmd_eval->add_option("--realizations", evaluate.realizations, "Independent realizations")
      ->capture_default_str();
  cmd_eval->add_option("--seed", evaluate.seed, "Base RNG seed")->capture_default_str();
  cmd_eval->add_option("--workers", evaluate.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
  cmd_eval->add_option("--out", evaluate.out_csv, "Report CSV path");
  cmd_eval->add_option("--json", evaluate.out_json, "Report JSON path (embeds the config)");

  // --- sweep-theta ----------------------------------------------------
  diffrec::SweepThetaOptions sweep_theta;
  std::string theta_grid = "0:1:0.05";
  std::string sweep_theta_lengths = "10";
  auto* cmd_stheta = app.add_subcommand("sweep-theta", "CosRA_T accuracy across a theta grid");
  cmd_stheta->add_option("--dataset", sweep_theta.dataset_path, "Canonical dataset file")
      ->required();
  cmd_stheta->add_option("--grid", theta_grid, "Theta grid, lo:hi:step or comma list")
      ->capture_default_str();
  cmd_stheta->add_option("--L", sweep_theta_lengths, "List length(s) for P/R/F1")
      ->capture_default_str();
  cmd_stheta->add_option("--folds", sweep_theta.folds, "Cross-validation folds")
      ->capture_default_str();
  cmd_stheta->add_option("--realizations", sweep_theta.realizations, "Independent realizations")
      ->capture_default_str();
  cmd_stheta->add_option("--seed", sweep_theta.seed, "Base RNG seed")->capture_default_str();
  cmd_stheta->add_option("--workers", sweep_theta.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
  cmd_stheta->add_option("--out", sweep_theta.out_csv, "Sweep CSV path");

  // --- sweep-length ---------------------------------------------------
  diffrec::SweepLengthOptions sweep_length;
  std::string length_methods = "GR,UCF,HC,MD,CosRA,CosRA_T";
  std::string length_grid = "1:100";
  auto* cmd_slen = app.add_subcommand("sweep-length", "Metrics across a list-length grid");
  cmd_slen->add_option("--dataset", sweep_length.dataset_path, "Canonical dataset file")
      ->required();
  cmd_slen->add_option("--methods", length_methods, kMethodsHelp)->capture_default_str();
  cmd_slen->add_option("--L", length_grid, "L grid, lo:hi[:step] or comma list")
      ->capture_default_str();
  cmd_slen->add_option("--theta", sweep_length.theta, "Scaling parameter for CosRA_T")
      ->capture_default_str();
  cmd_slen->add_option("--folds", sweep_length.folds, "Cross-validation folds")
      ->capture_default_str();
  cmd_slen->add_option("--realizations", sweep_length.realizations, "Independent realizations")
      ->capture_default_str();
  cmd_slen->add_option("--seed", sweep_length.seed, "Base RNG seed")->capture_default_str();
  cmd_slen->add_option("--workers", sweep_length.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
  cmd_slen->add_option("--out", sweep_length.out_csv, "Report CSV path");

  // --- degree-dist ----------------------------------------------------
  diffrec::DegreeDistOptions degree_dist;
  auto* cmd_ddist =
      app.add_subcommand("degree-dist", "Degree histogram of recommended objects (fold 0)");
  cmd_ddist->add_option("--dataset", degree_dist.dataset_path, "Canonical dataset file")
      ->required();
  cmd_ddist->add_option("--method", degree_dist.method, "One method name")->capture_default_str();
  cmd_ddist->add_option("--theta", degree_dist.theta, "Scaling parameter for CosRA_T")
      ->capture_default_str();
  cmd_ddist->add_option("--L", degree_dist.L, "List length")->capture_default_str();
  cmd_ddist->add_option("--folds", degree_dist.folds, "Folds in the underlying split")
      ->capture_default_str();
  cmd_ddist->add_option("--seed", degree_dist.seed, "RNG seed")->capture_default_str();
  cmd_ddist->add_option("--workers", degree_dist.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
  cmd_ddist->add_option("--out", degree_dist.out_csv, "Histogram CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_ingest->parsed()) {
      diffrec::cmd_ingest(ingest, std::cerr);
    } else if (cmd_eval->parsed()) {
      evaluate.methods = split_method_list(eval_methods);
      evaluate.list_lengths = diffrec::parse_length_grid(eval_lengths);
      diffrec::cmd_evaluate(evaluate, std::cout, std::cerr);
    } else if (cmd_stheta->parsed()) {
      sweep_theta.grid = diffrec::parse_theta_grid(theta_grid);
      sweep_theta.list_lengths = diffrec::parse_length_grid(sweep_theta_lengths);
      diffrec::cmd_sweep_theta(sweep_theta, std::cout, std::cerr);
    } else if (cmd_slen->parsed()) {
      sweep_length.methods = split_method_list(length_methods);
      sweep_length.length_grid = diffrec::parse_length_grid(length_grid);
      const diffrec::MetricsReport report = diffrec::cmd_sweep_length(sweep_length, std::cerr);
      if (sweep_length.out_csv.empty()) diffrec::write_report_csv(std::cout, report);
    } else if (cmd_ddist->parsed()) {
      const diffrec::DegreeHistogram hist = diffrec::cmd_degree_dist(degree_dist, std::cerr);
      if (degree_dist.out_csv.empty()) diffrec::write_histogram_csv(std::cout, hist);
    }
  } catch (const diffrec::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
