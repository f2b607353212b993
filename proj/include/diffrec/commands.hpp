#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "diffrec/harness.hpp"

namespace diffrec {

/// Bad flag values or unknown names; the CLI maps this to exit status 1.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// "0:1:0.05" or "0.1,0.5,0.9" -> ascending theta grid in [0, 1].
std::vector<double> parse_theta_grid(const std::string& text);

/// "1:100", "1:100:5" or "1,2,5,10" -> ascending unique list lengths.
std::vector<std::uint32_t> parse_length_grid(const std::string& text);

/// Method names (comma-separated in the CLI) -> configs; CosRA_T picks up
/// theta. Unknown names raise UsageError listing the valid ones.
std::vector<MethodConfig> parse_methods(const std::vector<std::string>& names, double theta);

struct IngestOptions {
  std::filesystem::path ratings_path;
  std::filesystem::path trust_path;
  std::filesystem::path out_path;
  int threshold = 3;
};

/// Raw files -> canonical dataset file; ingest statistics go to `info`.
void cmd_ingest(const IngestOptions& opt, std::ostream& info);

struct EvaluateOptions {
  std::filesystem::path dataset_path;
  std::vector<std::string> methods{"GR", "UCF", "HC", "MD", "CosRA", "CosRA_T"};
  std::vector<std::uint32_t> list_lengths{10};
  double theta = 0.70;
  std::uint32_t folds = 10;
  std::uint32_t realizations = 20;
  std::uint64_t seed = kDefaultSeed;
  std::uint32_t workers = 0;
  std::filesystem::path out_csv;   // empty -> no CSV file
  std::filesystem::path out_json;  // empty -> no JSON file
};

/// Full cross-validated comparison; writes the CSV/JSON reports and echoes a
/// table-shaped summary (one method per row) to `table_out`.
MetricsReport cmd_evaluate(const EvaluateOptions& opt, std::ostream& table_out,
                           std::ostream& info);

struct SweepThetaOptions {
  std::filesystem::path dataset_path;
  std::vector<double> grid;  // default 0:1:0.05
  std::vector<std::uint32_t> list_lengths{10};
  std::uint32_t folds = 10;
  std::uint32_t realizations = 20;
  std::uint64_t seed = kDefaultSeed;
  std::uint32_t workers = 0;
  std::filesystem::path out_csv;
};

ThetaSweepResult cmd_sweep_theta(const SweepThetaOptions& opt, std::ostream& summary_out,
                                 std::ostream& info);

struct SweepLengthOptions {
  std::filesystem::path dataset_path;
  std::vector<std::string> methods{"GR", "UCF", "HC", "MD", "CosRA", "CosRA_T"};
  std::vector<std::uint32_t> length_grid;  // default 1:100
  double theta = 0.70;
  std::uint32_t folds = 10;
  std::uint32_t realizations = 20;
  std::uint64_t seed = kDefaultSeed;
  std::uint32_t workers = 0;
  std::filesystem::path out_csv;
};

MetricsReport cmd_sweep_length(const SweepLengthOptions& opt, std::ostream& info);

struct DegreeDistOptions {
  std::filesystem::path dataset_path;
  std::string method = "CosRA";
  double theta = 0.70;
  std::uint32_t L = 10;
  std::uint32_t folds = 10;
  std::uint64_t seed = kDefaultSeed;
  std::uint32_t workers = 0;
  std::filesystem::path out_csv;
};

DegreeHistogram cmd_degree_dist(const DegreeDistOptions& opt, std::ostream& info);

}  // namespace diffrec
