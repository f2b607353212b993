#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "diffrec/ingest.hpp"
#include "diffrec/metrics.hpp"
#include "diffrec/recommend.hpp"

namespace diffrec {

/// Fixed default so repeated runs are reproducible by default.
inline constexpr std::uint64_t kDefaultSeed = 42;

/// Unbiased draw from [0, bound) by rejection. mt19937_64's output sequence
/// is pinned by the standard, so splits are identical across platforms
/// (std::shuffle and the std distributions are not).
std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t bound);

/// Assignment of every rating link (canonical user-major order) to one of k
/// near-equal folds; sizes differ by at most 1.
struct SplitPlan {
  std::uint32_t folds = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> fold_of_link;
};

/// Fisher-Yates over the link order, then round-robin fold assignment.
/// Throws std::invalid_argument when the graph has fewer links than folds.
SplitPlan make_split(const RatingGraph& g, std::uint32_t folds, std::uint64_t seed);

struct ExperimentConfig {
  std::vector<MethodConfig> methods;
  std::vector<std::uint32_t> list_lengths{10};  // ascending, unique
  std::uint32_t folds = 10;
  std::uint32_t realizations = 20;
  std::uint64_t seed = kDefaultSeed;
  std::uint32_t workers = 0;  // 0 = all hardware threads
};

/// Throws std::invalid_argument on any violated invariant (folds >= 2,
/// realizations >= 1, nonempty ascending L grid, theta in [0, 1], ...).
void validate_config(const ExperimentConfig& cfg);

enum class MetricId { AUC, RS, P, R, F1, H, I, N };
std::string_view metric_name(MetricId id);

/// One metric evaluated on one (method, fold). `defined` is false when the
/// fold left the metric with no evaluable user (the run continues).
struct FoldRow {
  std::size_t method = 0;  // index into ExperimentConfig::methods
  MetricId metric = MetricId::AUC;
  std::optional<std::uint32_t> L;
  bool defined = false;
  double value = 0.0;
  double evaluable_users = 0.0;
};

/// Trains on the other k-1 folds, scores every evaluable user once per
/// method, and evaluates all eight metrics at every configured L from the
/// same score vectors. Trust links are never split. Row order is fixed:
/// per method, AUC, RS, then P,R,F1,H,I,N per L.
std::vector<FoldRow> run_fold(const Dataset& d, const SplitPlan& plan, std::uint32_t fold_index,
                              const ExperimentConfig& cfg);

struct RawFoldRecord {
  std::uint32_t realization = 0;
  std::uint32_t fold = 0;
  std::vector<FoldRow> rows;
};

struct ReportRow {
  std::string method;
  std::optional<double> theta;  // present for CosRA_T
  MetricId metric = MetricId::AUC;
  std::optional<std::uint32_t> L;
  bool defined = false;
  double mean = 0.0;
  double stderr_mean = 0.0;   // standard error across realizations
  double evaluable_users = 0.0;  // mean across contributing folds
};

struct MetricsReport {
  std::string dataset_name;
  ExperimentConfig config;
  std::vector<ReportRow> rows;
  std::vector<RawFoldRecord> raw;  // every fold result, for audit/recomputation
};

/// Per realization r: a fresh split seeded seed + r, fold results averaged
/// within the realization, then mean and standard error across realizations.
MetricsReport run_experiment(const Dataset& d, const ExperimentConfig& cfg,
                             std::string dataset_name = "");

/// Same, but over caller-supplied split plans (one per realization); the
/// theta sweep uses this so every grid point sees identical partitions.
MetricsReport run_experiment_with_plans(const Dataset& d, const ExperimentConfig& cfg,
                                        std::span<const SplitPlan> plans,
                                        std::string dataset_name = "");

struct ThetaSweepResult {
  std::vector<double> grid;
  std::vector<MetricsReport> reports;  // one per grid point, split-paired
  /// Per accuracy metric, the grid theta with the best mean (max for AUC, P,
  /// R, F1; min for RS); the L-dependent ones are the per-L argmax averaged
  /// over the L grid.
  std::vector<std::pair<std::string, double>> theta_star;
  double mean_theta_star = 0.0;  // average of the five entries above
};

/// One paired run per grid point with methods = {CosRA_T at theta}.
ThetaSweepResult sweep_theta(const Dataset& d, ExperimentConfig cfg, std::span<const double> grid,
                             std::string dataset_name = "");

/// An L sweep is a plain experiment: scores are computed once per user and
/// every L is read off the same vectors.
MetricsReport sweep_length(const Dataset& d, ExperimentConfig cfg,
                           std::span<const std::uint32_t> length_grid,
                           std::string dataset_name = "");

/// Training-degree counts over all objects in all evaluable users' top-L
/// lists, for fold 0 of one split.
struct DegreeHistogram {
  std::vector<std::pair<Index, std::uint64_t>> bins;  // (degree, count), degree ascending
  std::uint64_t total() const;
};

DegreeHistogram recommended_degree_distribution(const Dataset& d, const MethodConfig& method,
                                                std::uint32_t L, std::uint32_t folds,
                                                std::uint64_t seed, std::uint32_t workers = 0);

// Report serialization. CSV rows are `method,metric,L,theta,mean,stderr,
// evaluable_users` (L and theta empty where not applicable, nan for
// undefined rows); JSON embeds the full config for provenance.
void write_report_csv(std::ostream& out, const MetricsReport& report);
void write_report_json(std::ostream& out, const MetricsReport& report);
void write_sweep_theta_csv(std::ostream& out, const ThetaSweepResult& sweep);
void write_histogram_csv(std::ostream& out, const DegreeHistogram& hist);

}  // namespace diffrec
