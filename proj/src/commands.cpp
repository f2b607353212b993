#include "diffrec/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace diffrec {

namespace {

constexpr const char* kValidMethods = "GR, UCF, HC, MD, CosRA, CosRA_T";

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) parts.push_back(token);
  }
  return parts;
}

double parse_double(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("expected ") + what + ", got '" + text + "'");
  }
}

std::uint32_t parse_u32(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(text, &used);
    if (used != text.size() || v > 0xffffffffUL) throw std::invalid_argument(text);
    return static_cast<std::uint32_t>(v);
  } catch (const std::exception&) {
    throw UsageError(std::string("expected ") + what + ", got '" + text + "'");
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path.string() + ": cannot open for writing");
  return out;
}

Dataset load_dataset(const std::filesystem::path& path, std::ostream& info) {
  LoadReport report;
  Dataset d = read_canonical(path, &report);
  info << "loaded " << path.string() << ": m=" << d.ratings.user_count()
       << " n=" << d.ratings.object_count() << " l_R=" << d.ratings.link_count()
       << " l_T=" << d.trust.edge_count() << "\n";
  return d;
}

}  // namespace

std::vector<double> parse_theta_grid(const std::string& text) {
  std::vector<double> grid;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto parts = split_commas(text);  // guard against mixed syntax
    if (parts.size() != 1) throw UsageError("grid must be 'lo:hi:step' or a comma list");
    const auto second = text.find(':', colon + 1);
    if (second == std::string::npos) throw UsageError("grid range needs 'lo:hi:step'");
    const double lo = parse_double(text.substr(0, colon), "a number");
    const double hi = parse_double(text.substr(colon + 1, second - colon - 1), "a number");
    const double step = parse_double(text.substr(second + 1), "a step");
    if (step <= 0.0 || hi < lo) throw UsageError("grid range needs lo <= hi and step > 0");
    const auto count = static_cast<std::size_t>(std::round((hi - lo) / step)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      double v = lo + static_cast<double>(i) * step;
      if (v > hi || std::abs(v - hi) < step * 1e-9) v = hi;
      grid.push_back(v);
    }
  } else {
    for (const auto& part : split_commas(text)) grid.push_back(parse_double(part, "a number"));
  }
  if (grid.empty()) throw UsageError("empty theta grid");
  for (double v : grid) {
    if (!(v >= 0.0 && v <= 1.0)) throw UsageError("theta values must lie in [0, 1]");
  }
  if (!std::is_sorted(grid.begin(), grid.end())) throw UsageError("theta grid must be ascending");
  return grid;
}

std::vector<std::uint32_t> parse_length_grid(const std::string& text) {
  std::vector<std::uint32_t> grid;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto second = text.find(':', colon + 1);
    const std::uint32_t lo = parse_u32(text.substr(0, colon), "an integer");
    const std::uint32_t hi =
        parse_u32(second == std::string::npos ? text.substr(colon + 1)
                                              : text.substr(colon + 1, second - colon - 1),
                  "an integer");
    const std::uint32_t step =
        second == std::string::npos ? 1 : parse_u32(text.substr(second + 1), "a step");
    if (step == 0 || hi < lo) throw UsageError("L range needs lo <= hi and step >= 1");
    for (std::uint64_t v = lo; v <= hi; v += step) grid.push_back(static_cast<std::uint32_t>(v));
  } else {
    for (const auto& part : split_commas(text)) grid.push_back(parse_u32(part, "an integer"));
  }
  if (grid.empty()) throw UsageError("empty L grid");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.front() == 0) throw UsageError("L must be >= 1");
  return grid;
}

std::vector<MethodConfig> parse_methods(const std::vector<std::string>& names, double theta) {
  std::vector<MethodConfig> configs;
  for (const auto& name : names) {
    const auto method = parse_method(name);
    if (!method) {
      throw UsageError("unknown method '" + name + "'; valid names: " + kValidMethods);
    }
    configs.push_back({*method, *method == Method::CosRA_T ? theta : 1.0});
  }
  if (configs.empty()) throw UsageError("no methods selected");
  return configs;
}

void cmd_ingest(const IngestOptions& opt, std::ostream& info) {
  if (opt.threshold < 1 || opt.threshold > 5) throw UsageError("threshold must lie in [1, 5]");

  const auto raw = read_raw_ratings(opt.ratings_path);
  const auto kept = threshold_ratings(raw, opt.threshold);
  if (kept.empty()) {
    throw ParseError(opt.ratings_path.string() + ": no links after thresholding (threshold=" +
                     std::to_string(opt.threshold) + ", " + std::to_string(raw.size()) +
                     " ratings read)");
  }
  const auto trust_edges = read_raw_trust(opt.trust_path);

  LoadReport report;
  report.ratings_below_threshold = raw.size() - kept.size();
  const Dataset d = assemble_dataset(kept, trust_edges, &report);
  write_canonical(d, opt.out_path);

  const double m = static_cast<double>(d.ratings.user_count());
  const double n = static_cast<double>(d.ratings.object_count());
  const double lr = static_cast<double>(d.ratings.link_count());
  const double lt = static_cast<double>(d.trust.edge_count());
  char sparsity[64];
  info << "users (m):            " << d.ratings.user_count() << "\n";
  info << "objects (n):          " << d.ratings.object_count() << "\n";
  info << "rating links (l_R):   " << d.ratings.link_count() << "\n";
  info << "trust links (l_T):    " << d.trust.edge_count() << "\n";
  std::snprintf(sparsity, sizeof sparsity, "%.3g", lr / (m * n));
  info << "rating sparsity S_R:  " << sparsity << "\n";
  std::snprintf(sparsity, sizeof sparsity, "%.3g", lt / (m * m));
  info << "trust sparsity S_T:   " << sparsity << "\n";
  info << "dropped: " << report.ratings_below_threshold << " below-threshold ratings, "
       << report.duplicate_rating_links << " duplicate rating links, " << report.dropped_trust
       << " trust edges with unrated endpoints, " << report.dropped_trust_self_loops
       << " trust self-loops, " << report.duplicate_trust_links << " duplicate trust edges\n";
  info << "wrote " << opt.out_path.string() << "\n";
}

namespace {

void print_summary_table(std::ostream& out, const MetricsReport& report, std::uint32_t L) {
  out << "method           AUC     RS      P(L)    R(L)    F1(L)   H(L)    I(L)    N(L)   [L=" << L
      << "]\n";
  for (std::size_t mi = 0; mi < report.config.methods.size(); ++mi) {
    const auto& mc = report.config.methods[mi];
    std::string label(method_name(mc.method));
    if (mc.method == Method::CosRA_T) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "(t=%.2f)", mc.theta);
      label += buf;
    }
    char cell[32];
    std::snprintf(cell, sizeof cell, "%-16s", label.c_str());
    out << cell;
    const MetricId order[] = {MetricId::AUC, MetricId::RS, MetricId::P,  MetricId::R,
                              MetricId::F1,  MetricId::H,  MetricId::I, MetricId::N};
    for (MetricId id : order) {
      const bool l_dependent = id != MetricId::AUC && id != MetricId::RS;
      const std::optional<std::uint32_t> want = l_dependent ? std::optional(L) : std::nullopt;
      double value = std::numeric_limits<double>::quiet_NaN();
      for (const auto& row : report.rows) {
        if (row.method == method_name(mc.method) && row.metric == id && row.L == want &&
            (mc.method != Method::CosRA_T || row.theta == mc.theta)) {
          value = row.defined ? row.mean : std::numeric_limits<double>::quiet_NaN();
          break;
        }
      }
      if (id == MetricId::N) {
        std::snprintf(cell, sizeof cell, " %-7.4g", value);
      } else {
        std::snprintf(cell, sizeof cell, " %-7.4f", value);
      }
      out << cell;
    }
    out << "\n";
  }
}

}  // namespace

MetricsReport cmd_evaluate(const EvaluateOptions& opt, std::ostream& table_out,
                           std::ostream& info) {
  ExperimentConfig cfg;
  cfg.methods = parse_methods(opt.methods, opt.theta);
  cfg.list_lengths = opt.list_lengths;
  std::sort(cfg.list_lengths.begin(), cfg.list_lengths.end());
  cfg.list_lengths.erase(std::unique(cfg.list_lengths.begin(), cfg.list_lengths.end()),
                         cfg.list_lengths.end());
  cfg.folds = opt.folds;
  cfg.realizations = opt.realizations;
  cfg.seed = opt.seed;
  cfg.workers = opt.workers;
  try {
    validate_config(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const Dataset d = load_dataset(opt.dataset_path, info);
  MetricsReport report = run_experiment(d, cfg, opt.dataset_path.filename().string());

  if (!opt.out_csv.empty()) {
    auto out = open_output(opt.out_csv);
    write_report_csv(out, report);
    info << "wrote " << opt.out_csv.string() << "\n";
  }
  if (!opt.out_json.empty()) {
    auto out = open_output(opt.out_json);
    write_report_json(out, report);
    info << "wrote " << opt.out_json.string() << "\n";
  }
  print_summary_table(table_out, report, cfg.list_lengths.front());
  return report;
}

ThetaSweepResult cmd_sweep_theta(const SweepThetaOptions& opt, std::ostream& summary_out,
                                 std::ostream& info) {
  ExperimentConfig cfg;
  cfg.methods = {{Method::CosRA_T, 1.0}};
  cfg.list_lengths = opt.list_lengths;
  cfg.folds = opt.folds;
  cfg.realizations = opt.realizations;
  cfg.seed = opt.seed;
  cfg.workers = opt.workers;
  try {
    validate_config(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<double> grid = opt.grid;
  if (grid.empty()) grid = parse_theta_grid("0:1:0.05");

  const Dataset d = load_dataset(opt.dataset_path, info);
  ThetaSweepResult sweep = sweep_theta(d, cfg, grid, opt.dataset_path.filename().string());

  if (!opt.out_csv.empty()) {
    auto out = open_output(opt.out_csv);
    write_sweep_theta_csv(out, sweep);
    info << "wrote " << opt.out_csv.string() << "\n";
  }
  summary_out << "metric,theta_star\n";
  for (const auto& [metric, theta] : sweep.theta_star) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", theta);
    summary_out << metric << "," << buf << "\n";
  }
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", sweep.mean_theta_star);
    summary_out << "mean," << buf << "\n";
  }
  return sweep;
}

MetricsReport cmd_sweep_length(const SweepLengthOptions& opt, std::ostream& info) {
  ExperimentConfig cfg;
  cfg.methods = parse_methods(opt.methods, opt.theta);
  cfg.folds = opt.folds;
  cfg.realizations = opt.realizations;
  cfg.seed = opt.seed;
  cfg.workers = opt.workers;
  std::vector<std::uint32_t> grid = opt.length_grid;
  if (grid.empty()) grid = parse_length_grid("1:100");
  cfg.list_lengths = grid;
  try {
    validate_config(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const Dataset d = load_dataset(opt.dataset_path, info);
  MetricsReport report = sweep_length(d, cfg, grid, opt.dataset_path.filename().string());
  if (!opt.out_csv.empty()) {
    auto out = open_output(opt.out_csv);
    write_report_csv(out, report);
    info << "wrote " << opt.out_csv.string() << "\n";
  }
  return report;
}

DegreeHistogram cmd_degree_dist(const DegreeDistOptions& opt, std::ostream& info) {
  const auto method = parse_method(opt.method);
  if (!method) {
    throw UsageError("unknown method '" + opt.method + "'; valid names: " + kValidMethods);
  }
  if (!(opt.theta >= 0.0 && opt.theta <= 1.0)) throw UsageError("theta must lie in [0, 1]");
  if (opt.L == 0) throw UsageError("L must be >= 1");
  if (opt.folds < 2) throw UsageError("folds must be >= 2");

  const Dataset d = load_dataset(opt.dataset_path, info);
  const MethodConfig mc{*method, *method == Method::CosRA_T ? opt.theta : 1.0};
  DegreeHistogram hist =
      recommended_degree_distribution(d, mc, opt.L, opt.folds, opt.seed, opt.workers);
  if (!opt.out_csv.empty()) {
    auto out = open_output(opt.out_csv);
    write_histogram_csv(out, hist);
    info << "wrote " << opt.out_csv.string() << "\n";
  }
  return hist;
}

}  // namespace diffrec
