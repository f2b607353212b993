#include "diffrec/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace diffrec {

std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t rem = max % bound;   // bound-1 iff 2^64 divides evenly
  const bool exact = rem == bound - 1;
  std::uint64_t r = rng();
  while (!exact && r >= max - rem) r = rng();
  return r % bound;
}

SplitPlan make_split(const RatingGraph& g, std::uint32_t folds, std::uint64_t seed) {
  const std::size_t links = g.link_count();
  if (folds == 0 || links < folds) {
    throw std::invalid_argument("make_split: need at least " + std::to_string(folds) +
                                " links, graph has " + std::to_string(links));
  }
  std::vector<std::size_t> order(links);
  for (std::size_t t = 0; t < links; ++t) order[t] = t;
  std::mt19937_64 rng(seed);
  for (std::size_t i = links - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_uniform(rng, i + 1));
    std::swap(order[i], order[j]);
  }
  SplitPlan plan;
  plan.folds = folds;
  plan.seed = seed;
  plan.fold_of_link.resize(links);
  for (std::size_t t = 0; t < links; ++t) {
    plan.fold_of_link[order[t]] = static_cast<std::uint32_t>(t % folds);
  }
  return plan;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.methods.empty()) throw std::invalid_argument("config: no methods selected");
  for (const auto& mc : cfg.methods) {
    if (!(mc.theta >= 0.0 && mc.theta <= 1.0)) {
      throw std::invalid_argument("config: theta must lie in [0, 1]");
    }
  }
  if (cfg.list_lengths.empty()) throw std::invalid_argument("config: empty L grid");
  for (std::size_t i = 0; i < cfg.list_lengths.size(); ++i) {
    if (cfg.list_lengths[i] == 0) throw std::invalid_argument("config: L must be >= 1");
    if (i > 0 && cfg.list_lengths[i] <= cfg.list_lengths[i - 1]) {
      throw std::invalid_argument("config: L grid must be ascending and unique");
    }
  }
  if (cfg.folds < 2) throw std::invalid_argument("config: folds must be >= 2");
  if (cfg.realizations < 1) throw std::invalid_argument("config: realizations must be >= 1");
}

std::string_view metric_name(MetricId id) {
  switch (id) {
    case MetricId::AUC: return "AUC";
    case MetricId::RS: return "RS";
    case MetricId::P: return "P";
    case MetricId::R: return "R";
    case MetricId::F1: return "F1";
    case MetricId::H: return "H";
    case MetricId::I: return "I";
    case MetricId::N: return "N";
  }
  return "?";
}

namespace {

std::uint32_t resolve_workers(std::uint32_t requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Static contiguous chunking; every item lands in a pre-assigned slot, so
/// the result is identical for any worker count.
void parallel_for(std::size_t count, std::uint32_t workers,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  const std::uint32_t used = static_cast<std::uint32_t>(
      std::min<std::size_t>(resolve_workers(workers), count));
  if (used <= 1) {
    body(0, count);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(used);
  const std::size_t chunk = (count + used - 1) / used;
  for (std::uint32_t w = 0; w < used; ++w) {
    const std::size_t begin = static_cast<std::size_t>(w) * chunk;
    const std::size_t end = std::min(begin + chunk, count);
    if (begin >= end) break;
    threads.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : threads) t.join();
}

struct PerUserTerms {
  bool present = false;
  UserRankStats rank;
  std::vector<Index> items;     // top-maxL
  std::vector<std::size_t> hits;  // per grid L
  std::vector<double> intra;      // per grid L (ordered-pair cosine sums)
  std::vector<double> degsum;     // per grid L
};

/// Cumulative per-L list terms read off one ranked prefix.
void fill_list_terms(const RatingGraph& train, const std::vector<Index>& probes,
                     std::span<const std::uint32_t> lengths, PerUserTerms& t) {
  const std::size_t grid = lengths.size();
  t.hits.assign(grid, 0);
  t.intra.assign(grid, 0.0);
  t.degsum.assign(grid, 0.0);
  std::size_t hits = 0;
  double intra = 0.0, degsum = 0.0;
  std::size_t g = 0;
  for (std::size_t y = 0; y < t.items.size() && g < grid; ++y) {
    const Index item = t.items[y];
    if (std::binary_search(probes.begin(), probes.end(), item)) ++hits;
    for (std::size_t x = 0; x < y; ++x) {
      intra += 2.0 * cosine_object_similarity(train, t.items[x], item);
    }
    degsum += static_cast<double>(train.object_degree(item));
    while (g < grid && lengths[g] == y + 1) {
      t.hits[g] = hits;
      t.intra[g] = intra;
      t.degsum[g] = degsum;
      ++g;
    }
  }
  for (; g < grid; ++g) {  // grid lengths beyond the list: whole-list values
    t.hits[g] = hits;
    t.intra[g] = intra;
    t.degsum[g] = degsum;
  }
}

}  // namespace

std::vector<FoldRow> run_fold(const Dataset& d, const SplitPlan& plan, std::uint32_t fold_index,
                              const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (fold_index >= plan.folds) throw std::invalid_argument("run_fold: fold index out of range");
  const RatingGraph& full = d.ratings;
  if (plan.fold_of_link.size() != full.link_count()) {
    throw std::invalid_argument("run_fold: split plan does not match the graph");
  }
  const Index m = full.user_count();
  const Index n = full.object_count();

  EvaluationContext ctx;
  ctx.probes.resize(m);
  std::vector<Link> train_links;
  train_links.reserve(full.link_count());
  std::size_t t = 0;
  for (Index u = 0; u < m; ++u) {
    for (Index o : full.objects_of(u)) {
      if (plan.fold_of_link[t] == fold_index) {
        ctx.probes[u].push_back(o);  // already ascending
      } else {
        train_links.emplace_back(u, o);
      }
      ++t;
    }
  }
  const RatingGraph train = RatingGraph::build(train_links, m, n);
  ctx.train = &train;

  std::vector<Index> eval_users;
  for (Index u = 0; u < m; ++u) {
    if (ctx.evaluable(u)) eval_users.push_back(u);
  }

  const auto& lengths = cfg.list_lengths;
  const std::uint32_t max_len = lengths.back();

  std::vector<FoldRow> rows;
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    const MethodConfig& mc = cfg.methods[mi];
    const TrustGraph* trust = mc.method == Method::CosRA_T ? &d.trust : nullptr;

    std::vector<PerUserTerms> terms(eval_users.size());
    parallel_for(eval_users.size(), cfg.workers, [&](std::size_t begin, std::size_t end) {
      ScoreWorkspace ws(m);
      ResourceVector scores;
      for (std::size_t s = begin; s < end; ++s) {
        const Index u = eval_users[s];
        score_user(train, trust, mc, u, ws, scores);
        auto stats = user_rank_stats(ctx, u, scores);
        PerUserTerms& out = terms[s];
        out.present = true;
        out.rank = *stats;  // eval_users only holds evaluable users
        out.items = top_l(u, scores, train.objects_of(u), max_len).items;
        fill_list_terms(train, ctx.probes[u], lengths, out);
      }
    });

    // Sequential reductions in user order: results are worker-count free.
    FoldRow auc_row{mi, MetricId::AUC, std::nullopt, false, 0.0, 0.0};
    FoldRow rs_row{mi, MetricId::RS, std::nullopt, false, 0.0, 0.0};
    {
      double auc_sum = 0.0, rs_sum = 0.0;
      std::size_t auc_users = 0, rs_users = 0, rs_terms = 0;
      for (const auto& term : terms) {
        if (term.rank.auc_defined) {
          auc_sum += term.rank.auc;
          ++auc_users;
        }
        if (term.rank.rs_terms > 0) {
          rs_sum += term.rank.rs_sum;
          rs_terms += term.rank.rs_terms;
          ++rs_users;
        }
      }
      if (auc_users > 0) {
        auc_row.defined = true;
        auc_row.value = auc_sum / static_cast<double>(auc_users);
        auc_row.evaluable_users = static_cast<double>(auc_users);
      }
      if (rs_terms > 0) {
        rs_row.defined = true;
        rs_row.value = rs_sum / static_cast<double>(rs_terms);
        rs_row.evaluable_users = static_cast<double>(rs_users);
      }
    }
    rows.push_back(auc_row);
    rows.push_back(rs_row);

    for (std::size_t li = 0; li < lengths.size(); ++li) {
      const std::uint32_t L = lengths[li];
      FoldRow p_row{mi, MetricId::P, L, false, 0.0, 0.0};
      FoldRow r_row{mi, MetricId::R, L, false, 0.0, 0.0};
      FoldRow f_row{mi, MetricId::F1, L, false, 0.0, 0.0};
      FoldRow h_row{mi, MetricId::H, L, false, 0.0, 0.0};
      FoldRow i_row{mi, MetricId::I, L, false, 0.0, 0.0};
      FoldRow n_row{mi, MetricId::N, L, false, 0.0, 0.0};

      double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0, intra_sum = 0.0, deg_sum = 0.0;
      double common = 0.0;
      std::size_t users = 0, listed_users = 0;
      std::vector<std::uint32_t> contained(n, 0);
      for (std::size_t s = 0; s < terms.size(); ++s) {
        const auto& term = terms[s];
        const Index u = eval_users[s];
        const double dL = static_cast<double>(term.hits[li]);
        const double pi = dL / static_cast<double>(L);
        const double ri = dL / static_cast<double>(ctx.probes[u].size());
        p_sum += pi;
        r_sum += ri;
        if (pi + ri > 0.0) f_sum += 2.0 * pi * ri / (pi + ri);
        intra_sum += term.intra[li];
        deg_sum += term.degsum[li];
        ++users;
        const std::size_t len = std::min<std::size_t>(L, term.items.size());
        if (len > 0) ++listed_users;
        for (std::size_t y = 0; y < len; ++y) ++contained[term.items[y]];
      }
      if (users > 0) {
        const double inv = 1.0 / static_cast<double>(users);
        p_row.defined = r_row.defined = f_row.defined = n_row.defined = true;
        p_row.value = p_sum * inv;
        r_row.value = r_sum * inv;
        f_row.value = f_sum * inv;
        n_row.value = deg_sum / static_cast<double>(L) * inv;
        p_row.evaluable_users = r_row.evaluable_users = f_row.evaluable_users =
            n_row.evaluable_users = static_cast<double>(users);
        if (L >= 2) {
          i_row.defined = true;
          i_row.value = intra_sum / (static_cast<double>(L) * (static_cast<double>(L) - 1.0)) * inv;
          i_row.evaluable_users = static_cast<double>(users);
        }
      }
      if (listed_users >= 2) {
        for (std::uint32_t c : contained) {
          if (c > 1) common += static_cast<double>(c) * (static_cast<double>(c) - 1.0);
        }
        const double pairs =
            static_cast<double>(listed_users) * (static_cast<double>(listed_users) - 1.0);
        h_row.defined = true;
        h_row.value = 1.0 - common / (pairs * static_cast<double>(L));
        h_row.evaluable_users = static_cast<double>(listed_users);
      }
      rows.push_back(p_row);
      rows.push_back(r_row);
      rows.push_back(f_row);
      rows.push_back(h_row);
      rows.push_back(i_row);
      rows.push_back(n_row);
    }
  }
  return rows;
}

namespace {

struct Accumulated {
  bool any = false;
  double mean = 0.0;
  double stderr_mean = 0.0;
  double evaluable = 0.0;
};

std::vector<ReportRow> make_report_rows(const ExperimentConfig& cfg,
                                        const std::vector<RawFoldRecord>& raw) {
  if (raw.empty()) return {};
  const std::size_t row_count = raw.front().rows.size();

  // Realization means per row index.
  std::vector<std::vector<double>> per_realization(row_count);
  std::vector<double> evaluable_sum(row_count, 0.0);
  std::vector<std::size_t> evaluable_folds(row_count, 0);
  std::uint32_t realizations = 0;
  for (const auto& rec : raw) realizations = std::max(realizations, rec.realization + 1);

  for (std::uint32_t r = 0; r < realizations; ++r) {
    std::vector<double> sum(row_count, 0.0);
    std::vector<std::size_t> defined(row_count, 0);
    for (const auto& rec : raw) {
      if (rec.realization != r) continue;
      for (std::size_t i = 0; i < row_count; ++i) {
        if (!rec.rows[i].defined) continue;
        sum[i] += rec.rows[i].value;
        ++defined[i];
        evaluable_sum[i] += rec.rows[i].evaluable_users;
        ++evaluable_folds[i];
      }
    }
    for (std::size_t i = 0; i < row_count; ++i) {
      if (defined[i] > 0) per_realization[i].push_back(sum[i] / static_cast<double>(defined[i]));
    }
  }

  std::vector<ReportRow> rows(row_count);
  for (std::size_t i = 0; i < row_count; ++i) {
    const FoldRow& proto = raw.front().rows[i];
    ReportRow& out = rows[i];
    const MethodConfig& mc = cfg.methods[proto.method];
    out.method = std::string(method_name(mc.method));
    if (mc.method == Method::CosRA_T) out.theta = mc.theta;
    out.metric = proto.metric;
    out.L = proto.L;
    const auto& values = per_realization[i];
    if (!values.empty()) {
      out.defined = true;
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      out.mean = mean;
      if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double var = ss / (static_cast<double>(values.size()) - 1.0);
        out.stderr_mean = std::sqrt(var / static_cast<double>(values.size()));
      }
      out.evaluable_users = evaluable_sum[i] / static_cast<double>(evaluable_folds[i]);
    } else {
      out.mean = std::numeric_limits<double>::quiet_NaN();
      out.stderr_mean = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return rows;
}

}  // namespace

MetricsReport run_experiment_with_plans(const Dataset& d, const ExperimentConfig& cfg,
                                        std::span<const SplitPlan> plans,
                                        std::string dataset_name) {
  validate_config(cfg);
  if (plans.size() != cfg.realizations) {
    throw std::invalid_argument("run_experiment: need one split plan per realization");
  }
  MetricsReport report;
  report.dataset_name = std::move(dataset_name);
  report.config = cfg;
  for (std::uint32_t r = 0; r < cfg.realizations; ++r) {
    for (std::uint32_t f = 0; f < cfg.folds; ++f) {
      report.raw.push_back({r, f, run_fold(d, plans[r], f, cfg)});
    }
  }
  report.rows = make_report_rows(cfg, report.raw);
  return report;
}

MetricsReport run_experiment(const Dataset& d, const ExperimentConfig& cfg,
                             std::string dataset_name) {
  validate_config(cfg);
  std::vector<SplitPlan> plans;
  plans.reserve(cfg.realizations);
  for (std::uint32_t r = 0; r < cfg.realizations; ++r) {
    plans.push_back(make_split(d.ratings, cfg.folds, cfg.seed + r));
  }
  return run_experiment_with_plans(d, cfg, plans, std::move(dataset_name));
}

namespace {

double find_row_mean(const MetricsReport& report, MetricId metric,
                     std::optional<std::uint32_t> L) {
  for (const auto& row : report.rows) {
    if (row.metric == metric && row.L == L) {
      return row.defined ? row.mean : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double argbest(std::span<const double> grid, const std::vector<double>& values, bool maximize) {
  double best_theta = grid[0];
  double best = values[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const bool better = maximize ? values[i] > best : values[i] < best;
    if (std::isnan(best) || (!std::isnan(values[i]) && better)) {
      best = values[i];
      best_theta = grid[i];
    }
  }
  return best_theta;
}

}  // namespace

ThetaSweepResult sweep_theta(const Dataset& d, ExperimentConfig cfg, std::span<const double> grid,
                             std::string dataset_name) {
  if (grid.empty()) throw std::invalid_argument("sweep_theta: empty grid");
  for (double theta : grid) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
      throw std::invalid_argument("sweep_theta: grid values must lie in [0, 1]");
    }
  }
  cfg.methods = {{Method::CosRA_T, grid[0]}};
  validate_config(cfg);

  // Identical partitions for every grid point: the theta curves carry no
  // split noise.
  std::vector<SplitPlan> plans;
  plans.reserve(cfg.realizations);
  for (std::uint32_t r = 0; r < cfg.realizations; ++r) {
    plans.push_back(make_split(d.ratings, cfg.folds, cfg.seed + r));
  }

  ThetaSweepResult result;
  result.grid.assign(grid.begin(), grid.end());
  for (double theta : grid) {
    cfg.methods[0].theta = theta;
    result.reports.push_back(run_experiment_with_plans(d, cfg, plans, dataset_name));
  }

  const auto curve = [&](MetricId metric, std::optional<std::uint32_t> L) {
    std::vector<double> values;
    values.reserve(grid.size());
    for (const auto& report : result.reports) values.push_back(find_row_mean(report, metric, L));
    return values;
  };

  result.theta_star.emplace_back("AUC", argbest(grid, curve(MetricId::AUC, std::nullopt), true));
  result.theta_star.emplace_back("RS", argbest(grid, curve(MetricId::RS, std::nullopt), false));
  for (MetricId id : {MetricId::P, MetricId::R, MetricId::F1}) {
    double sum = 0.0;
    for (std::uint32_t L : cfg.list_lengths) sum += argbest(grid, curve(id, L), true);
    result.theta_star.emplace_back(std::string(metric_name(id)),
                                   sum / static_cast<double>(cfg.list_lengths.size()));
  }
  double total = 0.0;
  for (const auto& [name, value] : result.theta_star) total += value;
  result.mean_theta_star = total / static_cast<double>(result.theta_star.size());
  return result;
}

MetricsReport sweep_length(const Dataset& d, ExperimentConfig cfg,
                           std::span<const std::uint32_t> length_grid,
                           std::string dataset_name) {
  cfg.list_lengths.assign(length_grid.begin(), length_grid.end());
  return run_experiment(d, cfg, std::move(dataset_name));
}

std::uint64_t DegreeHistogram::total() const {
  std::uint64_t sum = 0;
  for (const auto& [degree, count] : bins) sum += count;
  return sum;
}

DegreeHistogram recommended_degree_distribution(const Dataset& d, const MethodConfig& method,
                                                std::uint32_t L, std::uint32_t folds,
                                                std::uint64_t seed, std::uint32_t workers) {
  ExperimentConfig cfg;
  cfg.methods = {method};
  cfg.list_lengths = {L};
  cfg.folds = folds;
  cfg.realizations = 1;
  cfg.seed = seed;
  cfg.workers = workers;
  validate_config(cfg);

  const SplitPlan plan = make_split(d.ratings, folds, seed);
  const RatingGraph& full = d.ratings;
  const Index m = full.user_count();
  const Index n = full.object_count();

  EvaluationContext ctx;
  ctx.probes.resize(m);
  std::vector<Link> train_links;
  std::size_t t = 0;
  for (Index u = 0; u < m; ++u) {
    for (Index o : full.objects_of(u)) {
      if (plan.fold_of_link[t] == 0) {
        ctx.probes[u].push_back(o);
      } else {
        train_links.emplace_back(u, o);
      }
      ++t;
    }
  }
  const RatingGraph train = RatingGraph::build(train_links, m, n);
  ctx.train = &train;

  std::vector<Index> eval_users;
  for (Index u = 0; u < m; ++u) {
    if (ctx.evaluable(u)) eval_users.push_back(u);
  }
  const TrustGraph* trust = method.method == Method::CosRA_T ? &d.trust : nullptr;

  std::vector<std::vector<Index>> lists(eval_users.size());
  parallel_for(eval_users.size(), cfg.workers, [&](std::size_t begin, std::size_t end) {
    ScoreWorkspace ws(m);
    ResourceVector scores;
    for (std::size_t s = begin; s < end; ++s) {
      const Index u = eval_users[s];
      score_user(train, trust, method, u, ws, scores);
      lists[s] = top_l(u, scores, train.objects_of(u), L).items;
    }
  });

  std::vector<std::uint64_t> counts;
  for (const auto& items : lists) {
    for (Index a : items) {
      const Index degree = train.object_degree(a);
      if (degree >= counts.size()) counts.resize(degree + 1, 0);
      ++counts[degree];
    }
  }
  DegreeHistogram hist;
  for (Index degree = 0; degree < counts.size(); ++degree) {
    if (counts[degree] > 0) hist.bins.emplace_back(degree, counts[degree]);
  }
  return hist;
}

// --------------------------------------------------------------------------
// Serialization
// --------------------------------------------------------------------------

namespace {

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, const MetricsReport& report) {
  out << "method,metric,L,theta,mean,stderr,evaluable_users\n";
  for (const auto& row : report.rows) {
    out << row.method << ',' << metric_name(row.metric) << ',';
    if (row.L) out << *row.L;
    out << ',';
    if (row.theta) out << fmt(*row.theta);
    out << ',' << fmt(row.mean) << ',' << fmt(row.stderr_mean) << ','
        << fmt(row.evaluable_users) << '\n';
  }
}

namespace {

nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& mc : cfg.methods) {
    nlohmann::json entry{{"method", std::string(method_name(mc.method))}};
    if (mc.method == Method::CosRA_T) entry["theta"] = mc.theta;
    methods.push_back(entry);
  }
  return {
      {"methods", methods},          {"list_lengths", cfg.list_lengths},
      {"folds", cfg.folds},          {"realizations", cfg.realizations},
      {"seed", cfg.seed},            {"workers", cfg.workers},
  };
}

}  // namespace

void write_report_json(std::ostream& out, const MetricsReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json entry{{"method", row.method},
                         {"metric", std::string(metric_name(row.metric))},
                         {"defined", row.defined},
                         {"evaluable_users", row.evaluable_users}};
    if (row.L) entry["L"] = *row.L;
    if (row.theta) entry["theta"] = *row.theta;
    if (row.defined) {
      entry["mean"] = row.mean;
      entry["stderr"] = row.stderr_mean;
    }
    rows.push_back(entry);
  }
  nlohmann::json doc{{"dataset", report.dataset_name},
                     {"config", config_json(report.config)},
                     {"rows", rows}};
  out << doc.dump(2) << '\n';
}

void write_sweep_theta_csv(std::ostream& out, const ThetaSweepResult& sweep) {
  out << "method,metric,L,theta,mean,stderr,evaluable_users\n";
  for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
    for (const auto& row : sweep.reports[i].rows) {
      out << row.method << ',' << metric_name(row.metric) << ',';
      if (row.L) out << *row.L;
      out << ',' << fmt(sweep.grid[i]) << ',' << fmt(row.mean) << ',' << fmt(row.stderr_mean)
          << ',' << fmt(row.evaluable_users) << '\n';
    }
  }
}

void write_histogram_csv(std::ostream& out, const DegreeHistogram& hist) {
  out << "degree,count\n";
  for (const auto& [degree, count] : hist.bins) out << degree << ',' << count << '\n';
}

}  // namespace diffrec
