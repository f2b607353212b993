#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "diffrec/harness.hpp"
#include "fixtures.hpp"
#include "synthetic.hpp"

using namespace diffrec;
using namespace diffrec::testing;

namespace {

Dataset t1_dataset() {
  Dataset d;
  d.ratings = t1_rating();
  d.trust = t1_trust();
  d.user_tokens = {"u1", "u2", "u3"};
  d.object_tokens = {"o1", "o2", "o3", "o4"};
  return d;
}

const FoldRow& find_row(const std::vector<FoldRow>& rows, std::size_t method, MetricId metric,
                        std::optional<std::uint32_t> L) {
  for (const auto& row : rows) {
    if (row.method == method && row.metric == metric && row.L == L) return row;
  }
  REQUIRE(false);
  return rows.front();
}

}  // namespace

TEST_CASE("make_split distributes links into near-equal folds") {
  std::mt19937_64 rng(5001);
  const auto g = RatingGraph::build(random_bipartite(rng, 6, 6, 0.5), 6, 6);
  const auto links = g.link_count();

  const auto plan = make_split(g, 4, 99);
  std::map<std::uint32_t, std::size_t> sizes;
  for (auto f : plan.fold_of_link) ++sizes[f];
  CHECK(sizes.size() == 4);
  std::size_t smallest = links, largest = 0;
  for (const auto& [fold, size] : sizes) {
    smallest = std::min(smallest, size);
    largest = std::max(largest, size);
  }
  CHECK(largest - smallest <= 1);

  // Determinism.
  const auto again = make_split(g, 4, 99);
  CHECK(plan.fold_of_link == again.fold_of_link);
  const auto other = make_split(g, 4, 100);
  CHECK(plan.fold_of_link != other.fold_of_link);
}

TEST_CASE("make_split fold sizes for 10 and 11 links") {
  std::vector<Link> ten;
  for (Index o = 0; o < 10; ++o) ten.emplace_back(0, o);
  const auto g10 = RatingGraph::build(ten, 1, 10);
  const auto plan10 = make_split(g10, 10, 1);
  std::map<std::uint32_t, std::size_t> sizes10;
  for (auto f : plan10.fold_of_link) ++sizes10[f];
  for (const auto& [fold, size] : sizes10) CHECK(size == 1);

  std::vector<Link> eleven = ten;
  eleven.emplace_back(0, 10);
  const auto g11 = RatingGraph::build(eleven, 1, 11);
  const auto plan11 = make_split(g11, 10, 1);
  std::map<std::uint32_t, std::size_t> sizes11;
  for (auto f : plan11.fold_of_link) ++sizes11[f];
  std::size_t singles = 0, doubles = 0;
  for (const auto& [fold, size] : sizes11) {
    if (size == 1) ++singles;
    if (size == 2) ++doubles;
  }
  CHECK(singles == 9);
  CHECK(doubles == 1);

  CHECK_THROWS_AS(make_split(g10, 11, 1), std::invalid_argument);
}

TEST_CASE("every link lands in the test set exactly once per realization") {
  std::mt19937_64 rng(5002);
  const auto g = RatingGraph::build(random_bipartite(rng, 8, 8, 0.4), 8, 8);
  const auto plan = make_split(g, 5, 7);
  std::vector<std::size_t> seen(g.link_count(), 0);
  for (std::uint32_t f = 0; f < 5; ++f) {
    for (std::size_t t = 0; t < plan.fold_of_link.size(); ++t) {
      if (plan.fold_of_link[t] == f) ++seen[t];
    }
  }
  for (auto count : seen) CHECK(count == 1);
}

TEST_CASE("hand-traced T1 fold: held-out (u3,o4)") {
  const Dataset d = t1_dataset();
  // Canonical link order: (0,0),(0,1),(1,1),(1,2),(2,0),(2,2),(2,3).
  // A 7-fold identity plan puts exactly link 6 = (u3,o4) into fold 6.
  SplitPlan plan;
  plan.folds = 7;
  plan.seed = 0;
  plan.fold_of_link = {0, 1, 2, 3, 4, 5, 6};

  ExperimentConfig cfg;
  cfg.methods = {{Method::GR}, {Method::UCF}, {Method::HC},
                 {Method::MD}, {Method::CosRA}, {Method::CosRA_T, 0.5}};
  cfg.list_lengths = {1, 2};
  cfg.folds = 7;
  cfg.realizations = 1;
  cfg.workers = 1;

  const auto rows = run_fold(d, plan, 6, cfg);
  REQUIRE(rows.size() == 6 * (2 + 2 * 6));

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    CAPTURE(mi);
    // Only u3 is evaluable; its candidates are o2 (positive score under
    // every method) and the held-out o4 (scored 0 by every method).
    const auto& auc_row = find_row(rows, mi, MetricId::AUC, std::nullopt);
    CHECK(auc_row.defined);
    CHECK(auc_row.value == doctest::Approx(0.0));
    CHECK(auc_row.evaluable_users == 1.0);

    const auto& rs_row = find_row(rows, mi, MetricId::RS, std::nullopt);
    CHECK(rs_row.defined);
    CHECK(rs_row.value == doctest::Approx(1.0));

    const auto& p1 = find_row(rows, mi, MetricId::P, 1);
    const auto& r1 = find_row(rows, mi, MetricId::R, 1);
    const auto& f1 = find_row(rows, mi, MetricId::F1, 1);
    CHECK(p1.value == doctest::Approx(0.0));
    CHECK(r1.value == doctest::Approx(0.0));
    CHECK(f1.value == doctest::Approx(0.0));

    const auto& n1 = find_row(rows, mi, MetricId::N, 1);
    CHECK(n1.value == doctest::Approx(2.0));  // list [o2], training degree 2

    // H needs two users with lists; this fold has one. I(1) needs L >= 2.
    CHECK_FALSE(find_row(rows, mi, MetricId::H, 1).defined);
    CHECK_FALSE(find_row(rows, mi, MetricId::I, 1).defined);

    const auto& p2 = find_row(rows, mi, MetricId::P, 2);
    const auto& r2 = find_row(rows, mi, MetricId::R, 2);
    const auto& f2 = find_row(rows, mi, MetricId::F1, 2);
    const auto& i2 = find_row(rows, mi, MetricId::I, 2);
    const auto& n2 = find_row(rows, mi, MetricId::N, 2);
    CHECK(p2.value == doctest::Approx(0.5));   // list [o2,o4], hit o4
    CHECK(r2.value == doctest::Approx(1.0));
    CHECK(f2.value == doctest::Approx(2.0 / 3.0));
    CHECK(i2.defined);
    CHECK(i2.value == doctest::Approx(0.0));   // o2 and o4 share no collector
    CHECK(n2.value == doctest::Approx(1.0));   // (2 + 0) / 2
    CHECK_FALSE(find_row(rows, mi, MetricId::H, 2).defined);
  }
}

TEST_CASE("theta=1 CosRA_T fold rows equal CosRA rows exactly") {
  const Dataset d = t1_dataset();
  const auto plan = make_split(d.ratings, 3, 11);
  ExperimentConfig cfg;
  cfg.methods = {{Method::CosRA}, {Method::CosRA_T, 1.0}};
  cfg.list_lengths = {2};
  cfg.folds = 3;
  cfg.realizations = 1;
  cfg.workers = 1;
  for (std::uint32_t f = 0; f < 3; ++f) {
    const auto rows = run_fold(d, plan, f, cfg);
    const std::size_t half = rows.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
      CHECK(rows[i].defined == rows[half + i].defined);
      if (rows[i].defined) CHECK(rows[i].value == rows[half + i].value);
    }
  }
}

TEST_CASE("cold-start fold excludes the user whose links were all held out") {
  const Dataset d = t1_dataset();
  // Fold 0 holds u1's two links and u2's (1,1); the rest is training.
  SplitPlan plan;
  plan.folds = 2;
  plan.seed = 0;
  plan.fold_of_link = {0, 0, 0, 1, 1, 1, 1};

  ExperimentConfig cfg;
  cfg.methods = {{Method::CosRA}};
  cfg.list_lengths = {1};
  cfg.folds = 2;
  cfg.realizations = 1;
  cfg.workers = 1;

  const auto rows = run_fold(d, plan, 0, cfg);
  // u1 is cold (train degree 0), u3 has no probes; only u2 counts.
  const auto& rs_row = find_row(rows, 0, MetricId::RS, std::nullopt);
  CHECK(rs_row.defined);
  CHECK(rs_row.evaluable_users == 1.0);
}

TEST_CASE("a fold with no evaluable users flags rows undefined and continues") {
  const Dataset d = t1_dataset();
  // Fold 0 = all of u1's links and nothing else; in fold 1 u1 has no probes
  // while u2/u3 keep all their links (no probes either).
  SplitPlan plan;
  plan.folds = 2;
  plan.seed = 0;
  plan.fold_of_link = {0, 0, 1, 1, 1, 1, 1};

  ExperimentConfig cfg;
  cfg.methods = {{Method::MD}};
  cfg.list_lengths = {1};
  cfg.folds = 2;
  cfg.realizations = 1;
  cfg.workers = 1;

  const auto rows = run_fold(d, plan, 0, cfg);
  for (const auto& row : rows) CHECK_FALSE(row.defined);
}

TEST_CASE("run_experiment aggregation matches a recomputation from raw rows") {
  const Dataset d = t1_dataset();
  ExperimentConfig cfg;
  cfg.methods = {{Method::CosRA}, {Method::GR}};
  cfg.list_lengths = {2};
  cfg.folds = 2;
  cfg.realizations = 3;
  cfg.seed = 400;
  cfg.workers = 1;

  const auto report = run_experiment(d, cfg, "t1");
  REQUIRE(report.raw.size() == 6);
  REQUIRE(!report.rows.empty());

  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    std::vector<double> realization_means;
    for (std::uint32_t r = 0; r < cfg.realizations; ++r) {
      double sum = 0.0;
      std::size_t defined = 0;
      for (const auto& rec : report.raw) {
        if (rec.realization != r || !rec.rows[i].defined) continue;
        sum += rec.rows[i].value;
        ++defined;
      }
      if (defined > 0) realization_means.push_back(sum / static_cast<double>(defined));
    }
    if (realization_means.empty()) {
      CHECK_FALSE(report.rows[i].defined);
      continue;
    }
    double mean = 0.0;
    for (double v : realization_means) mean += v;
    mean /= static_cast<double>(realization_means.size());
    CHECK(report.rows[i].mean == doctest::Approx(mean).epsilon(1e-12));

    if (realization_means.size() >= 2) {
      double ss = 0.0;
      for (double v : realization_means) ss += (v - mean) * (v - mean);
      const double expected = std::sqrt(ss / (static_cast<double>(realization_means.size()) - 1.0) /
                                        static_cast<double>(realization_means.size()));
      CHECK(report.rows[i].stderr_mean == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("reports are byte-identical across worker counts and reruns") {
  std::mt19937_64 rng(5003);
  Dataset d = taste_world(rng, {.users = 36, .objects = 40, .groups = 3,
                                .ratings_per_user = 8, .in_group_rating = 0.8,
                                .trust_per_user = 3, .trust_noise = 0.3});
  ExperimentConfig cfg;
  cfg.methods = {{Method::GR}, {Method::CosRA_T, 0.4}};
  cfg.list_lengths = {3};
  cfg.folds = 3;
  cfg.realizations = 2;
  cfg.seed = 2024;

  std::string csv[3];
  const std::uint32_t workers[3] = {1, 2, 5};
  for (int i = 0; i < 3; ++i) {
    cfg.workers = workers[i];
    const auto report = run_experiment(d, cfg, "taste");
    std::ostringstream out;
    write_report_csv(out, report);
    csv[i] = out.str();
  }
  CHECK(csv[0] == csv[1]);
  CHECK(csv[0] == csv[2]);
  CHECK(csv[0].find("method,metric,L,theta,mean,stderr,evaluable_users") == 0);
}

TEST_CASE("realizations=1 with 2 folds averages the two fold rows") {
  const Dataset d = t1_dataset();
  ExperimentConfig cfg;
  cfg.methods = {{Method::MD}};
  cfg.list_lengths = {2};
  cfg.folds = 2;
  cfg.realizations = 1;
  cfg.seed = 5;
  cfg.workers = 1;

  const auto report = run_experiment(d, cfg, "t1");
  const auto plan = make_split(d.ratings, 2, 5);
  const auto fold0 = run_fold(d, plan, 0, cfg);
  const auto fold1 = run_fold(d, plan, 1, cfg);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    if (!fold0[i].defined || !fold1[i].defined) continue;
    CHECK(report.rows[i].mean ==
          doctest::Approx((fold0[i].value + fold1[i].value) / 2.0).epsilon(1e-12));
    CHECK(report.rows[i].stderr_mean == 0.0);  // single realization
  }
}

TEST_CASE("sweep_theta at grid {1.0} equals a plain CosRA experiment") {
  std::mt19937_64 rng(5004);
  Dataset d = taste_world(rng, {.users = 24, .objects = 30, .groups = 3,
                                .ratings_per_user = 6, .in_group_rating = 0.8,
                                .trust_per_user = 3, .trust_noise = 0.2});
  ExperimentConfig cfg;
  cfg.list_lengths = {3};
  cfg.folds = 3;
  cfg.realizations = 2;
  cfg.seed = 77;
  cfg.workers = 1;

  const double grid[] = {1.0};
  ExperimentConfig sweep_cfg = cfg;
  const auto sweep = sweep_theta(d, sweep_cfg, grid, "taste");
  REQUIRE(sweep.reports.size() == 1);

  cfg.methods = {{Method::CosRA}};
  const auto plain = run_experiment(d, cfg, "taste");
  REQUIRE(sweep.reports[0].rows.size() == plain.rows.size());
  for (std::size_t i = 0; i < plain.rows.size(); ++i) {
    CHECK(sweep.reports[0].rows[i].defined == plain.rows[i].defined);
    if (plain.rows[i].defined) {
      CHECK(sweep.reports[0].rows[i].mean == plain.rows[i].mean);
    }
  }
}

TEST_CASE("trust between taste-identical users helps at theta < 1") {
  // Twin pairs share identical profiles and trust each other: boosting the
  // twin's resource must not hurt, since the twin's training links contain
  // the target's held-out objects.
  std::mt19937_64 rng(5005);
  Dataset d = twin_world(rng, 30, 50, 7);
  ExperimentConfig cfg;
  cfg.list_lengths = {5};
  cfg.folds = 4;
  cfg.realizations = 2;
  cfg.seed = 31;

  const double grid[] = {0.0, 0.5, 1.0};
  const auto sweep = sweep_theta(d, cfg, grid, "twin");
  const auto auc_at = [&](std::size_t idx) {
    for (const auto& row : sweep.reports[idx].rows) {
      if (row.metric == MetricId::AUC) return row.mean;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double best_with_trust = std::max(auc_at(0), auc_at(1));
  CHECK(best_with_trust >= auc_at(2) - 1e-12);
  CHECK(auc_at(0) > auc_at(2));  // here the benefit is strict
}

TEST_CASE("sweep_length reuses scores: report equals a multi-L experiment") {
  const Dataset d = t1_dataset();
  ExperimentConfig cfg;
  cfg.methods = {{Method::CosRA}};
  cfg.folds = 2;
  cfg.realizations = 2;
  cfg.seed = 9;
  cfg.workers = 1;

  const std::uint32_t grid[] = {1, 2, 3};
  const auto swept = sweep_length(d, cfg, grid, "t1");
  std::size_t p_rows = 0;
  for (const auto& row : swept.rows) {
    if (row.metric == MetricId::P) ++p_rows;
  }
  CHECK(p_rows == 3);
}

TEST_CASE("degree histogram counts recommended objects exactly once each") {
  std::mt19937_64 rng(5006);
  Dataset d = taste_world(rng, {.users = 30, .objects = 36, .groups = 3,
                                .ratings_per_user = 8, .in_group_rating = 0.8,
                                .trust_per_user = 2, .trust_noise = 0.2});
  const std::uint32_t L = 4, folds = 4;
  const std::uint64_t seed = 123;

  const auto hist = recommended_degree_distribution(d, {Method::MD, 1.0}, L, folds, seed, 1);

  // Counting identity: total histogram mass = sum of list sizes. Recompute
  // the evaluable-user count from the same split.
  const auto plan = make_split(d.ratings, folds, seed);
  EvaluationContext ctx;
  ctx.probes.resize(d.ratings.user_count());
  std::vector<Link> train_links;
  std::size_t t = 0;
  for (Index u = 0; u < d.ratings.user_count(); ++u) {
    for (Index o : d.ratings.objects_of(u)) {
      if (plan.fold_of_link[t] == 0) {
        ctx.probes[u].push_back(o);
      } else {
        train_links.emplace_back(u, o);
      }
      ++t;
    }
  }
  const auto train =
      RatingGraph::build(train_links, d.ratings.user_count(), d.ratings.object_count());
  ctx.train = &train;
  std::size_t evaluable = 0;
  for (Index u = 0; u < d.ratings.user_count(); ++u) {
    if (ctx.evaluable(u)) ++evaluable;
  }
  CHECK(hist.total() == static_cast<std::uint64_t>(evaluable) * L);

  // Cross-check: the count-weighted histogram mean equals the N(L) metric of
  // the same fold (all lists are full here).
  ExperimentConfig cfg;
  cfg.methods = {{Method::MD, 1.0}};
  cfg.list_lengths = {L};
  cfg.folds = folds;
  cfg.realizations = 1;
  cfg.seed = seed;
  cfg.workers = 1;
  const auto rows = run_fold(d, plan, 0, cfg);
  const auto& n_row = find_row(rows, 0, MetricId::N, L);
  double weighted = 0.0;
  for (const auto& [degree, count] : hist.bins) {
    weighted += static_cast<double>(degree) * static_cast<double>(count);
  }
  CHECK(n_row.value ==
        doctest::Approx(weighted / static_cast<double>(hist.total())).epsilon(1e-12));
}

TEST_CASE("GR histogram sits on large-degree objects only") {
  // Two user blocks each collect their block's 5 popular objects plus one
  // private junk object; GR must recommend only the other block's popular
  // objects (training degree >> junk degree) at L=5.
  std::vector<Link> links;
  for (Index u = 0; u < 20; ++u) {
    const bool first_block = u < 10;
    for (Index o = 0; o < 5; ++o) links.emplace_back(u, first_block ? o : 5 + o);
    links.emplace_back(u, 10 + u);  // junk object, degree 1
  }
  Dataset d;
  d.ratings = RatingGraph::build(links, 20, 30);
  d.trust = TrustGraph::build({}, 20);
  for (Index u = 0; u < 20; ++u) d.user_tokens.push_back("u" + std::to_string(u));
  for (Index o = 0; o < 30; ++o) d.object_tokens.push_back("o" + std::to_string(o));

  const auto hist = recommended_degree_distribution(d, {Method::GR, 1.0}, 5, 10, 3, 1);
  REQUIRE(!hist.bins.empty());
  for (const auto& [degree, count] : hist.bins) CHECK(degree >= 5);
}

TEST_CASE("config validation rejects bad settings") {
  ExperimentConfig cfg;
  cfg.methods = {{Method::GR}};
  cfg.list_lengths = {10};
  cfg.folds = 1;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg.folds = 10;
  cfg.realizations = 0;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg.realizations = 1;
  cfg.list_lengths = {10, 5};
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg.list_lengths = {0};
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg.list_lengths = {5};
  cfg.methods = {{Method::CosRA_T, 1.5}};
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg.methods.clear();
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
}
