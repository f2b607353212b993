#include "diffrec/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace diffrec {

namespace {

std::span<const Index> prefix(const RecommendationList& list, std::uint32_t L) {
  return {list.items.data(), std::min<std::size_t>(L, list.items.size())};
}

}  // namespace

std::optional<UserRankStats> user_rank_stats(const EvaluationContext& ctx, Index user,
                                             const ResourceVector& scores) {
  if (!ctx.evaluable(user)) return std::nullopt;
  const auto collected = ctx.train->objects_of(user);
  const auto& probes = ctx.probes[user];
  const Index n = ctx.train->object_count();

  // (score, is_probe) over the user's uncollected objects.
  std::vector<std::pair<double, bool>> candidates;
  candidates.reserve(n - collected.size());
  std::size_t c = 0, p = 0;
  for (Index a = 0; a < n; ++a) {
    while (p < probes.size() && probes[p] < a) ++p;
    if (c < collected.size() && collected[c] == a) {
      ++c;
      continue;
    }
    const bool is_probe = p < probes.size() && probes[p] == a;
    if (is_probe) ++p;
    candidates.emplace_back(scores[a], is_probe);
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });

  const std::size_t total = candidates.size();
  const std::size_t probe_count = probes.size();
  const std::size_t plain_count = total - probe_count;

  UserRankStats stats;
  stats.rs_terms = static_cast<std::uint32_t>(probe_count);

  double n1 = 0.0, n2 = 0.0;
  std::size_t processed = 0;
  std::size_t plain_above = 0;
  std::size_t g = 0;
  while (g < total) {
    std::size_t h = g;
    while (h < total && candidates[h].first == candidates[g].first) ++h;
    const std::size_t group = h - g;
    std::size_t group_probes = 0;
    for (std::size_t k = g; k < h; ++k) group_probes += candidates[k].second ? 1 : 0;
    const std::size_t group_plain = group - group_probes;

    if (group_probes > 0) {
      // Probes in this tie group beat every lower-scored non-probe and draw
      // with the group's own non-probes.
      n1 += static_cast<double>(group_probes) *
            static_cast<double>(plain_count - plain_above - group_plain);
      n2 += static_cast<double>(group_probes) * static_cast<double>(group_plain);
      // Mean of the covered positions processed+1 .. processed+group.
      const double rank = static_cast<double>(processed) + (static_cast<double>(group) + 1.0) / 2.0;
      stats.rs_sum += static_cast<double>(group_probes) * rank / static_cast<double>(total);
    }
    plain_above += group_plain;
    processed += group;
    g = h;
  }

  if (probe_count > 0 && plain_count > 0) {
    stats.auc_defined = true;
    stats.auc = (n1 + 0.5 * n2) / (static_cast<double>(probe_count) * static_cast<double>(plain_count));
  }
  return stats;
}

std::size_t list_hits(std::span<const Index> items, std::span<const Index> sorted_probes) {
  std::size_t hits = 0;
  for (Index a : items) {
    if (std::binary_search(sorted_probes.begin(), sorted_probes.end(), a)) ++hits;
  }
  return hits;
}

double user_intra_sum(const RatingGraph& train, std::span<const Index> items) {
  double sum = 0.0;
  for (std::size_t x = 0; x < items.size(); ++x) {
    for (std::size_t y = x + 1; y < items.size(); ++y) {
      sum += 2.0 * cosine_object_similarity(train, items[x], items[y]);
    }
  }
  return sum;
}

double user_degree_sum(const RatingGraph& train, std::span<const Index> items) {
  double sum = 0.0;
  for (Index a : items) sum += static_cast<double>(train.object_degree(a));
  return sum;
}

MetricValue auc(const EvaluationContext& ctx, std::span<const ResourceVector> scores_per_user) {
  double sum = 0.0;
  std::size_t users = 0;
  for (Index u = 0; u < scores_per_user.size(); ++u) {
    auto stats = user_rank_stats(ctx, u, scores_per_user[u]);
    if (stats && stats->auc_defined) {
      sum += stats->auc;
      ++users;
    }
  }
  if (users == 0) throw MetricUndefinedError("AUC: no evaluable user");
  return {"AUC", std::nullopt, sum / static_cast<double>(users), users};
}

MetricValue ranking_score(const EvaluationContext& ctx,
                          std::span<const ResourceVector> scores_per_user) {
  double sum = 0.0;
  std::size_t terms = 0;
  std::size_t users = 0;
  for (Index u = 0; u < scores_per_user.size(); ++u) {
    auto stats = user_rank_stats(ctx, u, scores_per_user[u]);
    if (stats && stats->rs_terms > 0) {
      sum += stats->rs_sum;
      terms += stats->rs_terms;
      ++users;
    }
  }
  if (terms == 0) throw MetricUndefinedError("RS: empty probe set");
  return {"RS", std::nullopt, sum / static_cast<double>(terms), users};
}

PrecisionRecallF1 precision_recall_f1(const EvaluationContext& ctx,
                                      std::span<const RecommendationList> lists, std::uint32_t L) {
  double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
  std::size_t users = 0;
  for (const auto& list : lists) {
    const auto& probes = ctx.probes[list.user];
    if (probes.empty()) continue;
    const double d = static_cast<double>(list_hits(prefix(list, L), probes));
    const double pi = d / static_cast<double>(L);
    const double ri = d / static_cast<double>(probes.size());
    p_sum += pi;
    r_sum += ri;
    if (pi + ri > 0.0) f_sum += 2.0 * pi * ri / (pi + ri);
    ++users;
  }
  if (users == 0) throw MetricUndefinedError("P/R/F1: no evaluable user");
  const double inv = 1.0 / static_cast<double>(users);
  return {{"P", L, p_sum * inv, users}, {"R", L, r_sum * inv, users}, {"F1", L, f_sum * inv, users}};
}

MetricValue hamming_distance(std::span<const RecommendationList> lists, std::uint32_t L,
                             Index object_count) {
  // sum over ordered pairs of |o_i ∩ o_j| equals sum over objects of
  // c_o (c_o - 1), with c_o the number of lists containing the object.
  std::vector<std::uint32_t> contained(object_count, 0);
  std::size_t users = 0;
  for (const auto& list : lists) {
    const auto items = prefix(list, L);
    if (items.empty()) continue;
    ++users;
    for (Index a : items) ++contained[a];
  }
  if (users < 2) throw MetricUndefinedError("H: fewer than 2 users with lists");
  double common = 0.0;
  for (std::uint32_t c : contained) {
    if (c > 1) common += static_cast<double>(c) * (static_cast<double>(c) - 1.0);
  }
  const double pairs = static_cast<double>(users) * (static_cast<double>(users) - 1.0);
  return {"H", L, 1.0 - common / (pairs * static_cast<double>(L)), users};
}

MetricValue intra_similarity(const RatingGraph& train, std::span<const RecommendationList> lists,
                             std::uint32_t L) {
  if (L < 2) throw std::invalid_argument("I(L) requires L >= 2");
  double sum = 0.0;
  std::size_t users = 0;
  for (const auto& list : lists) {
    sum += user_intra_sum(train, prefix(list, L));
    ++users;
  }
  if (users == 0) throw MetricUndefinedError("I: no lists");
  const double norm = static_cast<double>(L) * (static_cast<double>(L) - 1.0);
  return {"I", L, sum / norm / static_cast<double>(users), users};
}

MetricValue popularity(const RatingGraph& train, std::span<const RecommendationList> lists,
                       std::uint32_t L) {
  double sum = 0.0;
  std::size_t users = 0;
  for (const auto& list : lists) {
    sum += user_degree_sum(train, prefix(list, L));
    ++users;
  }
  if (users == 0) throw MetricUndefinedError("N: no lists");
  return {"N", L, sum / static_cast<double>(L) / static_cast<double>(users), users};
}

}  // namespace diffrec
