#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "diffrec/graph.hpp"
#include "diffrec/recommend.hpp"

namespace diffrec {

/// Raised when a metric has no evaluable user (or user pair) to average over.
struct MetricUndefinedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Training graph plus the held-out probe links E^P. A user is evaluable
/// when it has at least one training link and at least one probe link;
/// excluded users are counted per metric, never zero-filled.
struct EvaluationContext {
  const RatingGraph* train = nullptr;
  std::vector<std::vector<Index>> probes;  // per user, sorted, disjoint from training links

  bool evaluable(Index user) const {
    return train->user_degree(user) > 0 && !probes[user].empty();
  }
};

struct MetricValue {
  std::string name;
  std::optional<std::uint32_t> L;  // empty for the L-independent metrics
  double value = 0.0;
  std::size_t evaluable_users = 0;
};

/// Exact per-user rank statistics over the user's uncollected objects,
/// computed from one sorted pass with mean ranks on tied scores.
struct UserRankStats {
  bool auc_defined = false;  // needs >= 1 probe and >= 1 non-probe candidate
  double auc = 0.0;
  std::uint32_t rs_terms = 0;  // number of probe links contributing
  double rs_sum = 0.0;         // sum of p_alpha / l_i over those probes
};

/// nullopt when the user is not evaluable. scores must cover all objects.
std::optional<UserRankStats> user_rank_stats(const EvaluationContext& ctx, Index user,
                                             const ResourceVector& scores);

/// d_i(L): how many of the listed items are probe links of this user.
std::size_t list_hits(std::span<const Index> items, std::span<const Index> sorted_probes);

/// Sum of S^Cos over ordered pairs of distinct listed objects.
double user_intra_sum(const RatingGraph& train, std::span<const Index> items);

/// Sum of training degrees over the listed objects.
double user_degree_sum(const RatingGraph& train, std::span<const Index> items);

// Whole-context aggregates (Eqs. as documented per function). `lists` holds
// one RecommendationList per scored user; entries longer than L are read as
// their top-L prefix. All aggregates reduce in user order, so results do not
// depend on how the per-user work was scheduled.

/// Mean over users of (N1 + 0.5 N2) / N with every (probe, non-probe
/// candidate) pair compared exactly.
MetricValue auc(const EvaluationContext& ctx, std::span<const ResourceVector> scores_per_user);

/// (1/|E^P|) sum of p_alpha / l_i with mean ranks on ties.
MetricValue ranking_score(const EvaluationContext& ctx,
                          std::span<const ResourceVector> scores_per_user);

struct PrecisionRecallF1 {
  MetricValue precision;
  MetricValue recall;
  MetricValue f1;
};

/// P(L) = mean d_i/L, R(L) = mean d_i/D(i), F1 the per-user harmonic mean
/// (0 when the user has no hits); users with no probes are excluded.
PrecisionRecallF1 precision_recall_f1(const EvaluationContext& ctx,
                                      std::span<const RecommendationList> lists, std::uint32_t L);

/// H(L) = mean over ordered pairs of distinct users with nonempty lists of
/// 1 - |intersection| / L.
MetricValue hamming_distance(std::span<const RecommendationList> lists, std::uint32_t L,
                             Index object_count);

/// I(L) = mean over users of the ordered-pair object-cosine sum / (L(L-1)).
MetricValue intra_similarity(const RatingGraph& train, std::span<const RecommendationList> lists,
                             std::uint32_t L);

/// N(L) = mean over users of the listed objects' training degree sum / L.
MetricValue popularity(const RatingGraph& train, std::span<const RecommendationList> lists,
                       std::uint32_t L);

}  // namespace diffrec
