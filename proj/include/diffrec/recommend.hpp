#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diffrec/graph.hpp"

namespace diffrec {

enum class Method { GR, UCF, HC, MD, CosRA, CosRA_T };

/// The six method names as they appear in reports and on the command line.
std::string_view method_name(Method m);
/// Accepts the canonical names plus "CosRA+T"; nullopt for anything else.
std::optional<Method> parse_method(std::string_view name);

struct MethodConfig {
  Method method = Method::CosRA;
  double theta = 1.0;  // only CosRA_T reads it; must lie in [0, 1]
};

/// Ranked top-L uncollected objects for one user. Scores are non-increasing;
/// ties break by ascending object index.
struct RecommendationList {
  Index user = 0;
  std::vector<Index> items;
  std::vector<double> scores;
};

/// Reusable dense buffers for the matrix-free sweeps. One workspace per
/// concurrent caller; kernels leave it zeroed between invocations so a
/// sequence of calls never reallocates.
class ScoreWorkspace {
 public:
  explicit ScoreWorkspace(Index users) : user_buf_(users, 0.0), trusted_(users, 0) {}

  std::vector<double>& user_buf() { return user_buf_; }
  std::vector<std::uint8_t>& trusted_flags() { return trusted_; }
  std::vector<Index>& touched_users() { return touched_users_; }

 private:
  std::vector<double> user_buf_;
  std::vector<std::uint8_t> trusted_;
  std::vector<Index> touched_users_;
};

// Scoring kernels. Each returns the dense per-object final resource for the
// target user; entries for collected objects are included (list extraction
// filters them). All kernels are pure functions of their arguments.

/// Global ranking: every object scores its degree, identically for all users.
ResourceVector score_gr(const RatingGraph& g);

/// User-based CF: v_a = sum_{j != i} s_ij a_ja with cosine user similarity.
ResourceVector score_ucf(const RatingGraph& g, Index user);

/// Mass diffusion: f' = W f with the column-stochastic transfer matrix,
/// computed as two sweeps (objects -> users -> objects).
ResourceVector score_md(const RatingGraph& g, Index user);

/// Heat conduction: transpose diffusion (row-stochastic matrix).
ResourceVector score_hc(const RatingGraph& g, Index user);

/// CosRA: f' = S^CosRA f via the square-root-normalized two-sweep.
ResourceVector score_cosra(const RatingGraph& g, Index user);

/// CosRA+T: the CosRA sweep with the resource of each user trusted by the
/// target raised to the power theta before redistribution (0^theta := 0 for
/// every theta, so unreachable users never contribute). theta=1 reproduces
/// CosRA exactly.
ResourceVector score_cosra_t(const RatingGraph& g, const TrustGraph& t, Index user, double theta);

/// Dispatch on MethodConfig; trust may be null for the five trust-free
/// methods. Writes into `out` (resized to n) using workspace buffers.
void score_user(const RatingGraph& g, const TrustGraph* trust, const MethodConfig& cfg,
                Index user, ScoreWorkspace& ws, ResourceVector& out);

/// The L highest-scoring objects outside `collected` (sorted ascending),
/// score descending with ties by ascending index; shorter than L only when
/// fewer uncollected objects exist.
RecommendationList top_l(Index user, const ResourceVector& scores,
                         std::span<const Index> collected, std::size_t L);

}  // namespace diffrec
