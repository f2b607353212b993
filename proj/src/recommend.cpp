#include "diffrec/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace diffrec {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::GR: return "GR";
    case Method::UCF: return "UCF";
    case Method::HC: return "HC";
    case Method::MD: return "MD";
    case Method::CosRA: return "CosRA";
    case Method::CosRA_T: return "CosRA_T";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "GR") return Method::GR;
  if (name == "UCF") return Method::UCF;
  if (name == "HC") return Method::HC;
  if (name == "MD") return Method::MD;
  if (name == "CosRA") return Method::CosRA;
  if (name == "CosRA_T" || name == "CosRA+T") return Method::CosRA_T;
  return std::nullopt;
}

namespace {

// Objects -> users half-sweep shared by MD/HC/CosRA/CosRA+T. The initial
// object resource is the target's indicator vector, so the sweep iterates the
// target's collected objects directly. Each collector j accumulates
// sum_a a_ja * weight(a, j); only touched users are recorded, and every
// contribution is positive, so buf[j] > 0 exactly for reachable users.
template <typename Weight>
void spread_to_users(const RatingGraph& g, Index user, std::vector<double>& buf,
                     std::vector<Index>& touched, Weight weight) {
  for (Index a : g.objects_of(user)) {
    const double ka = static_cast<double>(g.object_degree(a));
    for (Index j : g.users_of(a)) {
      if (buf[j] == 0.0) touched.push_back(j);
      buf[j] += weight(ka, static_cast<double>(g.user_degree(j)));
    }
  }
}

void clear_touched(std::vector<double>& buf, std::vector<Index>& touched) {
  for (Index j : touched) buf[j] = 0.0;
  touched.clear();
}

}  // namespace

ResourceVector score_gr(const RatingGraph& g) {
  ResourceVector out(g.object_count());
  for (Index a = 0; a < g.object_count(); ++a) {
    out[a] = static_cast<double>(g.object_degree(a));
  }
  return out;
}

void score_user(const RatingGraph& g, const TrustGraph* trust, const MethodConfig& cfg,
                Index user, ScoreWorkspace& ws, ResourceVector& out) {
  const Index n = g.object_count();
  out.assign(n, 0.0);
  auto& buf = ws.user_buf();
  auto& touched = ws.touched_users();

  switch (cfg.method) {
    case Method::GR: {
      for (Index a = 0; a < n; ++a) out[a] = static_cast<double>(g.object_degree(a));
      return;
    }
    case Method::UCF: {
      // buf[j] accumulates the raw object overlap with the target.
      spread_to_users(g, user, buf, touched, [](double, double) { return 1.0; });
      const double ki = static_cast<double>(g.user_degree(user));
      for (Index j : touched) {
        if (j == user) continue;
        const double sim = buf[j] / std::sqrt(ki * static_cast<double>(g.user_degree(j)));
        for (Index a : g.objects_of(j)) out[a] += sim;
      }
      clear_touched(buf, touched);
      return;
    }
    case Method::MD: {
      // Object a splits its unit equally among its k_a collectors; user j
      // then splits its pool equally among its k_j objects.
      spread_to_users(g, user, buf, touched, [](double ka, double) { return 1.0 / ka; });
      for (Index j : touched) {
        const double share = buf[j] / static_cast<double>(g.user_degree(j));
        for (Index a : g.objects_of(j)) out[a] += share;
      }
      clear_touched(buf, touched);
      return;
    }
    case Method::HC: {
      // User j averages the resource over its objects; object b then averages
      // over its collectors.
      spread_to_users(g, user, buf, touched, [](double, double kj) { return 1.0 / kj; });
      for (Index j : touched) {
        const double pool = buf[j];
        for (Index a : g.objects_of(j)) {
          out[a] += pool / static_cast<double>(g.object_degree(a));
        }
      }
      clear_touched(buf, touched);
      return;
    }
    case Method::CosRA:
    case Method::CosRA_T: {
      const bool use_trust = cfg.method == Method::CosRA_T;
      double theta = 1.0;
      if (use_trust) {
        theta = cfg.theta;
        if (!(theta >= 0.0 && theta <= 1.0)) {
          throw std::invalid_argument("theta must lie in [0, 1]");
        }
        if (trust == nullptr) {
          throw std::invalid_argument("CosRA_T requires a trust graph");
        }
      }
      spread_to_users(g, user, buf, touched,
                      [](double ka, double kj) { return 1.0 / std::sqrt(kj * ka); });

      auto& trusted = ws.trusted_flags();
      std::span<const Index> out_links;
      const bool scale = use_trust && theta != 1.0;
      if (scale) {
        out_links = trust->trusted_by(user);
        for (Index j : out_links) trusted[j] = 1;
      }
      for (Index j : touched) {
        double pool = buf[j];
        if (scale && trusted[j]) {
          // pool > 0 for every touched user; 0^theta never arises here.
          pool = theta == 0.0 ? 1.0 : std::pow(pool, theta);
        }
        const double kj = static_cast<double>(g.user_degree(j));
        for (Index a : g.objects_of(j)) {
          out[a] += pool / std::sqrt(kj * static_cast<double>(g.object_degree(a)));
        }
      }
      if (scale) {
        for (Index j : out_links) trusted[j] = 0;
      }
      clear_touched(buf, touched);
      return;
    }
  }
}

namespace {

ResourceVector score_with_fresh_workspace(const RatingGraph& g, const TrustGraph* t,
                                          const MethodConfig& cfg, Index user) {
  ScoreWorkspace ws(g.user_count());
  ResourceVector out;
  score_user(g, t, cfg, user, ws, out);
  return out;
}

}  // namespace

ResourceVector score_ucf(const RatingGraph& g, Index user) {
  return score_with_fresh_workspace(g, nullptr, {Method::UCF}, user);
}

ResourceVector score_md(const RatingGraph& g, Index user) {
  return score_with_fresh_workspace(g, nullptr, {Method::MD}, user);
}

ResourceVector score_hc(const RatingGraph& g, Index user) {
  return score_with_fresh_workspace(g, nullptr, {Method::HC}, user);
}

ResourceVector score_cosra(const RatingGraph& g, Index user) {
  return score_with_fresh_workspace(g, nullptr, {Method::CosRA}, user);
}

ResourceVector score_cosra_t(const RatingGraph& g, const TrustGraph& t, Index user, double theta) {
  return score_with_fresh_workspace(g, &t, {Method::CosRA_T, theta}, user);
}

RecommendationList top_l(Index user, const ResourceVector& scores,
                         std::span<const Index> collected, std::size_t L) {
  if (L == 0) throw std::invalid_argument("top_l: L must be at least 1");

  std::vector<Index> candidates;
  candidates.reserve(scores.size() - collected.size());
  std::size_t c = 0;
  for (Index a = 0; a < scores.size(); ++a) {
    if (c < collected.size() && collected[c] == a) {
      ++c;
      continue;
    }
    candidates.push_back(a);
  }

  const auto better = [&scores](Index a, Index b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  const std::size_t take = std::min(L, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + take, candidates.end(), better);
  candidates.resize(take);

  RecommendationList list;
  list.user = user;
  list.items = std::move(candidates);
  list.scores.reserve(take);
  for (Index a : list.items) list.scores.push_back(scores[a]);
  return list;
}

}  // namespace diffrec
