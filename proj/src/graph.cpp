#include "diffrec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace diffrec {

namespace {

// Sorted-merge sum of 1/k_user over the common collectors of two objects.
double common_user_inverse_degree_sum(const RatingGraph& g, Index a, Index b) {
  auto ua = g.users_of(a);
  auto ub = g.users_of(b);
  double sum = 0.0;
  std::size_t p = 0, q = 0;
  while (p < ua.size() && q < ub.size()) {
    if (ua[p] < ub[q]) {
      ++p;
    } else if (ua[p] > ub[q]) {
      ++q;
    } else {
      sum += 1.0 / static_cast<double>(g.user_degree(ua[p]));
      ++p;
      ++q;
    }
  }
  return sum;
}

std::size_t sorted_overlap(std::span<const Index> a, std::span<const Index> b) {
  std::size_t count = 0, p = 0, q = 0;
  while (p < a.size() && q < b.size()) {
    if (a[p] < b[q]) {
      ++p;
    } else if (a[p] > b[q]) {
      ++q;
    } else {
      ++count;
      ++p;
      ++q;
    }
  }
  return count;
}

}  // namespace

RatingGraph RatingGraph::build(std::span<const Link> links, Index users, Index objects) {
  RatingGraph g;
  g.m_ = users;
  g.n_ = objects;

  std::vector<std::vector<Index>> rows(users);
  for (std::size_t t = 0; t < links.size(); ++t) {
    const auto [u, o] = links[t];
    if (u >= users) {
      throw std::invalid_argument("rating link " + std::to_string(t) + " (user " +
                                  std::to_string(u) + ", object " + std::to_string(o) +
                                  "): user index out of range (m=" + std::to_string(users) + ")");
    }
    if (o >= objects) {
      throw std::invalid_argument("rating link " + std::to_string(t) + " (user " +
                                  std::to_string(u) + ", object " + std::to_string(o) +
                                  "): object index out of range (n=" + std::to_string(objects) +
                                  ")");
    }
    rows[u].push_back(o);
  }

  g.user_ptr_.assign(users + 1, 0);
  std::vector<Index> object_deg(objects, 0);
  for (Index u = 0; u < users; ++u) {
    auto& row = rows[u];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    g.user_ptr_[u + 1] = g.user_ptr_[u] + row.size();
    for (Index o : row) ++object_deg[o];
  }

  g.user_items_.reserve(g.user_ptr_.back());
  for (Index u = 0; u < users; ++u) {
    g.user_items_.insert(g.user_items_.end(), rows[u].begin(), rows[u].end());
  }

  g.object_ptr_.assign(objects + 1, 0);
  for (Index o = 0; o < objects; ++o) {
    g.object_ptr_[o + 1] = g.object_ptr_[o] + object_deg[o];
  }
  g.object_users_.resize(g.object_ptr_.back());
  std::vector<std::size_t> cursor(g.object_ptr_.begin(), g.object_ptr_.end() - 1);
  // User-major fill keeps each object's collector list sorted by user.
  for (Index u = 0; u < users; ++u) {
    for (Index o : rows[u]) {
      g.object_users_[cursor[o]++] = u;
    }
  }
  return g;
}

bool RatingGraph::has_link(Index user, Index object) const {
  auto row = objects_of(user);
  return std::binary_search(row.begin(), row.end(), object);
}

std::vector<Link> RatingGraph::links() const {
  std::vector<Link> out;
  out.reserve(link_count());
  for (Index u = 0; u < m_; ++u) {
    for (Index o : objects_of(u)) out.emplace_back(u, o);
  }
  return out;
}

TrustGraph TrustGraph::build(std::span<const Link> edges, Index users) {
  TrustGraph t;
  t.m_ = users;
  std::vector<std::vector<Index>> rows(users);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    if (i >= users || j >= users) {
      throw std::invalid_argument("trust edge " + std::to_string(e) + " (" + std::to_string(i) +
                                  " -> " + std::to_string(j) + "): index out of range (m=" +
                                  std::to_string(users) + ")");
    }
    if (i == j) continue;  // no self-trust
    rows[i].push_back(j);
  }
  t.out_ptr_.assign(users + 1, 0);
  for (Index u = 0; u < users; ++u) {
    auto& row = rows[u];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    t.out_ptr_[u + 1] = t.out_ptr_[u] + row.size();
  }
  t.out_items_.reserve(t.out_ptr_.back());
  for (Index u = 0; u < users; ++u) {
    t.out_items_.insert(t.out_items_.end(), rows[u].begin(), rows[u].end());
  }
  return t;
}

bool TrustGraph::trusts(Index truster, Index trustee) const {
  auto row = trusted_by(truster);
  return std::binary_search(row.begin(), row.end(), trustee);
}

double cosine_user_similarity(const RatingGraph& g, Index i, Index j) {
  const double ki = g.user_degree(i);
  const double kj = g.user_degree(j);
  if (ki == 0.0 || kj == 0.0) return 0.0;
  const double overlap =
      static_cast<double>(sorted_overlap(g.objects_of(i), g.objects_of(j)));
  return overlap / std::sqrt(ki * kj);
}

double cosine_object_similarity(const RatingGraph& g, Index a, Index b) {
  const double ka = g.object_degree(a);
  const double kb = g.object_degree(b);
  if (ka == 0.0 || kb == 0.0) return 0.0;
  const double overlap = static_cast<double>(sorted_overlap(g.users_of(a), g.users_of(b)));
  return overlap / std::sqrt(ka * kb);
}

double cosra_index(const RatingGraph& g, Index a, Index b) {
  const double ka = g.object_degree(a);
  const double kb = g.object_degree(b);
  if (ka == 0.0 || kb == 0.0) return 0.0;
  return common_user_inverse_degree_sum(g, a, b) / std::sqrt(ka * kb);
}

double md_transfer(const RatingGraph& g, Index a, Index b) {
  const double kb = g.object_degree(b);
  if (kb == 0.0) return 0.0;
  return common_user_inverse_degree_sum(g, a, b) / kb;
}

double hc_transfer(const RatingGraph& g, Index a, Index b) {
  const double ka = g.object_degree(a);
  if (ka == 0.0) return 0.0;
  return common_user_inverse_degree_sum(g, a, b) / ka;
}

}  // namespace diffrec
