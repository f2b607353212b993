#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace diffrec {

using Index = std::uint32_t;
using Link = std::pair<Index, Index>;  // (user, object)

/// Dense per-object resource state produced by one diffusion pass.
using ResourceVector = std::vector<double>;

/// Immutable bipartite user-object network held in dual CSR views
/// (user-major rows and object-major columns of the same 0/1 edge set).
/// Adjacency rows are sorted, which makes all pairwise-overlap sums
/// linear-time merges; the n x n transfer matrices are never materialized.
class RatingGraph {
 public:
  RatingGraph() = default;

  /// Builds from an arbitrary-order link list. Duplicate links collapse to
  /// one; an out-of-range index throws std::invalid_argument naming the
  /// offending link.
  static RatingGraph build(std::span<const Link> links, Index users, Index objects);

  Index user_count() const noexcept { return m_; }
  Index object_count() const noexcept { return n_; }
  std::size_t link_count() const noexcept { return user_items_.size(); }

  std::span<const Index> objects_of(Index user) const {
    return {user_items_.data() + user_ptr_[user], user_items_.data() + user_ptr_[user + 1]};
  }
  std::span<const Index> users_of(Index object) const {
    return {object_users_.data() + object_ptr_[object],
            object_users_.data() + object_ptr_[object + 1]};
  }

  Index user_degree(Index user) const { return user_ptr_[user + 1] - user_ptr_[user]; }
  Index object_degree(Index object) const { return object_ptr_[object + 1] - object_ptr_[object]; }

  bool has_link(Index user, Index object) const;

  /// Links in canonical order: user-major, objects ascending. The position
  /// of a link in this enumeration is its stable link index (used by the
  /// cross-validation split).
  std::vector<Link> links() const;

 private:
  Index m_ = 0;
  Index n_ = 0;
  std::vector<std::size_t> user_ptr_;    // m+1 offsets into user_items_
  std::vector<Index> user_items_;
  std::vector<std::size_t> object_ptr_;  // n+1 offsets into object_users_
  std::vector<Index> object_users_;
};

/// Immutable directed user->user trust network (out-adjacency only).
/// Self-loops and duplicate edges are dropped at construction.
class TrustGraph {
 public:
  TrustGraph() = default;

  static TrustGraph build(std::span<const Link> edges, Index users);

  Index user_count() const noexcept { return m_; }
  std::size_t edge_count() const noexcept { return out_items_.size(); }

  std::span<const Index> trusted_by(Index user) const {
    return {out_items_.data() + out_ptr_[user], out_items_.data() + out_ptr_[user + 1]};
  }
  Index out_degree(Index user) const { return out_ptr_[user + 1] - out_ptr_[user]; }
  bool trusts(Index truster, Index trustee) const;

 private:
  Index m_ = 0;
  std::vector<std::size_t> out_ptr_;
  std::vector<Index> out_items_;
};

// Element-level similarity and transfer formulas. Every degree that appears
// in a denominator yields 0 when it is 0 (the overlap sum is empty in
// exactly those cases, so no division by zero is ever evaluated).

/// s_ij = sum_a a_ia a_ja / sqrt(k_i k_j)
double cosine_user_similarity(const RatingGraph& g, Index i, Index j);

/// S^Cos_ab = sum_i a_ia a_ib / sqrt(k_a k_b)
double cosine_object_similarity(const RatingGraph& g, Index a, Index b);

/// S^CosRA_ab = (1/sqrt(k_a k_b)) sum_i a_ia a_ib / k_i
double cosra_index(const RatingGraph& g, Index a, Index b);

/// Mass-diffusion transfer element w_ab = (1/k_b) sum_i a_ia a_ib / k_i
/// (column-stochastic: resource is conserved).
double md_transfer(const RatingGraph& g, Index a, Index b);

/// Heat-conduction transfer element w_ab = (1/k_a) sum_i a_ia a_ib / k_i
/// (row-stochastic; the transpose of the MD matrix).
double hc_transfer(const RatingGraph& g, Index a, Index b);

}  // namespace diffrec
