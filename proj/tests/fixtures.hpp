#pragma once

#include <vector>

#include "diffrec/graph.hpp"

namespace diffrec::testing {

// Reference fixture used across the suites: 3 users, 4 objects,
// links u1:{o1,o2} u2:{o2,o3} u3:{o1,o3,o4}, trust edge u1 -> u3.
// Smallest graph where trust scaling changes a ranking.
inline const std::vector<Link> kT1Links = {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 0}, {2, 2}, {2, 3}};
inline const std::vector<Link> kT1Trust = {{0, 2}};
inline constexpr Index kT1Users = 3;
inline constexpr Index kT1Objects = 4;

inline RatingGraph t1_rating() { return RatingGraph::build(kT1Links, kT1Users, kT1Objects); }
inline TrustGraph t1_trust() { return TrustGraph::build(kT1Trust, kT1Users); }

}  // namespace diffrec::testing
