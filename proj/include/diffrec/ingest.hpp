#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "diffrec/graph.hpp"

namespace diffrec {

/// Malformed input; the message carries file and line context.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RawRating {
  std::string user;
  std::string object;
  int rating = 0;  // 1..5
};

using TokenEdge = std::pair<std::string, std::string>;

/// Counters for everything silently dropped or collapsed on the way in.
struct LoadReport {
  std::size_t ratings_read = 0;
  std::size_t ratings_below_threshold = 0;
  std::size_t duplicate_rating_links = 0;
  std::size_t trust_read = 0;
  std::size_t dropped_trust = 0;  // endpoint absent from the rating data
  std::size_t dropped_trust_self_loops = 0;
  std::size_t duplicate_trust_links = 0;
};

/// The assembled pair of networks plus the external-token <-> dense-index
/// bijections (index order is first appearance in the rating data).
struct Dataset {
  RatingGraph ratings;
  TrustGraph trust;
  std::vector<std::string> user_tokens;    // index -> token
  std::vector<std::string> object_tokens;  // index -> token

  std::unordered_map<std::string, Index> user_index() const;
  std::unordered_map<std::string, Index> object_index() const;
};

bool operator==(const Dataset& a, const Dataset& b);

/// Raw rating file: `user<TAB>object<TAB>rating` per line (any whitespace
/// accepted), `#` comments and blank lines skipped. Ratings outside 1..5 or
/// malformed lines raise ParseError with the line number.
std::vector<RawRating> read_raw_ratings(const std::filesystem::path& path);

/// Raw trust file: `truster<TAB>trustee` per line, same conventions.
std::vector<TokenEdge> read_raw_trust(const std::filesystem::path& path);

/// Keeps the ratings with value >= threshold, in input order, duplicates
/// preserved (assembly collapses them).
std::vector<TokenEdge> threshold_ratings(const std::vector<RawRating>& ratings,
                                         int threshold = 3);

/// Indexes users and objects by first appearance over the kept links, builds
/// both graphs, and drops trust edges whose endpoints never rated anything
/// (counted in the report, never fatal).
Dataset assemble_dataset(const std::vector<TokenEdge>& kept_links,
                         const std::vector<TokenEdge>& trust_edges, LoadReport* report = nullptr);

/// Canonical dataset file: `users m objects n` header, then `R u o` rating
/// links, `T i j` trust links, `U idx token` / `O idx token` map sections,
/// all over dense indices. write/read round-trips bit-exactly.
void write_canonical(const Dataset& d, const std::filesystem::path& path);
void write_canonical(const Dataset& d, std::ostream& out);
Dataset read_canonical(const std::filesystem::path& path, LoadReport* report = nullptr);
Dataset read_canonical(std::istream& in, const std::string& name, LoadReport* report = nullptr);

}  // namespace diffrec
