#include "diffrec/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace diffrec {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

bool is_skippable(std::string_view line) {
  auto fields = split_fields(line);
  return fields.empty() || fields.front().front() == '#';
}

[[noreturn]] void fail(const std::string& name, std::size_t lineno, const std::string& what) {
  throw ParseError(name + ":" + std::to_string(lineno) + ": " + what);
}

long parse_integer(std::string_view text, const std::string& name, std::size_t lineno,
                   const char* what) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(name, lineno, std::string("expected ") + what + ", got '" + std::string(text) + "'");
  }
  return value;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open for reading");
  return in;
}

}  // namespace

std::unordered_map<std::string, Index> Dataset::user_index() const {
  std::unordered_map<std::string, Index> map;
  map.reserve(user_tokens.size());
  for (Index i = 0; i < user_tokens.size(); ++i) map.emplace(user_tokens[i], i);
  return map;
}

std::unordered_map<std::string, Index> Dataset::object_index() const {
  std::unordered_map<std::string, Index> map;
  map.reserve(object_tokens.size());
  for (Index i = 0; i < object_tokens.size(); ++i) map.emplace(object_tokens[i], i);
  return map;
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.user_tokens != b.user_tokens || a.object_tokens != b.object_tokens) return false;
  if (a.ratings.user_count() != b.ratings.user_count() ||
      a.ratings.object_count() != b.ratings.object_count() ||
      a.ratings.link_count() != b.ratings.link_count() ||
      a.trust.edge_count() != b.trust.edge_count()) {
    return false;
  }
  if (a.ratings.links() != b.ratings.links()) return false;
  for (Index u = 0; u < a.trust.user_count(); ++u) {
    auto ea = a.trust.trusted_by(u);
    auto eb = b.trust.trusted_by(u);
    if (!std::equal(ea.begin(), ea.end(), eb.begin(), eb.end())) return false;
  }
  return true;
}

std::vector<RawRating> read_raw_ratings(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  const std::string name = path.string();
  std::vector<RawRating> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_skippable(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != 3) {
      fail(name, lineno, "expected 'user object rating' (3 fields), got " +
                             std::to_string(fields.size()));
    }
    const long rating = parse_integer(fields[2], name, lineno, "an integer rating");
    if (rating < 1 || rating > 5) {
      fail(name, lineno, "rating must be in [1, 5], got " + std::to_string(rating));
    }
    out.push_back({std::string(fields[0]), std::string(fields[1]), static_cast<int>(rating)});
  }
  return out;
}

std::vector<TokenEdge> read_raw_trust(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  const std::string name = path.string();
  std::vector<TokenEdge> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_skippable(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != 2) {
      fail(name, lineno,
           "expected 'truster trustee' (2 fields), got " + std::to_string(fields.size()));
    }
    out.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  return out;
}

std::vector<TokenEdge> threshold_ratings(const std::vector<RawRating>& ratings, int threshold) {
  std::vector<TokenEdge> kept;
  for (const auto& r : ratings) {
    if (r.rating >= threshold) kept.emplace_back(r.user, r.object);
  }
  return kept;
}

Dataset assemble_dataset(const std::vector<TokenEdge>& kept_links,
                         const std::vector<TokenEdge>& trust_edges, LoadReport* report) {
  Dataset d;
  std::unordered_map<std::string, Index> users;
  std::unordered_map<std::string, Index> objects;
  std::vector<Link> links;
  links.reserve(kept_links.size());
  for (const auto& [user, object] : kept_links) {
    auto [uit, unew] = users.emplace(user, static_cast<Index>(d.user_tokens.size()));
    if (unew) d.user_tokens.push_back(user);
    auto [oit, onew] = objects.emplace(object, static_cast<Index>(d.object_tokens.size()));
    if (onew) d.object_tokens.push_back(object);
    links.emplace_back(uit->second, oit->second);
  }

  const Index m = static_cast<Index>(d.user_tokens.size());
  const Index n = static_cast<Index>(d.object_tokens.size());
  d.ratings = RatingGraph::build(links, m, n);

  std::vector<Link> trust;
  trust.reserve(trust_edges.size());
  std::size_t dropped = 0, self_loops = 0;
  for (const auto& [from, to] : trust_edges) {
    auto fit = users.find(from);
    auto tit = users.find(to);
    if (fit == users.end() || tit == users.end()) {
      ++dropped;
      continue;
    }
    if (fit->second == tit->second) {
      ++self_loops;
      continue;
    }
    trust.emplace_back(fit->second, tit->second);
  }
  std::sort(trust.begin(), trust.end());
  const std::size_t before = trust.size();
  trust.erase(std::unique(trust.begin(), trust.end()), trust.end());
  d.trust = TrustGraph::build(trust, m);

  if (report != nullptr) {
    report->ratings_read += kept_links.size();
    report->duplicate_rating_links += kept_links.size() - d.ratings.link_count();
    report->trust_read += trust_edges.size();
    report->dropped_trust += dropped;
    report->dropped_trust_self_loops += self_loops;
    report->duplicate_trust_links += before - trust.size();
  }
  return d;
}

void write_canonical(const Dataset& d, std::ostream& out) {
  out << "users " << d.ratings.user_count() << " objects " << d.ratings.object_count() << "\n";
  for (Index u = 0; u < d.ratings.user_count(); ++u) {
    for (Index o : d.ratings.objects_of(u)) out << "R " << u << " " << o << "\n";
  }
  for (Index u = 0; u < d.trust.user_count(); ++u) {
    for (Index j : d.trust.trusted_by(u)) out << "T " << u << " " << j << "\n";
  }
  for (Index u = 0; u < d.user_tokens.size(); ++u) out << "U " << u << " " << d.user_tokens[u] << "\n";
  for (Index o = 0; o < d.object_tokens.size(); ++o) {
    out << "O " << o << " " << d.object_tokens[o] << "\n";
  }
}

void write_canonical(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path.string() + ": cannot open for writing");
  write_canonical(d, out);
  out.flush();
  if (!out) throw ParseError(path.string() + ": write failed");
}

Dataset read_canonical(std::istream& in, const std::string& name, LoadReport* report) {
  std::string line;
  std::size_t lineno = 0;

  // Header.
  Index m = 0, n = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_skippable(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != 4 || fields[0] != "users" || fields[2] != "objects") {
      fail(name, lineno, "expected header 'users <m> objects <n>'");
    }
    const long mv = parse_integer(fields[1], name, lineno, "a user count");
    const long nv = parse_integer(fields[3], name, lineno, "an object count");
    if (mv < 0 || nv < 0) fail(name, lineno, "counts must be nonnegative");
    m = static_cast<Index>(mv);
    n = static_cast<Index>(nv);
    have_header = true;
    break;
  }
  if (!have_header) fail(name, lineno, "missing header 'users <m> objects <n>'");

  std::vector<Link> links;
  std::vector<Link> trust;
  Dataset d;
  d.user_tokens.assign(m, {});
  d.object_tokens.assign(n, {});
  std::vector<char> user_seen(m, 0), object_seen(n, 0);

  auto parse_index = [&](std::string_view text, std::size_t lno, Index bound,
                         const char* what) -> Index {
    const long v = parse_integer(text, name, lno, what);
    if (v < 0 || static_cast<unsigned long>(v) >= bound) {
      fail(name, lno, std::string(what) + " " + std::to_string(v) + " out of range [0, " +
                          std::to_string(bound) + ")");
    }
    return static_cast<Index>(v);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (is_skippable(line)) continue;
    auto fields = split_fields(line);
    const std::string_view tag = fields[0];
    if (tag == "R") {
      if (fields.size() != 3) {
        fail(name, lineno, "expected 'R <user> <object>' (3 fields), got " +
                               std::to_string(fields.size()));
      }
      links.emplace_back(parse_index(fields[1], lineno, m, "user index"),
                         parse_index(fields[2], lineno, n, "object index"));
    } else if (tag == "T") {
      if (fields.size() != 3) {
        fail(name, lineno, "expected 'T <truster> <trustee>' (3 fields), got " +
                               std::to_string(fields.size()));
      }
      trust.emplace_back(parse_index(fields[1], lineno, m, "user index"),
                         parse_index(fields[2], lineno, m, "user index"));
    } else if (tag == "U" || tag == "O") {
      if (fields.size() != 3) {
        fail(name, lineno,
             std::string("expected '") + std::string(tag) + " <index> <token>' (3 fields), got " +
                 std::to_string(fields.size()));
      }
      if (tag == "U") {
        const Index u = parse_index(fields[1], lineno, m, "user index");
        if (user_seen[u]) fail(name, lineno, "duplicate U entry for index " + std::to_string(u));
        user_seen[u] = 1;
        d.user_tokens[u] = std::string(fields[2]);
      } else {
        const Index o = parse_index(fields[1], lineno, n, "object index");
        if (object_seen[o]) fail(name, lineno, "duplicate O entry for index " + std::to_string(o));
        object_seen[o] = 1;
        d.object_tokens[o] = std::string(fields[2]);
      }
    } else {
      fail(name, lineno, "unknown record tag '" + std::string(tag) + "' (expected R, T, U or O)");
    }
  }

  for (Index u = 0; u < m; ++u) {
    if (!user_seen[u]) {
      throw ParseError(name + ": missing U entry for user index " + std::to_string(u));
    }
  }
  for (Index o = 0; o < n; ++o) {
    if (!object_seen[o]) {
      throw ParseError(name + ": missing O entry for object index " + std::to_string(o));
    }
  }

  d.ratings = RatingGraph::build(links, m, n);

  std::sort(trust.begin(), trust.end());
  const std::size_t trust_before = trust.size();
  trust.erase(std::unique(trust.begin(), trust.end()), trust.end());
  std::size_t trust_self = 0;
  std::erase_if(trust, [&trust_self](const Link& e) {
    if (e.first == e.second) {
      ++trust_self;
      return true;
    }
    return false;
  });
  d.trust = TrustGraph::build(trust, m);

  if (report != nullptr) {
    report->ratings_read += links.size();
    report->duplicate_rating_links += links.size() - d.ratings.link_count();
    report->trust_read += trust_before;
    report->duplicate_trust_links += trust_before - trust.size() - trust_self;
    report->dropped_trust_self_loops += trust_self;
  }
  return d;
}

Dataset read_canonical(const std::filesystem::path& path, LoadReport* report) {
  auto in = open_or_throw(path);
  return read_canonical(in, path.string(), report);
}

}  // namespace diffrec
