#pragma once

// Exhaustive pairing oracles for the nearest-principle decoder.

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "jointtag/tag_codec.hpp"

namespace oracle {

using Pair = std::tuple<jointtag::RelationId, std::size_t, std::size_t>;  // relation, head1, head2

// Declarative reading of the repair policy: every substring that is exactly
// S, or B I* E with one relation and role, is an entity.
inline std::vector<jointtag::TaggedEntity> valid_runs(const std::vector<jointtag::Tag>& tags) {
  using jointtag::Position;
  std::vector<jointtag::TaggedEntity> out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i].position == Position::kSingle) out.push_back({{i, i}, tags[i].relation, tags[i].role});
    if (tags[i].position != Position::kBegin) continue;
    for (std::size_t j = i + 1; j < tags.size(); ++j) {
      const bool same = tags[j].relation == tags[i].relation && tags[j].role == tags[i].role;
      if (!same) break;
      if (tags[j].position == Position::kEnd) {
        out.push_back({{i, j}, tags[i].relation, tags[i].role});
        break;
      }
      if (tags[j].position != Position::kInside) break;
    }
  }
  return out;
}

struct Edge {
  std::size_t dist, s1, s2;
  auto key() const { return std::tie(dist, s1, s2); }
  bool operator<(const Edge& o) const { return key() < o.key(); }
  bool operator==(const Edge& o) const { return key() == o.key(); }
};

inline std::size_t absdiff(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

// Enumerates every matching of size min(|first|, |second|) and hands the
// sorted edge list of each to `visit`.
template <typename Visit>
void enumerate_matchings(const std::vector<std::size_t>& first, const std::vector<std::size_t>& second, Visit&& visit) {
  const bool swap_roles = first.size() > second.size();
  const auto& small = swap_roles ? second : first;
  const auto& large = swap_roles ? first : second;
  std::vector<bool> taken(large.size(), false);
  std::vector<Edge> edges;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == small.size()) {
      std::vector<Edge> sorted = edges;
      std::sort(sorted.begin(), sorted.end());
      visit(sorted);
      return;
    }
    for (std::size_t j = 0; j < large.size(); ++j) {
      if (taken[j]) continue;
      taken[j] = true;
      const std::size_t s1 = swap_roles ? large[j] : small[i];
      const std::size_t s2 = swap_roles ? small[i] : large[j];
      edges.push_back({absdiff(s1, s2), s1, s2});
      self(self, i + 1);
      edges.pop_back();
      taken[j] = false;
    }
  };
  rec(rec, 0);
}

enum class Objective {
  // Lexicographically smallest sorted (distance, start1, start2) edge list:
  // the matching that repeated global-minimum selection must produce.
  kLexicographic,
  // Smallest total distance, ties broken lexicographically as above.
  kTotalDistance,
};

// Best pairing per relation over all maximum-cardinality matchings.
inline std::set<Pair> best_pairing(const std::vector<jointtag::TaggedEntity>& entities, Objective objective) {
  std::map<jointtag::RelationId, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> by_rel;
  for (const auto& e : entities) {
    auto& slot = by_rel[e.relation];
    (e.role == jointtag::Role::kFirst ? slot.first : slot.second).push_back(e.span.start);
  }
  std::set<Pair> out;
  for (const auto& [rel, lists] : by_rel) {
    std::vector<Edge> best;
    std::size_t best_total = 0;
    bool have = false;
    enumerate_matchings(lists.first, lists.second, [&](const std::vector<Edge>& m) {
      std::size_t total = 0;
      for (const auto& e : m) total += e.dist;
      bool better;
      if (!have) {
        better = true;
      } else if (objective == Objective::kTotalDistance && total != best_total) {
        better = total < best_total;
      } else {
        better = m < best;
      }
      if (better) {
        best = m;
        best_total = total;
        have = true;
      }
    });
    for (const auto& e : best) out.insert({rel, e.s1, e.s2});
  }
  return out;
}

inline std::set<Pair> as_pairs(const std::vector<jointtag::Triplet>& triplets) {
  std::set<Pair> out;
  for (const auto& t : triplets) out.insert({t.relation, t.e1.start, t.e2.start});
  return out;
}

}  // namespace oracle
