#include "jointtag/scoring.hpp"

#include <algorithm>

namespace jointtag {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// One-to-one matching on exact keys, predictions in order, first free gold.
// With equality edges this greedy count is a maximum matching.
template <typename Key>
PrfCounts match(const std::vector<Key>& gold, const std::vector<Key>& predicted) {
  PrfCounts c{gold.size(), predicted.size(), 0};
  std::vector<bool> used(gold.size(), false);
  for (const Key& p : predicted) {
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (!used[g] && gold[g] == p) {
        used[g] = true;
        ++c.correct;
        break;
      }
    }
  }
  return c;
}

struct TripletKey {
  RelationId relation;
  std::size_t head1;
  std::size_t head2;
  friend bool operator==(const TripletKey&, const TripletKey&) = default;
};

struct PairKey {
  std::size_t head1;
  std::size_t head2;
  friend bool operator==(const PairKey&, const PairKey&) = default;
};

}  // namespace

double f1_score(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

double PrfCounts::precision() const { return ratio(correct, predicted); }
double PrfCounts::recall() const { return ratio(correct, gold); }
double PrfCounts::f1() const { return f1_score(precision(), recall()); }

PrfCounts score_triplets(std::span<const Triplet> gold, std::span<const Triplet> predicted) {
  std::vector<TripletKey> g, p;
  for (const auto& t : gold) g.push_back({t.relation, t.e1.head(), t.e2.head()});
  for (const auto& t : predicted) p.push_back({t.relation, t.e1.head(), t.e2.head()});
  return match(g, p);
}

ElementCounts score_elements(std::span<const Triplet> gold, const DecodeResult& predicted) {
  std::vector<std::size_t> g1, g2, p1, p2;
  std::vector<PairKey> gp, pp;
  for (const auto& t : gold) {
    g1.push_back(t.e1.head());
    g2.push_back(t.e2.head());
    gp.push_back({t.e1.head(), t.e2.head()});
  }
  for (const auto& t : predicted.triplets) {
    p1.push_back(t.e1.head());
    p2.push_back(t.e2.head());
    pp.push_back({t.e1.head(), t.e2.head()});
  }
  for (const auto& e : predicted.unpaired) (e.role == Role::kFirst ? p1 : p2).push_back(e.span.head());
  return {match(g1, p1), match(g2, p2), match(gp, pp)};
}

ElementCounts score_elements(std::span<const Triplet> gold, std::span<const Triplet> predicted) {
  DecodeResult r;
  r.triplets.assign(predicted.begin(), predicted.end());
  return score_elements(gold, r);
}

double EvalReport::single_ratio_e1() const { return ratio(singles.single_e1, singles.single_e1 + singles.paired / 2); }
double EvalReport::single_ratio_e2() const { return ratio(singles.single_e2, singles.single_e2 + singles.paired / 2); }
double EvalReport::single_ratio() const {
  return ratio(singles.single_e1 + singles.single_e2, singles.single_e1 + singles.single_e2 + singles.paired);
}

void EvalReport::add(std::span<const Triplet> gold, std::span<const Tag> predicted_tags) {
  const DecodeResult decoded = decode_detailed(predicted_tags);
  ++sentences;
  triplet += score_triplets(gold, decoded.triplets);
  const ElementCounts el = score_elements(gold, decoded);
  e1 += el.e1;
  e2 += el.e2;
  pair += el.pair;
  SingleCounts s;
  s.paired = 2 * decoded.triplets.size();
  for (const auto& e : decoded.unpaired) (e.role == Role::kFirst ? s.single_e1 : s.single_e2) += 1;
  singles += s;
}

EvalReport& EvalReport::operator+=(const EvalReport& o) {
  sentences += o.sentences;
  triplet += o.triplet;
  e1 += o.e1;
  e2 += o.e2;
  pair += o.pair;
  singles += o.singles;
  return *this;
}

}  // namespace jointtag
