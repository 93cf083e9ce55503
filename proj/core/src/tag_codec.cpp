#include "jointtag/tag_codec.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>

#include "jointtag/errors.hpp"

namespace jointtag {

RelationSet::RelationSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw ValidationError("no relations");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw ValidationError("empty relation name at position " + std::to_string(i));
    if (!index_.emplace(names_[i], static_cast<RelationId>(i)).second) {
      throw ValidationError("duplicate relation name '" + names_[i] + "'");
    }
  }
}

std::optional<RelationId> RelationSet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

RelationSet RelationSet::read(std::istream& in) {
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    names.push_back(line.substr(first));
  }
  return RelationSet(std::move(names));
}

RelationSet RelationSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open relations file " + path);
  return read(in);
}

namespace {

constexpr char kPositionChars[] = {'B', 'I', 'E', 'S'};

int position_slot(Position p) {
  switch (p) {
    case Position::kBegin: return 0;
    case Position::kInside: return 1;
    case Position::kEnd: return 2;
    case Position::kSingle: return 3;
    case Position::kOther: break;
  }
  return -1;
}

}  // namespace

TagVocabulary::TagVocabulary(RelationSet relations) : relations_(std::move(relations)) {
  if (relations_.empty()) throw ValidationError("no relations");
}

TagIndex TagVocabulary::index(const Tag& tag) const {
  if (tag.is_other()) return 0;
  if (tag.relation >= relations_.size()) throw ValidationError("tag relation out of range");
  const int role = tag.role == Role::kFirst ? 0 : 1;
  return static_cast<TagIndex>(1 + tag.relation * 8 + role * 4 + position_slot(tag.position));
}

Tag TagVocabulary::tag(TagIndex index) const {
  if (index >= size()) throw ValidationError("tag index " + std::to_string(index) + " out of range");
  if (index == 0) return Tag::other();
  const TagIndex k = index - 1;
  const auto pos = static_cast<Position>(static_cast<int>(Position::kBegin) + static_cast<int>(k % 4));
  const Role role = (k / 4) % 2 == 0 ? Role::kFirst : Role::kSecond;
  return Tag::make(pos, static_cast<RelationId>(k / 8), role);
}

std::string TagVocabulary::text(const Tag& tag) const {
  if (tag.is_other()) return "O";
  std::string out;
  out += kPositionChars[position_slot(tag.position)];
  out += '-';
  out += relations_.name(tag.relation);
  out += '-';
  out += tag.role == Role::kFirst ? '1' : '2';
  return out;
}

Tag TagVocabulary::parse(std::string_view text) const {
  if (text == "O") return Tag::other();
  // Relation names may contain '-', so split on the first and last dash.
  if (text.size() < 5 || text[1] != '-' || text[text.size() - 2] != '-') {
    throw ValidationError("malformed tag '" + std::string(text) + "'");
  }
  Position pos;
  switch (text[0]) {
    case 'B': pos = Position::kBegin; break;
    case 'I': pos = Position::kInside; break;
    case 'E': pos = Position::kEnd; break;
    case 'S': pos = Position::kSingle; break;
    default: throw ValidationError("malformed tag '" + std::string(text) + "'");
  }
  Role role;
  switch (text.back()) {
    case '1': role = Role::kFirst; break;
    case '2': role = Role::kSecond; break;
    default: throw ValidationError("malformed tag '" + std::string(text) + "'");
  }
  const std::string_view rel = text.substr(2, text.size() - 4);
  auto id = relations_.find(rel);
  if (!id) throw ValidationError("unknown relation '" + std::string(rel) + "' in tag");
  return Tag::make(pos, *id, role);
}

void TagVocabulary::write(std::ostream& out) const {
  for (TagIndex i = 0; i < size(); ++i) out << text(i) << '\n';
}

TagVocabulary build_tag_vocabulary(const RelationSet& relations) { return TagVocabulary(relations); }

void validate(const AnnotatedSentence& sentence, const RelationSet& relations) {
  const std::size_t n = sentence.tokens.size();
  std::vector<EntityMention> mentions;
  for (const Triplet& t : sentence.triplets) {
    if (t.relation >= relations.size()) throw ValidationError("triplet relation out of range");
    for (const EntityMention* m : {&t.e1, &t.e2}) {
      if (m->start > m->end || m->end >= n) {
        throw ValidationError("entity span [" + std::to_string(m->start) + "," + std::to_string(m->end) +
                              "] outside sentence of " + std::to_string(n) + " tokens");
      }
      mentions.push_back(*m);
    }
  }
  std::sort(mentions.begin(), mentions.end());
  for (std::size_t i = 1; i < mentions.size(); ++i) {
    if (mentions[i - 1].overlaps(mentions[i])) {
      throw OverlappingEntities("overlapping entity mentions at token " + std::to_string(mentions[i].start));
    }
  }
}

namespace {

void paint(std::vector<Tag>& tags, const EntityMention& m, RelationId rel, Role role) {
  if (m.start == m.end) {
    tags[m.start] = Tag::make(Position::kSingle, rel, role);
    return;
  }
  tags[m.start] = Tag::make(Position::kBegin, rel, role);
  for (std::size_t i = m.start + 1; i < m.end; ++i) tags[i] = Tag::make(Position::kInside, rel, role);
  tags[m.end] = Tag::make(Position::kEnd, rel, role);
}

}  // namespace

std::vector<Tag> encode(const AnnotatedSentence& sentence, const TagVocabulary& vocab) {
  validate(sentence, vocab.relations());
  std::vector<Tag> tags(sentence.tokens.size(), Tag::other());
  for (const Triplet& t : sentence.triplets) {
    paint(tags, t.e1, t.relation, Role::kFirst);
    paint(tags, t.e2, t.relation, Role::kSecond);
  }
  return tags;
}

std::vector<TagIndex> encode_indices(const AnnotatedSentence& sentence, const TagVocabulary& vocab) {
  std::vector<Tag> tags = encode(sentence, vocab);
  std::vector<TagIndex> out;
  out.reserve(tags.size());
  for (const Tag& t : tags) out.push_back(vocab.index(t));
  return out;
}

std::vector<TaggedEntity> extract_entities(std::span<const Tag> tags) {
  std::vector<TaggedEntity> out;
  bool in_run = false;
  TaggedEntity run;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag& t = tags[i];
    const bool continues = in_run && !t.is_other() && t.relation == run.relation && t.role == run.role;
    switch (t.position) {
      case Position::kOther:
        in_run = false;
        break;
      case Position::kSingle:
        in_run = false;
        out.push_back({{i, i}, t.relation, t.role});
        break;
      case Position::kBegin:
        in_run = true;
        run = {{i, i}, t.relation, t.role};
        break;
      case Position::kInside:
        if (!continues) in_run = false;
        break;
      case Position::kEnd:
        if (continues) {
          run.span.end = i;
          out.push_back(run);
        }
        in_run = false;
        break;
    }
  }
  return out;
}

DecodeResult decode_detailed(std::span<const Tag> tags) {
  const std::vector<TaggedEntity> entities = extract_entities(tags);

  // Candidate edges: (distance, role-1 start, role-2 start, role-1 idx, role-2 idx).
  using Edge = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, std::size_t>;
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < entities.size(); ++a) {
    if (entities[a].role != Role::kFirst) continue;
    for (std::size_t b = 0; b < entities.size(); ++b) {
      if (entities[b].role != Role::kSecond || entities[b].relation != entities[a].relation) continue;
      const std::size_t s1 = entities[a].span.start;
      const std::size_t s2 = entities[b].span.start;
      edges.emplace_back(s1 > s2 ? s1 - s2 : s2 - s1, s1, s2, a, b);
    }
  }
  std::sort(edges.begin(), edges.end());

  DecodeResult result;
  std::vector<bool> used(entities.size(), false);
  for (const auto& [dist, s1, s2, a, b] : edges) {
    if (used[a] || used[b]) continue;
    used[a] = used[b] = true;
    result.triplets.push_back({entities[a].span, entities[a].relation, entities[b].span});
  }
  std::sort(result.triplets.begin(), result.triplets.end(), [](const Triplet& x, const Triplet& y) {
    return std::tie(x.e1.start, x.e2.start) < std::tie(y.e1.start, y.e2.start);
  });
  for (std::size_t k = 0; k < entities.size(); ++k) {
    if (!used[k]) result.unpaired.push_back(entities[k]);
  }
  return result;
}

std::vector<Triplet> decode(std::span<const Tag> tags) { return decode_detailed(tags).triplets; }

SingleCounts count_singles(std::span<const Tag> tags) {
  const DecodeResult r = decode_detailed(tags);
  SingleCounts c;
  c.paired = 2 * r.triplets.size();
  for (const TaggedEntity& e : r.unpaired) {
    (e.role == Role::kFirst ? c.single_e1 : c.single_e2) += 1;
  }
  return c;
}

std::vector<Tag> to_tags(std::span<const TagIndex> indices, const TagVocabulary& vocab) {
  std::vector<Tag> out;
  out.reserve(indices.size());
  for (TagIndex i : indices) out.push_back(vocab.tag(i));
  return out;
}

}  // namespace jointtag
