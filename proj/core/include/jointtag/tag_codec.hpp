#pragma once

// Conversion between triplet annotations and per-token tag sequences.
//
// A tag is either O (Other) or a (position, relation, role) triple where
// position is one of B/I/E/S, relation indexes a RelationSet, and role says
// whether the token belongs to the first or the second entity of a triplet.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace jointtag {

using RelationId = std::uint32_t;
using TagIndex = std::uint32_t;

class RelationSet {
 public:
  RelationSet() = default;

  // Throws ValidationError on empty list, empty names or duplicates.
  explicit RelationSet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::string& name(RelationId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<RelationId> find(std::string_view name) const;

  // Reads one relation name per line; blank lines are skipped.
  static RelationSet read(std::istream& in);
  static RelationSet load(const std::string& path);

  friend bool operator==(const RelationSet& a, const RelationSet& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, RelationId> index_;
};

enum class Position : std::uint8_t { kOther, kBegin, kInside, kEnd, kSingle };
enum class Role : std::uint8_t { kFirst = 1, kSecond = 2 };

struct Tag {
  Position position = Position::kOther;
  RelationId relation = 0;
  Role role = Role::kFirst;

  static constexpr Tag other() { return Tag{}; }
  static constexpr Tag make(Position p, RelationId rel, Role role) { return Tag{p, rel, role}; }

  bool is_other() const { return position == Position::kOther; }

  friend bool operator==(const Tag&, const Tag&) = default;
};

// Bijection between tags and [0, 2*4*|R| + 1). Index 0 is O; the rest are
// ordered by (relation, role, position B<I<E<S).
class TagVocabulary {
 public:
  explicit TagVocabulary(RelationSet relations);

  std::size_t size() const { return 2 * 4 * relations_.size() + 1; }
  const RelationSet& relations() const { return relations_; }

  TagIndex index(const Tag& tag) const;
  Tag tag(TagIndex index) const;

  // "O" or "<POS>-<REL>-<ROLE>", e.g. "B-CP-1".
  std::string text(const Tag& tag) const;
  std::string text(TagIndex index) const { return text(tag(index)); }
  // Throws ValidationError on malformed text or unknown relation.
  Tag parse(std::string_view text) const;

  // One tag text per line, line number = index.
  void write(std::ostream& out) const;

 private:
  RelationSet relations_;
};

TagVocabulary build_tag_vocabulary(const RelationSet& relations);

struct EntityMention {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive

  std::size_t head() const { return start; }
  std::size_t length() const { return end - start + 1; }
  bool overlaps(const EntityMention& o) const { return start <= o.end && o.start <= end; }

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
  friend auto operator<=>(const EntityMention&, const EntityMention&) = default;
};

struct Triplet {
  EntityMention e1;
  RelationId relation = 0;
  EntityMention e2;

  friend bool operator==(const Triplet&, const Triplet&) = default;
  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

struct AnnotatedSentence {
  std::vector<std::string> tokens;
  std::vector<Triplet> triplets;
};

// Throws ValidationError for out-of-range spans or relations, and
// OverlappingEntities when any token lies in two entity mentions.
void validate(const AnnotatedSentence& sentence, const RelationSet& relations);

// Throws like validate().
std::vector<Tag> encode(const AnnotatedSentence& sentence, const TagVocabulary& vocab);
std::vector<TagIndex> encode_indices(const AnnotatedSentence& sentence, const TagVocabulary& vocab);

struct TaggedEntity {
  EntityMention span;
  RelationId relation = 0;
  Role role = Role::kFirst;

  friend bool operator==(const TaggedEntity&, const TaggedEntity&) = default;
};

// Maximal well-formed runs (S, or B I* E with constant relation and role).
// A tag that breaks a run discards the fragment collected so far; it starts
// a new run only if it is B or S. Output is ordered by start index.
std::vector<TaggedEntity> extract_entities(std::span<const Tag> tags);

struct DecodeResult {
  std::vector<Triplet> triplets;          // ordered by (e1.start, e2.start)
  std::vector<TaggedEntity> unpaired;     // ordered by start
};

// Pairs role-1 and role-2 entities of the same relation greedily by
// smallest start-to-start distance; ties go to the smaller role-1 start,
// then the smaller role-2 start.
DecodeResult decode_detailed(std::span<const Tag> tags);
std::vector<Triplet> decode(std::span<const Tag> tags);

struct SingleCounts {
  std::size_t single_e1 = 0;
  std::size_t single_e2 = 0;
  std::size_t paired = 0;  // 2 x emitted triplets

  SingleCounts& operator+=(const SingleCounts& o) {
    single_e1 += o.single_e1;
    single_e2 += o.single_e2;
    paired += o.paired;
    return *this;
  }
  friend bool operator==(const SingleCounts&, const SingleCounts&) = default;
};

SingleCounts count_singles(std::span<const Tag> tags);

// Index-level helpers for model output.
std::vector<Tag> to_tags(std::span<const TagIndex> indices, const TagVocabulary& vocab);

}  // namespace jointtag
