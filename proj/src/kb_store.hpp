#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>

namespace sqa {

using EntityId = std::string;
using RelationId = std::string;

struct Triple {
  EntityId subject;
  RelationId relation;
  EntityId object;
};

struct EntityRecord {
  EntityId id;
  std::set<std::string> aliases;  // normalized form
  std::optional<std::string> notable_type;
  std::uint64_t out_degree = 0;
};

// Triple store with per-subject indexing plus alias / notable-type / out-degree
// bookkeeping. Build is single-writer; after that every query is read-only and
// safe to share across threads.
class KbStore {
 public:
  // Each non-empty, non-comment line is `subject<TAB>relation<TAB>object`.
  // Duplicate triples collapse. Throws std::runtime_error with the offending
  // line number on a malformed line.
  void ingest_triples(std::istream& in);

  // Lines of `entity_id<TAB>alias_text`; alias stored normalized.
  void ingest_aliases(std::istream& in);

  // Lines of `entity_id<TAB>type_text`; a later line for the same entity
  // overwrites the earlier one.
  void ingest_notable_types(std::istream& in);

  std::uint64_t out_degree(const EntityId& e) const;
  std::set<RelationId> relations_of(const EntityId& e) const;
  std::set<EntityId> objects_of(const EntityId& e, const RelationId& r) const;

  // nullptr for unknown entities.
  const EntityRecord* record(const EntityId& e) const;
  std::optional<std::string> notable_type(const EntityId& e) const;

  std::uint64_t triple_count() const { return triple_count_; }
  std::uint64_t entity_count() const { return records_.size(); }
  std::uint64_t distinct_type_count() const;

  const std::map<EntityId, EntityRecord>& records() const { return records_; }
  const std::map<EntityId, std::map<RelationId, std::set<EntityId>>>& triples_by_subject() const {
    return by_subject_;
  }

  // Text snapshot: header line `SQAKB v1`, then `T`, `A`, `Y` records.
  void save(std::ostream& out) const;
  static KbStore load(std::istream& in);

  bool operator==(const KbStore& other) const;

 private:
  EntityRecord& touch(const EntityId& e);

  std::map<EntityId, std::map<RelationId, std::set<EntityId>>> by_subject_;
  std::map<EntityId, EntityRecord> records_;
  std::uint64_t triple_count_ = 0;
};

// Filters `common.topic.notable_types`-style statements out of an N-Triples
// stream and emits `entity_id<TAB>type_text` lines. Freebase `ns/m.XXXX` IRIs
// are rewritten to `/m/XXXX`. Structurally invalid lines are skipped and
// counted, never fatal. Returns the number of emitted lines; `skipped` (when
// non-null) receives the invalid-line count.
std::uint64_t extract_notable_types_ntriples(std::istream& in, std::ostream& out,
                                             const std::string& predicate_suffix,
                                             std::uint64_t* skipped = nullptr);

inline constexpr const char* kDefaultNotableTypePredicateSuffix = "common.topic.notable_types";

// `http://rdf.freebase.com/ns/m.01hmylb` -> `/m/01hmylb`; other ns paths get
// their dots replaced by slashes; non-Freebase IRIs pass through unchanged.
std::string rewrite_freebase_iri(const std::string& iri);

}  // namespace sqa
