#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "kb_store.hpp"
#include "text.hpp"

namespace sqa {

struct ScoredCandidate {
  EntityId entity;
  double score = 0.0;
  TokenSeq matched_gram;
  std::string matched_alias;
};

// All contiguous 1/2/3-grams of the fragment, then any gram whose token set
// is strictly contained in another gram's token set is dropped; among grams
// with identical token sets the first in (longest, earliest-start) order is
// kept. No surviving gram's token set is a subset of another's. Throws on an
// empty fragment.
std::vector<TokenSeq> extract_ngrams(const TokenSeq& fragment);

// score = N / (L * C): gram length over alias token length times the number
// of entities retrieved for the gram. Throws on a zero denominator.
double score_candidate(std::size_t gram_len, std::size_t alias_len, std::size_t retrieved);

// Inverted n-gram -> entity index over the store's aliases. Build is
// single-writer; a built index is read-only and shareable.
class NgramIndex {
 public:
  void build(const KbStore& store);

  // Entities owning an alias whose token sequence equals the fragment.
  std::set<EntityId> exact_alias_match(const TokenSeq& fragment) const;

  // The candidate set E: exact matches at score 1.0 when any exist, otherwise
  // every entity tying the global maximum n-gram score.
  std::vector<ScoredCandidate> retrieve_candidates(const TokenSeq& fragment) const;

  // Full ranked list: exact matches first, then all remaining scored entities
  // ordered by score (descending) then entity id. Used for recall@K tails.
  std::vector<ScoredCandidate> retrieve_all(const TokenSeq& fragment) const;

  std::size_t gram_count() const { return grams_.size(); }
  std::set<EntityId> entities_for_gram(const std::string& gram_key) const;

  // Snapshot: `NGRAMIDX v1` header then sorted `gram<TAB>entity_id` lines.
  void save(std::ostream& out) const;
  // Reads the gram map back and reconstitutes alias metadata from the store.
  static NgramIndex load(std::istream& in, const KbStore& store);

  bool operator==(const NgramIndex& other) const;

 private:
  struct Hit {
    std::size_t alias_len = 0;  // token length of the shortest matching alias
    std::string alias;
  };

  void index_alias(const EntityId& e, const std::string& alias);
  std::vector<ScoredCandidate> best_per_entity(const TokenSeq& fragment) const;

  std::map<std::string, std::map<EntityId, Hit>> grams_;
  std::map<std::string, std::set<EntityId>> exact_;  // tokenized alias key -> owners
};

}  // namespace sqa
