#pragma once

// Deterministic stand-ins for the neural components so pipeline behavior can
// be pinned down exactly.

#include <map>
#include <string>

#include "entity_tagger.hpp"
#include "relation_matcher.hpp"

namespace stubs {

using namespace sqa;

// Marks every occurrence of every store alias as entity tokens.
struct DictionaryTagger : TaggerIface {
  const KbStore& store;
  explicit DictionaryTagger(const KbStore& s) : store(s) {}

  TagSequence tag(const TokenSeq& q) const override {
    TagSequence tags(q.size(), Tag::Context);
    for (const auto& [id, rec] : store.records()) {
      for (const auto& alias : rec.aliases) {
        TokenSeq toks = tokenize(alias);
        if (toks.empty() || toks.size() > q.size()) continue;
        for (std::size_t s = 0; s + toks.size() <= q.size(); ++s) {
          bool match = true;
          for (std::size_t i = 0; i < toks.size(); ++i)
            if (q[s + i] != toks[i]) {
              match = false;
              break;
            }
          if (match)
            for (std::size_t i = 0; i < toks.size(); ++i) tags[s + i] = Tag::Entity;
        }
      }
    }
    return tags;
  }
};

// Scores 1 exactly when the target matches the configured answer for the
// question, 0 otherwise.
struct OracleMatcher : Matcher {
  std::map<std::string, std::string> gold;  // joined question -> joined target

  void teach(const std::string& question_joined, const TokenSeq& target) {
    gold[question_joined] = join_tokens(target);
  }

  double score(const TokenSeq& q, const TokenSeq& t) const override {
    auto it = gold.find(join_tokens(q));
    return (it != gold.end() && it->second == join_tokens(t)) ? 1.0 : 0.0;
  }
};

}  // namespace stubs
