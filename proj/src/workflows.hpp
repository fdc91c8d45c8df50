#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "entity_tagger.hpp"
#include "kb_store.hpp"
#include "pipeline.hpp"

namespace sqa {

struct LabeledQuestion {
  std::string text;
  TokenSeq tokens;
  TagSequence tags;
};

// Distant-supervision labels for every question whose gold subject overlaps
// the question text; the rest are skipped and counted.
std::vector<LabeledQuestion> label_questions(const KbStore& store,
                                             const std::vector<QuestionRow>& rows,
                                             std::uint64_t* skipped = nullptr);

TaggerModel::Dataset to_tagger_dataset(const std::vector<LabeledQuestion>& labeled);

std::set<RelationId> all_relations(const KbStore& store);
std::set<std::string> all_types(const KbStore& store);

// (tokenized question, gold relation) rows; empty-tokenizing questions are
// dropped.
std::vector<std::pair<TokenSeq, RelationId>> relation_dataset(const std::vector<QuestionRow>& rows);

// (tokenized question, gold subject's notable type); questions whose gold
// subject has no notable type are skipped and counted.
std::vector<std::pair<TokenSeq, std::string>> type_dataset(const KbStore& store,
                                                           const std::vector<QuestionRow>& rows,
                                                           std::uint64_t* skipped = nullptr);

}  // namespace sqa
