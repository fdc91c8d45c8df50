#include "workflows.hpp"

namespace sqa {

std::vector<LabeledQuestion> label_questions(const KbStore& store,
                                             const std::vector<QuestionRow>& rows,
                                             std::uint64_t* skipped) {
  std::vector<LabeledQuestion> out;
  std::uint64_t dropped = 0;
  for (const auto& row : rows) {
    TokenSeq tokens = tokenize(row.text);
    const EntityRecord* gold = store.record(row.subject);
    if (tokens.empty() || !gold) {
      ++dropped;
      continue;
    }
    auto tags = generate_tag_labels(tokens, *gold);
    if (!tags) {
      ++dropped;
      continue;
    }
    out.push_back(LabeledQuestion{row.text, std::move(tokens), std::move(*tags)});
  }
  if (skipped) *skipped = dropped;
  return out;
}

TaggerModel::Dataset to_tagger_dataset(const std::vector<LabeledQuestion>& labeled) {
  TaggerModel::Dataset out;
  out.reserve(labeled.size());
  for (const auto& l : labeled) out.emplace_back(l.tokens, l.tags);
  return out;
}

std::set<RelationId> all_relations(const KbStore& store) {
  std::set<RelationId> out;
  for (const auto& [s, rels] : store.triples_by_subject())
    for (const auto& [r, objs] : rels) out.insert(r);
  return out;
}

std::set<std::string> all_types(const KbStore& store) {
  std::set<std::string> out;
  for (const auto& [id, rec] : store.records())
    if (rec.notable_type) out.insert(*rec.notable_type);
  return out;
}

std::vector<std::pair<TokenSeq, RelationId>> relation_dataset(
    const std::vector<QuestionRow>& rows) {
  std::vector<std::pair<TokenSeq, RelationId>> out;
  for (const auto& row : rows) {
    TokenSeq tokens = tokenize(row.text);
    if (!tokens.empty()) out.emplace_back(std::move(tokens), row.relation);
  }
  return out;
}

std::vector<std::pair<TokenSeq, std::string>> type_dataset(const KbStore& store,
                                                           const std::vector<QuestionRow>& rows,
                                                           std::uint64_t* skipped) {
  std::vector<std::pair<TokenSeq, std::string>> out;
  std::uint64_t dropped = 0;
  for (const auto& row : rows) {
    TokenSeq tokens = tokenize(row.text);
    auto type = store.notable_type(row.subject);
    if (tokens.empty() || !type) {
      ++dropped;
      continue;
    }
    out.emplace_back(std::move(tokens), *type);
  }
  if (skipped) *skipped = dropped;
  return out;
}

}  // namespace sqa
