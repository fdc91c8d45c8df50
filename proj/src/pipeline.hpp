#pragma once

#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "context_ranker.hpp"
#include "entity_tagger.hpp"
#include "kb_store.hpp"
#include "ngram_index.hpp"
#include "relation_matcher.hpp"

namespace sqa {

enum class PipelineMode { FullCandidates, Top1None, Top1Type, Top1OutDegree };

PipelineMode pipeline_mode_from_string(const std::string& s);
std::string to_string(PipelineMode mode);
RankingMethod ranking_method_from_string(const std::string& s);
std::string to_string(RankingMethod method);

struct Answer {
  bool unanswered = true;
  EntityId subject;
  RelationId relation;
  std::set<EntityId> objects;
};

struct QuestionRow {
  EntityId subject;
  RelationId relation;
  EntityId object;
  std::string text;
};

// `subject<TAB>relation<TAB>object<TAB>question_text` rows; malformed rows
// are skipped and counted.
std::vector<QuestionRow> parse_questions(std::istream& in, std::uint64_t* skipped = nullptr);

struct EvalReport {
  std::uint64_t questions = 0;
  std::uint64_t skipped_rows = 0;
  double accuracy = 0.0;
  double same_name_error = 0.0;
  double recall_at[4] = {0, 0, 0, 0};  // K = 1, 5, 10, 400
  double entity_unique = 0.0;
  double entity_not_unique = 0.0;
  double entity_total = 0.0;
  double relation_accuracy_gold_entity = 0.0;

  static constexpr int kRecallCutoffs[4] = {1, 5, 10, 400};

  std::string machine_string() const;  // sorted `key: value` lines
  std::string human_string() const;    // tables
};

class Pipeline {
 public:
  Pipeline(const KbStore& store, const NgramIndex& index, const TaggerIface& tagger,
           const Matcher& relation_matcher, const Matcher* type_matcher, PipelineMode mode,
           RankingMethod disambiguation);

  // Union of retrieve_candidates over the tagged fragments (the set E).
  std::vector<ScoredCandidate> candidate_set(const std::string& question) const;

  // Extended candidate list ordered by the active mode's ranking, capped at
  // 400 entries; feeds recall@K and the top1_* modes.
  std::vector<ScoredCandidate> candidate_list(const std::string& question) const;

  Answer answer(const std::string& question) const;

  EvalReport evaluate(const std::vector<QuestionRow>& rows) const;
  EvalReport evaluate(std::istream& questions_tsv) const;

 private:
  double ranking_key(const ScoredCandidate& c, const TokenSeq& question) const;
  void order_by_method(std::vector<ScoredCandidate>& list, const TokenSeq& question,
                       RankingMethod method) const;
  RankingMethod active_ranking() const;

  const KbStore& store_;
  const NgramIndex& index_;
  const TaggerIface& tagger_;
  const Matcher& relation_matcher_;
  const Matcher* type_matcher_;
  PipelineMode mode_;
  RankingMethod disambiguation_;
};

}  // namespace sqa
