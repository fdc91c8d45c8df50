#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kb_store.hpp"
#include "relation_matcher.hpp"
#include "train_config.hpp"

namespace sqa {

enum class RankingMethod { None, OutDegree, NotableType };

struct RankedCandidates {
  RankingMethod method = RankingMethod::None;
  std::vector<std::pair<EntityId, double>> entries;  // keys non-increasing
};

// Descending out-degree, ties by lexicographic entity id.
RankedCandidates rank_by_out_degree(const KbStore& store, const std::set<EntityId>& candidates);

// Descending question/notable-type matching score; entities without a
// notable type score 0; ties lexicographic.
RankedCandidates rank_by_type_score(const Matcher& model, const TokenSeq& question,
                                    const KbStore& store, const std::set<EntityId>& candidates);

// Same architecture and regime as the relation matcher; type strings are
// whitespace-tokenized and negatives are seeded uniform draws from
// `all_types` (cfg.negatives_per_positive each), positives replicated to
// cfg.positive_replication occurrences.
MatchModel train_type_matcher(const std::vector<std::pair<TokenSeq, std::string>>& dataset,
                              const std::set<std::string>& all_types, const TrainConfig& cfg,
                              nn::EmbeddingTable embeddings,
                              std::vector<double>* epoch_losses = nullptr);

// Pair construction for the type matcher, exposed for audit dumps and tests.
std::vector<MatchPair> generate_type_pairs(
    const std::vector<std::pair<TokenSeq, std::string>>& dataset,
    const std::set<std::string>& all_types, int positive_replication, int negatives_per_positive,
    std::uint64_t seed);

}  // namespace sqa
