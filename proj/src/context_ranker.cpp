#include "context_ranker.hpp"

#include <algorithm>
#include <stdexcept>

#include "nn/rng.hpp"

namespace sqa {

namespace {

void sort_descending(std::vector<std::pair<EntityId, double>>& entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
}

}  // namespace

RankedCandidates rank_by_out_degree(const KbStore& store, const std::set<EntityId>& candidates) {
  if (candidates.empty()) throw std::runtime_error("rank_by_out_degree: empty candidate set");
  RankedCandidates out;
  out.method = RankingMethod::OutDegree;
  for (const auto& e : candidates)
    out.entries.emplace_back(e, static_cast<double>(store.out_degree(e)));
  sort_descending(out.entries);
  return out;
}

RankedCandidates rank_by_type_score(const Matcher& model, const TokenSeq& question,
                                    const KbStore& store, const std::set<EntityId>& candidates) {
  if (candidates.empty()) throw std::runtime_error("rank_by_type_score: empty candidate set");
  RankedCandidates out;
  out.method = RankingMethod::NotableType;
  for (const auto& e : candidates) {
    double score = 0.0;
    if (auto type = store.notable_type(e)) {
      TokenSeq toks = tokenize(*type);
      if (!toks.empty()) score = model.score(question, toks);
    }
    out.entries.emplace_back(e, score);
  }
  sort_descending(out.entries);
  return out;
}

std::vector<MatchPair> generate_type_pairs(
    const std::vector<std::pair<TokenSeq, std::string>>& dataset,
    const std::set<std::string>& all_types, int positive_replication, int negatives_per_positive,
    std::uint64_t seed) {
  std::vector<std::string> pool(all_types.begin(), all_types.end());
  nn::Rng rng(seed);
  std::vector<MatchPair> out;
  for (const auto& [question, gold] : dataset) {
    if (!all_types.count(gold))
      throw std::runtime_error("generate_type_pairs: gold type '" + gold + "' not in type set");
    TokenSeq gold_toks = tokenize(gold);
    for (int c = 0; c < positive_replication; ++c)
      out.push_back(MatchPair{question, gold, gold_toks, 1});
    // Uniform negatives, drawn without replacement per question.
    std::set<std::size_t> used;
    int wanted = std::min<int>(negatives_per_positive, static_cast<int>(pool.size()) - 1);
    while (static_cast<int>(used.size()) < wanted) {
      std::size_t pick = rng.index(pool.size());
      if (pool[pick] == gold || used.count(pick)) continue;
      used.insert(pick);
      out.push_back(MatchPair{question, pool[pick], tokenize(pool[pick]), 0});
    }
  }
  return out;
}

MatchModel train_type_matcher(const std::vector<std::pair<TokenSeq, std::string>>& dataset,
                              const std::set<std::string>& all_types, const TrainConfig& cfg,
                              nn::EmbeddingTable embeddings, std::vector<double>* epoch_losses) {
  if (dataset.empty()) throw std::runtime_error("train_type_matcher: empty dataset");
  auto pairs = generate_type_pairs(dataset, all_types, cfg.positive_replication,
                                   cfg.negatives_per_positive, cfg.seed + 17);
  return MatchModel::train(pairs, cfg, std::move(embeddings), epoch_losses);
}

}  // namespace sqa
