#pragma once

#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kb_store.hpp"
#include "nn/embedding.hpp"
#include "nn/layers.hpp"
#include "nn/rnn.hpp"
#include "text.hpp"
#include "train_config.hpp"

namespace sqa {

// First path segment of a relation id ("/music/release/label" -> "music").
std::string domain_of(const RelationId& r);

// Split on '/', '_' and '.' into lowercase word tokens.
TokenSeq relation_tokens(const RelationId& r);

struct MatchPair {
  TokenSeq question;
  std::string target_raw;  // relation id or notable-type string
  TokenSeq target;
  int tag = 0;
};

// Per question: one pair against every relation in the gold relation's
// domain; the gold pair appears `positive_replication` times in total.
std::vector<MatchPair> generate_training_pairs(
    const std::vector<std::pair<TokenSeq, RelationId>>& dataset,
    const std::set<RelationId>& all_relations, int positive_replication = 4);

// Pairwise question/target scorer; implemented by MatchModel and test stubs.
struct Matcher {
  virtual ~Matcher() = default;
  virtual double score(const TokenSeq& question, const TokenSeq& target) const = 0;
};

// Fig-style binary matcher: two Bi-GRU encoders (question and target text),
// a sigmoid dense head over the concatenated final encodings.
class MatchModel : public Matcher {
 public:
  // Binary cross-entropy with Adam; throws "degenerate training set" when
  // the pairs carry only one tag value.
  static MatchModel train(const std::vector<MatchPair>& pairs, const TrainConfig& cfg,
                          nn::EmbeddingTable embeddings,
                          std::vector<double>* epoch_losses = nullptr);

  double score(const TokenSeq& question, const TokenSeq& target) const override;

  // Mean BCE over the pairs with the current weights.
  double loss(const std::vector<MatchPair>& pairs) const;

  void save(std::ostream& out) const;
  static MatchModel load(std::istream& in);

  const nn::EmbeddingTable& embeddings() const { return emb_; }
  int hidden() const { return qf_.hidden; }

  // Exposed for gradient-check tests.
  std::vector<nn::Mat*> params();
  double pair_loss_with_grads(const MatchPair& pair, std::vector<nn::Mat>& grads_out);

  MatchModel(nn::EmbeddingTable emb, int hidden, std::uint64_t seed);

 private:
  MatchModel(nn::EmbeddingTable emb, nn::GruParams qf, nn::GruParams qb, nn::GruParams rf,
             nn::GruParams rb, nn::DenseParams head);

  int build_logit(nn::Tape& tape, const MatchPair& pair, const nn::Mat* dropout_mask);

  nn::EmbeddingTable emb_;
  nn::GruParams qf_, qb_;  // question encoder
  nn::GruParams rf_, rb_;  // target encoder
  nn::DenseParams head_;   // 1 x 4H sigmoid
};

// Descending score, ties by lexicographic relation id.
std::vector<std::pair<RelationId, double>> rank_relations(const Matcher& model,
                                                          const TokenSeq& question,
                                                          const std::set<RelationId>& candidates);

}  // namespace sqa
