#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include "kb_store.hpp"
#include "nn/embedding.hpp"
#include "nn/layers.hpp"
#include "nn/rnn.hpp"
#include "text.hpp"
#include "train_config.hpp"

namespace sqa {

enum class Tag : char { Entity = 'e', Context = 'c' };

using TagSequence = std::vector<Tag>;

struct Fragment {
  std::size_t start = 0;  // [start, end)
  std::size_t end = 0;
  TokenSeq tokens;
};

std::string tags_to_string(const TagSequence& tags);  // "c c e e"
TagSequence tags_from_string(const std::string& s);

// Distant supervision: mark the longest gold alias occurring contiguously in
// the question (first occurrence wins); failing that, the longest common
// contiguous token run between any alias and the question. No token overlap
// at all means the question is skipped.
std::optional<TagSequence> generate_tag_labels(const TokenSeq& question,
                                               const EntityRecord& gold_subject);

// Maximal runs of consecutive Entity tags, in order.
std::vector<Fragment> extract_fragments(const TagSequence& tags, const TokenSeq& question);

// Answers per-token e/c predictions; implemented by TaggerModel and by test
// stubs.
struct TaggerIface {
  virtual ~TaggerIface() = default;
  virtual TagSequence tag(const TokenSeq& question) const = 0;
};

// Bi-LSTM token labeler with a per-token softmax head.
class TaggerModel : public TaggerIface {
 public:
  using Dataset = std::vector<std::pair<TokenSeq, TagSequence>>;

  // Per-token cross-entropy with Adam; deterministic given cfg.seed. When
  // `epoch_losses` is non-null it receives the mean training loss per epoch.
  static TaggerModel train(const Dataset& dataset, const TrainConfig& cfg,
                           nn::EmbeddingTable embeddings,
                           std::vector<double>* epoch_losses = nullptr);

  TagSequence tag(const TokenSeq& question) const override;

  // Mean per-token cross-entropy over the dataset with the current weights.
  double loss(const Dataset& dataset) const;

  void save(std::ostream& out) const;
  static TaggerModel load(std::istream& in);

  const nn::EmbeddingTable& embeddings() const { return emb_; }
  int hidden() const { return fwd_.hidden; }

 private:
  TaggerModel(nn::EmbeddingTable emb, int hidden, std::uint64_t seed);
  TaggerModel(nn::EmbeddingTable emb, nn::LstmParams fwd, nn::LstmParams bwd,
              nn::DenseParams head);

  std::vector<nn::Mat*> params();

  nn::EmbeddingTable emb_;
  nn::LstmParams fwd_, bwd_;
  nn::DenseParams head_;  // 2 x 2H softmax
};

}  // namespace sqa
