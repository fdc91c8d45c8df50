#include "entity_tagger.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nn/adam.hpp"
#include "nn/checkpoint.hpp"

namespace sqa {

using nn::Mat;
using nn::Vec;

std::string tags_to_string(const TagSequence& tags) {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out.push_back(' ');
    out.push_back(static_cast<char>(tags[i]));
  }
  return out;
}

TagSequence tags_from_string(const std::string& s) {
  TagSequence tags;
  for (char c : s) {
    if (c == 'e')
      tags.push_back(Tag::Entity);
    else if (c == 'c')
      tags.push_back(Tag::Context);
    else if (c != ' ')
      throw std::runtime_error("tags: unknown symbol");
  }
  return tags;
}

namespace {

// First start position of `needle` inside `haystack`, or npos.
std::size_t find_subseq(const TokenSeq& haystack, const TokenSeq& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return std::string::npos;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < needle.size(); ++j)
      if (haystack[i + j] != needle[j]) {
        match = false;
        break;
      }
    if (match) return i;
  }
  return std::string::npos;
}

}  // namespace

std::optional<TagSequence> generate_tag_labels(const TokenSeq& question,
                                               const EntityRecord& gold_subject) {
  if (question.empty()) return std::nullopt;
  std::size_t best_len = 0, best_pos = 0;
  // Full-alias match, longest alias first.
  for (const auto& alias : gold_subject.aliases) {
    TokenSeq toks = tokenize(alias);
    if (toks.size() <= best_len) continue;
    std::size_t pos = find_subseq(question, toks);
    if (pos != std::string::npos) {
      best_len = toks.size();
      best_pos = pos;
    }
  }
  if (best_len == 0) {
    // Longest common contiguous run between any alias and the question;
    // ties resolve to the earliest question position.
    for (const auto& alias : gold_subject.aliases) {
      TokenSeq toks = tokenize(alias);
      for (std::size_t qi = 0; qi < question.size(); ++qi) {
        for (std::size_t ai = 0; ai < toks.size(); ++ai) {
          std::size_t len = 0;
          while (qi + len < question.size() && ai + len < toks.size() &&
                 question[qi + len] == toks[ai + len])
            ++len;
          if (len > best_len || (len == best_len && len > 0 && qi < best_pos)) {
            best_len = len;
            best_pos = qi;
          }
        }
      }
    }
  }
  if (best_len == 0) return std::nullopt;
  TagSequence tags(question.size(), Tag::Context);
  for (std::size_t i = best_pos; i < best_pos + best_len; ++i) tags[i] = Tag::Entity;
  return tags;
}

std::vector<Fragment> extract_fragments(const TagSequence& tags, const TokenSeq& question) {
  if (tags.size() != question.size()) throw std::runtime_error("extract_fragments: length mismatch");
  std::vector<Fragment> out;
  std::size_t i = 0;
  while (i < tags.size()) {
    if (tags[i] != Tag::Entity) {
      ++i;
      continue;
    }
    Fragment f;
    f.start = i;
    while (i < tags.size() && tags[i] == Tag::Entity) ++i;
    f.end = i;
    f.tokens.assign(question.begin() + static_cast<std::ptrdiff_t>(f.start),
                    question.begin() + static_cast<std::ptrdiff_t>(f.end));
    out.push_back(std::move(f));
  }
  return out;
}

TaggerModel::TaggerModel(nn::EmbeddingTable emb, int hidden, std::uint64_t seed)
    : emb_(std::move(emb)) {
  nn::Rng rng(seed);
  fwd_.init(emb_.dim(), hidden, rng);
  bwd_.init(emb_.dim(), hidden, rng);
  head_.init(2 * hidden, 2, nn::Activation::Softmax, rng);
}

TaggerModel::TaggerModel(nn::EmbeddingTable emb, nn::LstmParams fwd, nn::LstmParams bwd,
                         nn::DenseParams head)
    : emb_(std::move(emb)), fwd_(std::move(fwd)), bwd_(std::move(bwd)), head_(std::move(head)) {}

std::vector<Mat*> TaggerModel::params() {
  std::vector<Mat*> out = emb_.params();
  for (Mat* p : fwd_.params()) out.push_back(p);
  for (Mat* p : bwd_.params()) out.push_back(p);
  for (Mat* p : head_.params()) out.push_back(p);
  return out;
}

TaggerModel TaggerModel::train(const Dataset& dataset, const TrainConfig& cfg,
                               nn::EmbeddingTable embeddings, std::vector<double>* epoch_losses) {
  if (dataset.empty()) throw std::runtime_error("train_tagger: empty dataset");
  for (const auto& [q, tags] : dataset)
    if (q.empty() || q.size() != tags.size())
      throw std::runtime_error("train_tagger: question/tag length mismatch");
  for (const auto& [q, tags] : dataset)
    for (const auto& tok : q) embeddings.intern(tok);

  TaggerModel model(std::move(embeddings), cfg.hidden, cfg.seed);
  std::vector<Mat*> params = model.params();
  nn::Adam adam(cfg.learning_rate);
  nn::Rng rng(cfg.seed + 1);  // shuffle + dropout stream

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    double epoch_loss = 0.0;
    std::size_t batch_start = 0;
    while (batch_start < order.size()) {
      std::size_t batch_end = std::min(order.size(), batch_start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<Mat> grads;
      for (Mat* p : params) grads.push_back(Mat::Zero(p->rows(), p->cols()));
      for (std::size_t bi = batch_start; bi < batch_end; ++bi) {
        const auto& [q, tags] = dataset[order[bi]];
        nn::Tape tape;
        auto fwd_nodes = nn::LstmNodes::bind(tape, model.fwd_);
        auto bwd_nodes = nn::LstmNodes::bind(tape, model.bwd_);
        int head_w = tape.param(&model.head_.W);
        int head_b = tape.param(&model.head_.b);
        std::vector<int> inputs;
        for (const auto& tok : q) inputs.push_back(model.emb_.lookup_t(tape, tok));
        auto enc = nn::bi_encode_lstm_t(tape, fwd_nodes, bwd_nodes, inputs);
        int loss = -1;
        for (std::size_t i = 0; i < q.size(); ++i) {
          int step = enc.steps[i];
          if (cfg.dropout > 0.0)
            step = tape.cmul(step, tape.input(nn::dropout_mask(tape.val(step).rows(),
                                                               cfg.dropout, rng)));
          int logits = tape.add(tape.matmul(head_w, step), head_b);
          int ce = tape.softmax_xent(logits, tags[i] == Tag::Entity ? 0 : 1);
          loss = loss < 0 ? ce : tape.add(loss, ce);
        }
        loss = tape.affine(loss, 1.0 / static_cast<double>(q.size()), 0.0);
        tape.backward(loss);
        epoch_loss += tape.val(loss)(0, 0);
        for (std::size_t k = 0; k < params.size(); ++k)
          if (tape.has_param(params[k])) grads[k] += tape.grad(params[k]);
      }
      double scale = 1.0 / static_cast<double>(batch_end - batch_start);
      for (Mat& g : grads) g *= scale;
      adam.step(params, grads);
      batch_start = batch_end;
    }
    if (epoch_losses) epoch_losses->push_back(epoch_loss / static_cast<double>(dataset.size()));
  }
  return model;
}

TagSequence TaggerModel::tag(const TokenSeq& question) const {
  if (question.empty()) throw std::runtime_error("tag_question: empty question");
  std::vector<Vec> inputs;
  for (const auto& tok : question) inputs.push_back(emb_.lookup(tok));
  auto enc = nn::bi_encode_lstm(fwd_, bwd_, inputs);
  TagSequence tags;
  for (const auto& step : enc.steps) {
    Vec logits = head_.W * step + head_.b;
    tags.push_back(logits(0) >= logits(1) ? Tag::Entity : Tag::Context);
  }
  return tags;
}

double TaggerModel::loss(const Dataset& dataset) const {
  double total = 0.0;
  std::size_t tokens = 0;
  for (const auto& [q, tags] : dataset) {
    std::vector<Vec> inputs;
    for (const auto& tok : q) inputs.push_back(emb_.lookup(tok));
    auto enc = nn::bi_encode_lstm(fwd_, bwd_, inputs);
    for (std::size_t i = 0; i < q.size(); ++i) {
      Vec z = head_.W * enc.steps[i] + head_.b;
      double zmax = z.maxCoeff();
      double lse = zmax + std::log((z.array() - zmax).exp().sum());
      total += lse - z(tags[i] == Tag::Entity ? 0 : 1);
      ++tokens;
    }
  }
  return tokens ? total / static_cast<double>(tokens) : 0.0;
}

void TaggerModel::save(std::ostream& out) const {
  nn::CheckpointWriter w(out);
  w.meta("kind", "tagger");
  w.meta("dim", std::to_string(emb_.dim()));
  w.meta("hidden", std::to_string(fwd_.hidden));
  w.vocab(emb_.vocab());
  w.tensor("embedding", emb_.matrix);
  w.tensor("embedding_oov", emb_.oov);
  auto fwd = const_cast<nn::LstmParams&>(fwd_).named("lstm_fwd");
  auto bwd = const_cast<nn::LstmParams&>(bwd_).named("lstm_bwd");
  for (auto& [name, m] : fwd) w.tensor(name, *m);
  for (auto& [name, m] : bwd) w.tensor(name, *m);
  w.tensor("head.W", head_.W);
  w.tensor("head.b", head_.b);
}

TaggerModel TaggerModel::load(std::istream& in) {
  nn::CheckpointReader r(in);
  if (r.meta("kind") != "tagger") throw std::runtime_error("checkpoint: not a tagger model");
  int dim = std::stoi(r.meta("dim"));
  int hidden = std::stoi(r.meta("hidden"));
  auto emb = nn::EmbeddingTable::from_parts(dim, r.vocab(), r.tensor("embedding"),
                                            r.tensor("embedding_oov"));
  nn::LstmParams fwd, bwd;
  fwd.input_dim = bwd.input_dim = dim;
  fwd.hidden = bwd.hidden = hidden;
  for (auto& [name, m] : fwd.named("lstm_fwd")) *m = r.tensor(name);
  for (auto& [name, m] : bwd.named("lstm_bwd")) *m = r.tensor(name);
  nn::DenseParams head;
  head.W = r.tensor("head.W");
  head.b = r.tensor("head.b");
  head.activation = nn::Activation::Softmax;
  return TaggerModel(std::move(emb), std::move(fwd), std::move(bwd), std::move(head));
}

}  // namespace sqa
