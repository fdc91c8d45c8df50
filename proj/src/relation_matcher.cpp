#include "relation_matcher.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "nn/adam.hpp"
#include "nn/checkpoint.hpp"

namespace sqa {

using nn::Mat;
using nn::Vec;

std::string domain_of(const RelationId& r) {
  if (r.size() < 2 || r[0] != '/') throw std::runtime_error("malformed relation id: " + r);
  std::size_t end = r.find('/', 1);
  std::string domain = end == std::string::npos ? r.substr(1) : r.substr(1, end - 1);
  if (domain.empty()) throw std::runtime_error("malformed relation id: " + r);
  return domain;
}

TokenSeq relation_tokens(const RelationId& r) {
  TokenSeq out;
  std::string cur;
  for (char c : r) {
    if (c == '/' || c == '_' || c == '.') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<MatchPair> generate_training_pairs(
    const std::vector<std::pair<TokenSeq, RelationId>>& dataset,
    const std::set<RelationId>& all_relations, int positive_replication) {
  std::map<std::string, std::set<RelationId>> by_domain;
  for (const auto& r : all_relations) by_domain[domain_of(r)].insert(r);
  std::vector<MatchPair> out;
  for (const auto& [question, gold] : dataset) {
    if (!all_relations.count(gold))
      throw std::runtime_error("generate_training_pairs: gold relation '" + gold +
                               "' not in relation set");
    const auto& domain = by_domain.at(domain_of(gold));
    for (const auto& r : domain) {
      int copies = (r == gold) ? positive_replication : 1;
      for (int c = 0; c < copies; ++c)
        out.push_back(MatchPair{question, r, relation_tokens(r), r == gold ? 1 : 0});
    }
  }
  return out;
}

MatchModel::MatchModel(nn::EmbeddingTable emb, int hidden, std::uint64_t seed)
    : emb_(std::move(emb)) {
  nn::Rng rng(seed);
  qf_.init(emb_.dim(), hidden, rng);
  qb_.init(emb_.dim(), hidden, rng);
  rf_.init(emb_.dim(), hidden, rng);
  rb_.init(emb_.dim(), hidden, rng);
  head_.init(4 * hidden, 1, nn::Activation::Sigmoid, rng);
}

MatchModel::MatchModel(nn::EmbeddingTable emb, nn::GruParams qf, nn::GruParams qb,
                       nn::GruParams rf, nn::GruParams rb, nn::DenseParams head)
    : emb_(std::move(emb)),
      qf_(std::move(qf)),
      qb_(std::move(qb)),
      rf_(std::move(rf)),
      rb_(std::move(rb)),
      head_(std::move(head)) {}

std::vector<Mat*> MatchModel::params() {
  std::vector<Mat*> out = emb_.params();
  for (auto* cell : {&qf_, &qb_, &rf_, &rb_})
    for (Mat* p : cell->params()) out.push_back(p);
  for (Mat* p : head_.params()) out.push_back(p);
  return out;
}

int MatchModel::build_logit(nn::Tape& tape, const MatchPair& pair, const Mat* dropout_mask) {
  auto qf = nn::GruNodes::bind(tape, qf_);
  auto qb = nn::GruNodes::bind(tape, qb_);
  auto rf = nn::GruNodes::bind(tape, rf_);
  auto rb = nn::GruNodes::bind(tape, rb_);
  int head_w = tape.param(&head_.W);
  int head_b = tape.param(&head_.b);
  std::vector<int> q_in, r_in;
  for (const auto& tok : pair.question) q_in.push_back(emb_.lookup_t(tape, tok));
  for (const auto& tok : pair.target) r_in.push_back(emb_.lookup_t(tape, tok));
  auto q_enc = nn::bi_encode_gru_t(tape, qf, qb, q_in);
  auto r_enc = nn::bi_encode_gru_t(tape, rf, rb, r_in);
  int concat = tape.vconcat(q_enc.final, r_enc.final);
  if (dropout_mask) concat = tape.cmul(concat, tape.input(*dropout_mask));
  return tape.add(tape.matmul(head_w, concat), head_b);
}

double MatchModel::pair_loss_with_grads(const MatchPair& pair, std::vector<Mat>& grads_out) {
  nn::Tape tape;
  int logit = build_logit(tape, pair, nullptr);
  int loss = tape.bce_logit(logit, static_cast<double>(pair.tag));
  tape.backward(loss);
  auto ps = params();
  grads_out.clear();
  for (Mat* p : ps)
    grads_out.push_back(tape.has_param(p) ? tape.grad(p) : Mat::Zero(p->rows(), p->cols()));
  return tape.val(loss)(0, 0);
}

MatchModel MatchModel::train(const std::vector<MatchPair>& pairs, const TrainConfig& cfg,
                             nn::EmbeddingTable embeddings, std::vector<double>* epoch_losses) {
  if (pairs.empty()) throw std::runtime_error("train_matcher: empty training set");
  bool has_pos = false, has_neg = false;
  for (const auto& p : pairs) {
    if (p.question.empty() || p.target.empty())
      throw std::runtime_error("train_matcher: empty question or target");
    (p.tag ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw std::runtime_error("degenerate training set");
  for (const auto& p : pairs) {
    for (const auto& tok : p.question) embeddings.intern(tok);
    for (const auto& tok : p.target) embeddings.intern(tok);
  }

  MatchModel model(std::move(embeddings), cfg.hidden, cfg.seed);
  std::vector<Mat*> params = model.params();
  nn::Adam adam(cfg.learning_rate);
  nn::Rng rng(cfg.seed + 1);

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    double epoch_loss = 0.0;
    std::size_t batch_start = 0;
    while (batch_start < order.size()) {
      std::size_t batch_end =
          std::min(order.size(), batch_start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<Mat> grads;
      for (Mat* p : params) grads.push_back(Mat::Zero(p->rows(), p->cols()));
      for (std::size_t bi = batch_start; bi < batch_end; ++bi) {
        const auto& pair = pairs[order[bi]];
        nn::Tape tape;
        Mat mask;
        const Mat* mask_ptr = nullptr;
        if (cfg.dropout > 0.0) {
          mask = nn::dropout_mask(4 * model.qf_.hidden, cfg.dropout, rng);
          mask_ptr = &mask;
        }
        int logit = model.build_logit(tape, pair, mask_ptr);
        int loss = tape.bce_logit(logit, static_cast<double>(pair.tag));
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
    if (epoch_losses) epoch_losses->push_back(epoch_loss / static_cast<double>(pairs.size()));
  }
  return model;
}

double MatchModel::score(const TokenSeq& question, const TokenSeq& target) const {
  if (question.empty()) throw std::runtime_error("score_pair: empty question");
  if (target.empty()) throw std::runtime_error("score_pair: empty target");
  std::vector<Vec> q_in, r_in;
  for (const auto& tok : question) q_in.push_back(emb_.lookup(tok));
  for (const auto& tok : target) r_in.push_back(emb_.lookup(tok));
  Vec q_enc = nn::bi_encode_gru(qf_, qb_, q_in).final;
  Vec r_enc = nn::bi_encode_gru(rf_, rb_, r_in).final;
  Vec concat(q_enc.size() + r_enc.size());
  concat << q_enc, r_enc;
  return nn::dense_forward(head_, concat)(0);
}

double MatchModel::loss(const std::vector<MatchPair>& pairs) const {
  double total = 0.0;
  for (const auto& p : pairs) {
    double s = score(p.question, p.target);
    double t = static_cast<double>(p.tag);
    s = std::min(std::max(s, 1e-12), 1.0 - 1e-12);
    total += -(t * std::log(s) + (1.0 - t) * std::log(1.0 - s));
  }
  return pairs.empty() ? 0.0 : total / static_cast<double>(pairs.size());
}

void MatchModel::save(std::ostream& out) const {
  nn::CheckpointWriter w(out);
  w.meta("kind", "matcher");
  w.meta("dim", std::to_string(emb_.dim()));
  w.meta("hidden", std::to_string(qf_.hidden));
  w.vocab(emb_.vocab());
  w.tensor("embedding", emb_.matrix);
  w.tensor("embedding_oov", emb_.oov);
  auto& self = const_cast<MatchModel&>(*this);
  for (auto& [name, m] : self.qf_.named("gru_qf")) w.tensor(name, *m);
  for (auto& [name, m] : self.qb_.named("gru_qb")) w.tensor(name, *m);
  for (auto& [name, m] : self.rf_.named("gru_rf")) w.tensor(name, *m);
  for (auto& [name, m] : self.rb_.named("gru_rb")) w.tensor(name, *m);
  w.tensor("head.W", head_.W);
  w.tensor("head.b", head_.b);
}

MatchModel MatchModel::load(std::istream& in) {
  nn::CheckpointReader r(in);
  if (r.meta("kind") != "matcher") throw std::runtime_error("checkpoint: not a matcher model");
  int dim = std::stoi(r.meta("dim"));
  int hidden = std::stoi(r.meta("hidden"));
  auto emb = nn::EmbeddingTable::from_parts(dim, r.vocab(), r.tensor("embedding"),
                                            r.tensor("embedding_oov"));
  nn::GruParams qf, qb, rf, rb;
  for (auto* cell : {&qf, &qb, &rf, &rb}) {
    cell->input_dim = dim;
    cell->hidden = hidden;
  }
  for (auto& [name, m] : qf.named("gru_qf")) *m = r.tensor(name);
  for (auto& [name, m] : qb.named("gru_qb")) *m = r.tensor(name);
  for (auto& [name, m] : rf.named("gru_rf")) *m = r.tensor(name);
  for (auto& [name, m] : rb.named("gru_rb")) *m = r.tensor(name);
  nn::DenseParams head;
  head.W = r.tensor("head.W");
  head.b = r.tensor("head.b");
  head.activation = nn::Activation::Sigmoid;
  return MatchModel(std::move(emb), std::move(qf), std::move(qb), std::move(rf), std::move(rb),
                    std::move(head));
}

std::vector<std::pair<RelationId, double>> rank_relations(const Matcher& model,
                                                          const TokenSeq& question,
                                                          const std::set<RelationId>& candidates) {
  if (candidates.empty()) throw std::runtime_error("rank_relations: empty candidate set");
  std::vector<std::pair<RelationId, double>> out;
  for (const auto& r : candidates) out.emplace_back(r, model.score(question, relation_tokens(r)));
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

}  // namespace sqa
