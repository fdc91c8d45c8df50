// extern-C surface over the C++ core. Handles own their C++ objects; the
// wrappers translate exceptions into status codes plus a thread-local
// diagnostic string.
#include "sqa/sqa.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

#include "context_ranker.hpp"
#include "entity_tagger.hpp"
#include "kb_store.hpp"
#include "ngram_index.hpp"
#include "pipeline.hpp"
#include "relation_matcher.hpp"
#include "workflows.hpp"

namespace {

thread_local std::string g_last_error;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const char* path) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string("cannot open for reading: ") + (path ? path : "(null)"));
  return in;
}

std::ofstream open_out(const char* path) {
  std::ofstream out(path);
  if (!out) throw IoError(std::string("cannot open for writing: ") + (path ? path : "(null)"));
  return out;
}

// "line <number>" as a standalone word, so e.g. "pipeline" never matches.
bool mentions_line_number(const std::string& msg) {
  for (std::size_t pos = msg.find("line "); pos != std::string::npos;
       pos = msg.find("line ", pos + 1)) {
    bool word_start = pos == 0 || !std::isalpha(static_cast<unsigned char>(msg[pos - 1]));
    if (word_start && pos + 5 < msg.size() &&
        std::isdigit(static_cast<unsigned char>(msg[pos + 5])))
      return true;
  }
  return false;
}

bool looks_like_parse_error(const std::string& msg) {
  return mentions_line_number(msg) || msg.find("header") != std::string::npos ||
         msg.find("checkpoint") != std::string::npos ||
         msg.find("snapshot") != std::string::npos;
}

template <typename Fn>
sqa_status wrap(Fn&& fn) {
  try {
    fn();
    return SQA_OK;
  } catch (const IoError& e) {
    g_last_error = e.what();
    return SQA_ERR_IO;
  } catch (const std::runtime_error& e) {
    g_last_error = e.what();
    return looks_like_parse_error(e.what()) ? SQA_ERR_PARSE : SQA_ERR_INVALID;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SQA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SQA_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw std::runtime_error(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sqa::TrainConfig to_core_config(const sqa_train_config* cfg) {
  sqa::TrainConfig out;
  if (!cfg) return out;
  out.seed = cfg->seed;
  out.embedding_dim = cfg->embedding_dim;
  out.hidden = cfg->hidden_size;
  out.epochs = cfg->epochs;
  out.batch_size = cfg->batch_size;
  out.positive_replication = cfg->positive_replication;
  out.negatives_per_positive = cfg->negatives_per_positive;
  out.learning_rate = cfg->learning_rate;
  out.dropout = cfg->dropout;
  require(out.embedding_dim > 0 && out.hidden > 0 && out.epochs > 0 && out.batch_size > 0 &&
              out.positive_replication > 0 && out.learning_rate > 0,
          "train config: numeric fields must be positive");
  return out;
}

sqa::nn::EmbeddingTable make_embeddings(const sqa_train_config* cfg, const sqa::TrainConfig& core) {
  if (cfg && cfg->embeddings_path) {
    auto in = open_in(cfg->embeddings_path);
    return sqa::nn::EmbeddingTable::load(in, core.embedding_dim, core.seed + 7);
  }
  return sqa::nn::EmbeddingTable(core.embedding_dim, core.seed + 7);
}

}  // namespace

struct sqa_kb {
  sqa::KbStore store;
};

struct sqa_index {
  sqa::NgramIndex index;
};

struct sqa_model {
  std::variant<sqa::TaggerModel, sqa::MatchModel> model;

  const sqa::TaggerModel& tagger() const {
    if (!std::holds_alternative<sqa::TaggerModel>(model))
      throw std::runtime_error("model handle is not a tagger");
    return std::get<sqa::TaggerModel>(model);
  }
  const sqa::MatchModel& matcher() const {
    if (!std::holds_alternative<sqa::MatchModel>(model))
      throw std::runtime_error("model handle is not a matcher");
    return std::get<sqa::MatchModel>(model);
  }
};

extern "C" {

void sqa_train_config_defaults(sqa_train_config* cfg) {
  if (!cfg) return;
  cfg->seed = 42;
  cfg->embedding_dim = 300;
  cfg->hidden_size = 100;
  cfg->epochs = 30;
  cfg->batch_size = 64;
  cfg->positive_replication = 4;
  cfg->negatives_per_positive = 10;
  cfg->learning_rate = 0.001;
  cfg->dropout = 0.1;
  cfg->embeddings_path = nullptr;
}

const char* sqa_last_error(void) { return g_last_error.c_str(); }

sqa_status sqa_kb_create(sqa_kb** out) {
  return wrap([&] {
    require(out != nullptr, "null output handle");
    *out = new sqa_kb();
  });
}

sqa_status sqa_kb_load_triples(sqa_kb* kb, const char* path) {
  return wrap([&] {
    require(kb != nullptr, "null kb handle");
    auto in = open_in(path);
    kb->store.ingest_triples(in);
  });
}

sqa_status sqa_kb_load_aliases(sqa_kb* kb, const char* path) {
  return wrap([&] {
    require(kb != nullptr, "null kb handle");
    auto in = open_in(path);
    kb->store.ingest_aliases(in);
  });
}

sqa_status sqa_kb_load_types(sqa_kb* kb, const char* path) {
  return wrap([&] {
    require(kb != nullptr, "null kb handle");
    auto in = open_in(path);
    kb->store.ingest_notable_types(in);
  });
}

sqa_status sqa_kb_save(const sqa_kb* kb, const char* path) {
  return wrap([&] {
    require(kb != nullptr, "null kb handle");
    auto out = open_out(path);
    kb->store.save(out);
  });
}

sqa_status sqa_kb_open(const char* path, sqa_kb** out) {
  return wrap([&] {
    require(out != nullptr, "null output handle");
    auto in = open_in(path);
    auto kb = std::make_unique<sqa_kb>();
    kb->store = sqa::KbStore::load(in);
    *out = kb.release();
  });
}

uint64_t sqa_kb_triple_count(const sqa_kb* kb) { return kb ? kb->store.triple_count() : 0; }
uint64_t sqa_kb_entity_count(const sqa_kb* kb) { return kb ? kb->store.entity_count() : 0; }
uint64_t sqa_kb_type_count(const sqa_kb* kb) { return kb ? kb->store.distinct_type_count() : 0; }
uint64_t sqa_kb_out_degree(const sqa_kb* kb, const char* entity_id) {
  return (kb && entity_id) ? kb->store.out_degree(entity_id) : 0;
}

void sqa_kb_free(sqa_kb* kb) { delete kb; }

sqa_status sqa_extract_types(const char* ntriples_path, const char* tsv_out_path,
                             const char* predicate_suffix, uint64_t* emitted, uint64_t* skipped) {
  return wrap([&] {
    auto in = open_in(ntriples_path);
    auto out = open_out(tsv_out_path);
    std::string suffix =
        predicate_suffix ? predicate_suffix : sqa::kDefaultNotableTypePredicateSuffix;
    std::uint64_t bad = 0;
    std::uint64_t count = sqa::extract_notable_types_ntriples(in, out, suffix, &bad);
    if (emitted) *emitted = count;
    if (skipped) *skipped = bad;
  });
}

sqa_status sqa_index_build(const sqa_kb* kb, sqa_index** out) {
  return wrap([&] {
    require(kb != nullptr && out != nullptr, "null handle");
    auto idx = std::make_unique<sqa_index>();
    idx->index.build(kb->store);
    *out = idx.release();
  });
}

sqa_status sqa_index_save(const sqa_index* idx, const char* path) {
  return wrap([&] {
    require(idx != nullptr, "null index handle");
    auto out = open_out(path);
    idx->index.save(out);
  });
}

sqa_status sqa_index_open(const char* path, const sqa_kb* kb, sqa_index** out) {
  return wrap([&] {
    require(kb != nullptr && out != nullptr, "null handle");
    auto in = open_in(path);
    auto idx = std::make_unique<sqa_index>();
    idx->index = sqa::NgramIndex::load(in, kb->store);
    *out = idx.release();
  });
}

void sqa_index_free(sqa_index* idx) { delete idx; }

sqa_status sqa_label_entities(const sqa_kb* kb, const char* questions_tsv_path,
                              const char* out_tsv_path, uint64_t* labeled, uint64_t* skipped) {
  return wrap([&] {
    require(kb != nullptr, "null kb handle");
    auto in = open_in(questions_tsv_path);
    std::uint64_t bad_rows = 0;
    auto rows = sqa::parse_questions(in, &bad_rows);
    std::uint64_t dropped = 0;
    auto labeled_rows = sqa::label_questions(kb->store, rows, &dropped);
    auto out = open_out(out_tsv_path);
    for (const auto& l : labeled_rows)
      out << sqa::join_tokens(l.tokens) << '\t' << sqa::tags_to_string(l.tags) << '\n';
    if (labeled) *labeled = labeled_rows.size();
    if (skipped) *skipped = dropped + bad_rows;
  });
}

sqa_status sqa_gen_pairs(const sqa_kb* kb, const char* questions_tsv_path,
                         const char* out_tsv_path, int32_t positive_replication,
                         uint64_t* pair_count) {
  return wrap([&] {
    require(kb != nullptr, "null kb handle");
    require(positive_replication > 0, "positive replication must be positive");
    auto in = open_in(questions_tsv_path);
    auto rows = sqa::parse_questions(in);
    auto pairs = sqa::generate_training_pairs(sqa::relation_dataset(rows),
                                              sqa::all_relations(kb->store), positive_replication);
    auto out = open_out(out_tsv_path);
    for (const auto& p : pairs)
      out << sqa::join_tokens(p.question) << '\t' << p.target_raw << '\t' << p.tag << '\n';
    if (pair_count) *pair_count = pairs.size();
  });
}

sqa_status sqa_train_tagger(const sqa_kb* kb, const char* questions_tsv_path,
                            const sqa_train_config* cfg, sqa_model** out) {
  return wrap([&] {
    require(kb != nullptr && out != nullptr, "null handle");
    auto core = to_core_config(cfg);
    auto in = open_in(questions_tsv_path);
    auto rows = sqa::parse_questions(in);
    auto dataset = sqa::to_tagger_dataset(sqa::label_questions(kb->store, rows));
    auto model = sqa::TaggerModel::train(dataset, core, make_embeddings(cfg, core));
    *out = new sqa_model{std::move(model)};
  });
}

sqa_status sqa_train_matcher(const sqa_kb* kb, const char* questions_tsv_path,
                             const sqa_train_config* cfg, sqa_model** out) {
  return wrap([&] {
    require(kb != nullptr && out != nullptr, "null handle");
    auto core = to_core_config(cfg);
    auto in = open_in(questions_tsv_path);
    auto rows = sqa::parse_questions(in);
    auto pairs = sqa::generate_training_pairs(sqa::relation_dataset(rows),
                                              sqa::all_relations(kb->store),
                                              core.positive_replication);
    auto model = sqa::MatchModel::train(pairs, core, make_embeddings(cfg, core));
    *out = new sqa_model{std::move(model)};
  });
}

sqa_status sqa_train_type_matcher(const sqa_kb* kb, const char* questions_tsv_path,
                                  const sqa_train_config* cfg, sqa_model** out) {
  return wrap([&] {
    require(kb != nullptr && out != nullptr, "null handle");
    auto core = to_core_config(cfg);
    auto in = open_in(questions_tsv_path);
    auto rows = sqa::parse_questions(in);
    auto dataset = sqa::type_dataset(kb->store, rows);
    auto model = sqa::train_type_matcher(dataset, sqa::all_types(kb->store), core,
                                         make_embeddings(cfg, core));
    *out = new sqa_model{std::move(model)};
  });
}

sqa_status sqa_model_save(const sqa_model* model, const char* path) {
  return wrap([&] {
    require(model != nullptr, "null model handle");
    auto out = open_out(path);
    std::visit([&](const auto& m) { m.save(out); }, model->model);
  });
}

sqa_status sqa_model_open(const char* path, sqa_model** out) {
  return wrap([&] {
    require(out != nullptr, "null output handle");
    std::string kind;
    {
      auto in = open_in(path);
      std::string line;
      std::getline(in, line);  // header
      while (std::getline(in, line)) {
        if (line.rfind("!meta\tkind\t", 0) == 0) {
          kind = line.substr(std::string("!meta\tkind\t").size());
          break;
        }
      }
    }
    auto in = open_in(path);
    if (kind == "tagger")
      *out = new sqa_model{sqa::TaggerModel::load(in)};
    else if (kind == "matcher")
      *out = new sqa_model{sqa::MatchModel::load(in)};
    else
      throw std::runtime_error("checkpoint: unknown model kind '" + kind + "'");
  });
}

void sqa_model_free(sqa_model* model) { delete model; }

namespace {

sqa::Pipeline make_pipeline(const sqa_kb* kb, const sqa_index* idx, const sqa_model* tagger,
                            const sqa_model* matcher, const sqa_model* type_matcher,
                            sqa_mode mode, sqa_disamb disamb) {
  require(kb && idx && tagger && matcher, "null handle");
  sqa::PipelineMode m = sqa::PipelineMode::FullCandidates;
  switch (mode) {
    case SQA_MODE_FULL_CANDIDATES: m = sqa::PipelineMode::FullCandidates; break;
    case SQA_MODE_TOP1_NONE: m = sqa::PipelineMode::Top1None; break;
    case SQA_MODE_TOP1_TYPE: m = sqa::PipelineMode::Top1Type; break;
    case SQA_MODE_TOP1_OUT_DEGREE: m = sqa::PipelineMode::Top1OutDegree; break;
  }
  sqa::RankingMethod d = sqa::RankingMethod::None;
  switch (disamb) {
    case SQA_DISAMB_NONE: d = sqa::RankingMethod::None; break;
    case SQA_DISAMB_OUT_DEGREE: d = sqa::RankingMethod::OutDegree; break;
    case SQA_DISAMB_NOTABLE_TYPE: d = sqa::RankingMethod::NotableType; break;
  }
  return sqa::Pipeline(kb->store, idx->index, tagger->tagger(), matcher->matcher(),
                       type_matcher ? &type_matcher->matcher() : nullptr, m, d);
}

}  // namespace

sqa_status sqa_ask(const sqa_kb* kb, const sqa_index* idx, const sqa_model* tagger,
                   const sqa_model* matcher, const sqa_model* type_matcher, sqa_mode mode,
                   sqa_disamb disamb, const char* question, char** answer_out) {
  return wrap([&] {
    require(question != nullptr && answer_out != nullptr, "null argument");
    auto pipeline = make_pipeline(kb, idx, tagger, matcher, type_matcher, mode, disamb);
    sqa::Answer ans = pipeline.answer(question);
    if (ans.unanswered) {
      *answer_out = dup_string("unanswered");
      return;
    }
    std::ostringstream out;
    out << ans.subject << '\t' << ans.relation << '\t';
    bool first = true;
    for (const auto& o : ans.objects) {
      if (!first) out << ',';
      out << o;
      first = false;
    }
    *answer_out = dup_string(out.str());
  });
}

sqa_status sqa_eval(const sqa_kb* kb, const sqa_index* idx, const sqa_model* tagger,
                    const sqa_model* matcher, const sqa_model* type_matcher, sqa_mode mode,
                    sqa_disamb disamb, const char* questions_tsv_path, int32_t machine_readable,
                    char** report_out) {
  return wrap([&] {
    require(report_out != nullptr, "null argument");
    auto pipeline = make_pipeline(kb, idx, tagger, matcher, type_matcher, mode, disamb);
    auto in = open_in(questions_tsv_path);
    sqa::EvalReport rep = pipeline.evaluate(in);
    std::string text = machine_readable
                           ? rep.machine_string()
                           : rep.human_string() + "\n" + rep.machine_string();
    *report_out = dup_string(text);
  });
}

void sqa_string_free(char* s) { std::free(s); }

}  // extern "C"
