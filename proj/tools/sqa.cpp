// Command-line front end. Links only the public C API.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "sqa/sqa.h"

namespace {

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  Handle& operator=(Handle&& other) noexcept {
    if (this != &other) {
      Free(ptr);
      ptr = other.ptr;
      other.ptr = nullptr;
    }
    return *this;
  }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
};

using KbHandle = Handle<sqa_kb, sqa_kb_free>;
using IndexHandle = Handle<sqa_index, sqa_index_free>;
using ModelHandle = Handle<sqa_model, sqa_model_free>;

[[noreturn]] void die(const std::string& context) {
  std::fprintf(stderr, "sqa: %s: %s\n", context.c_str(), sqa_last_error());
  std::exit(1);
}

void check(sqa_status st, const std::string& context) {
  if (st != SQA_OK) die(context);
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SQA_SEED")) return std::strtoull(env, nullptr, 10);
  return 42;
}

sqa_mode parse_mode(const std::string& s) {
  if (s == "full_candidates") return SQA_MODE_FULL_CANDIDATES;
  if (s == "top1_none") return SQA_MODE_TOP1_NONE;
  if (s == "top1_type") return SQA_MODE_TOP1_TYPE;
  if (s == "top1_out_degree") return SQA_MODE_TOP1_OUT_DEGREE;
  std::fprintf(stderr, "sqa: unknown mode '%s'\n", s.c_str());
  std::exit(2);
}

sqa_disamb parse_disamb(const std::string& s) {
  if (s == "none") return SQA_DISAMB_NONE;
  if (s == "out_degree") return SQA_DISAMB_OUT_DEGREE;
  if (s == "notable_type") return SQA_DISAMB_NOTABLE_TYPE;
  std::fprintf(stderr, "sqa: unknown disambiguation '%s'\n", s.c_str());
  std::exit(2);
}

void add_train_flags(CLI::App* cmd, sqa_train_config& cfg, std::string& embeddings) {
  cmd->add_option("--seed", cfg.seed, "random seed (env SQA_SEED is the fallback)");
  cmd->add_option("--dim", cfg.embedding_dim, "embedding dimension");
  cmd->add_option("--hidden", cfg.hidden_size, "recurrent hidden size");
  cmd->add_option("--epochs", cfg.epochs, "training epochs");
  cmd->add_option("--batch", cfg.batch_size, "batch size");
  cmd->add_option("--lr", cfg.learning_rate, "Adam learning rate");
  cmd->add_option("--dropout", cfg.dropout, "dropout rate");
  cmd->add_option("--replication", cfg.positive_replication,
                  "total occurrences of each positive pair");
  cmd->add_option("--negatives", cfg.negatives_per_positive,
                  "negatives per positive (type matcher)");
  cmd->add_option("--embeddings", embeddings, "GloVe-format embedding file");
}

KbHandle open_kb(const std::string& path) {
  KbHandle kb;
  check(sqa_kb_open(path.c_str(), &kb.ptr), "open kb " + path);
  return kb;
}

IndexHandle get_index(const KbHandle& kb, const std::string& index_path) {
  IndexHandle idx;
  if (index_path.empty())
    check(sqa_index_build(kb.ptr, &idx.ptr), "build index");
  else
    check(sqa_index_open(index_path.c_str(), kb.ptr, &idx.ptr), "open index " + index_path);
  return idx;
}

ModelHandle open_model(const std::string& path) {
  ModelHandle m;
  check(sqa_model_open(path.c_str(), &m.ptr), "open model " + path);
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simple question answering over a triple knowledge base"};
  app.require_subcommand(1);

  sqa_train_config cfg;
  sqa_train_config_defaults(&cfg);
  cfg.seed = default_seed();
  std::string embeddings_path;

  // ingest
  std::string triples, aliases, types, out_path;
  auto* ingest = app.add_subcommand("ingest", "Load triples/aliases/types and seal a KB snapshot");
  ingest->add_option("--triples", triples, "triples TSV")->required();
  ingest->add_option("--aliases", aliases, "aliases TSV");
  ingest->add_option("--types", types, "notable types TSV");
  ingest->add_option("--out", out_path, "output KB snapshot")->required();

  // extract-types
  std::string nt_in, suffix;
  auto* extract = app.add_subcommand("extract-types", "N-Triples dump to notable-type TSV");
  extract->add_option("--in", nt_in, "N-Triples input")->required();
  extract->add_option("--out", out_path, "output TSV")->required();
  extract->add_option("--predicate-suffix", suffix, "notable-type predicate suffix");

  // build-index
  std::string kb_path, index_path;
  auto* build = app.add_subcommand("build-index", "Build and save the inverted n-gram index");
  build->add_option("--kb", kb_path, "KB snapshot")->required();
  build->add_option("--out", out_path, "output index snapshot")->required();

  // label-entities
  std::string questions;
  auto* label = app.add_subcommand("label-entities", "Dump distant-supervision tag labels");
  label->add_option("--kb", kb_path, "KB snapshot")->required();
  label->add_option("--questions", questions, "questions TSV")->required();
  label->add_option("--out", out_path, "output labels TSV")->required();

  // gen-pairs
  auto* pairs = app.add_subcommand("gen-pairs", "Dump relation-matching training pairs");
  pairs->add_option("--kb", kb_path, "KB snapshot")->required();
  pairs->add_option("--questions", questions, "questions TSV")->required();
  pairs->add_option("--out", out_path, "output pairs TSV")->required();
  pairs->add_option("--replication", cfg.positive_replication, "positive replication");

  // training commands
  auto* ttag = app.add_subcommand("train-tagger", "Train the entity tagger");
  auto* tmat = app.add_subcommand("train-matcher", "Train the relation matcher");
  auto* ttyp = app.add_subcommand("train-type-matcher", "Train the notable-type matcher");
  for (CLI::App* cmd : {ttag, tmat, ttyp}) {
    cmd->add_option("--kb", kb_path, "KB snapshot")->required();
    cmd->add_option("--questions", questions, "questions TSV")->required();
    cmd->add_option("--out", out_path, "output checkpoint")->required();
    add_train_flags(cmd, cfg, embeddings_path);
  }

  // eval / ask
  std::string tagger_path, matcher_path, type_matcher_path, mode_str = "full_candidates",
              disamb_str = "none", question_text;
  bool machine = false;
  auto* eval = app.add_subcommand("eval", "Run the evaluation harness");
  auto* ask = app.add_subcommand("ask", "Answer a single question");
  for (CLI::App* cmd : {eval, ask}) {
    cmd->add_option("--kb", kb_path, "KB snapshot")->required();
    cmd->add_option("--index", index_path, "index snapshot (rebuilt from the KB when omitted)");
    cmd->add_option("--tagger", tagger_path, "tagger checkpoint")->required();
    cmd->add_option("--matcher", matcher_path, "relation matcher checkpoint")->required();
    cmd->add_option("--type-matcher", type_matcher_path, "notable-type matcher checkpoint");
    cmd->add_option("--mode", mode_str,
                    "full_candidates | top1_none | top1_type | top1_out_degree");
    cmd->add_option("--disamb", disamb_str, "none | out_degree | notable_type");
  }
  eval->add_option("--questions", questions, "questions TSV")->required();
  eval->add_flag("--machine", machine, "machine-readable report only");
  ask->add_option("question", question_text, "question text")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cfg.embeddings_path = embeddings_path.empty() ? nullptr : embeddings_path.c_str();

  if (ingest->parsed()) {
    KbHandle kb;
    check(sqa_kb_create(&kb.ptr), "create kb");
    check(sqa_kb_load_triples(kb.ptr, triples.c_str()), "load triples");
    if (!aliases.empty()) check(sqa_kb_load_aliases(kb.ptr, aliases.c_str()), "load aliases");
    if (!types.empty()) check(sqa_kb_load_types(kb.ptr, types.c_str()), "load types");
    check(sqa_kb_save(kb.ptr, out_path.c_str()), "save kb");
    std::printf("triples: %llu\nentities: %llu\ntypes: %llu\n",
                (unsigned long long)sqa_kb_triple_count(kb.ptr),
                (unsigned long long)sqa_kb_entity_count(kb.ptr),
                (unsigned long long)sqa_kb_type_count(kb.ptr));
  } else if (extract->parsed()) {
    uint64_t emitted = 0, skipped = 0;
    check(sqa_extract_types(nt_in.c_str(), out_path.c_str(),
                            suffix.empty() ? nullptr : suffix.c_str(), &emitted, &skipped),
          "extract types");
    std::printf("emitted: %llu\nskipped: %llu\n", (unsigned long long)emitted,
                (unsigned long long)skipped);
  } else if (build->parsed()) {
    KbHandle kb = open_kb(kb_path);
    IndexHandle idx;
    check(sqa_index_build(kb.ptr, &idx.ptr), "build index");
    check(sqa_index_save(idx.ptr, out_path.c_str()), "save index");
    std::printf("index written: %s\n", out_path.c_str());
  } else if (label->parsed()) {
    KbHandle kb = open_kb(kb_path);
    uint64_t labeled = 0, skipped = 0;
    check(sqa_label_entities(kb.ptr, questions.c_str(), out_path.c_str(), &labeled, &skipped),
          "label entities");
    std::printf("labeled: %llu\nskipped: %llu\n", (unsigned long long)labeled,
                (unsigned long long)skipped);
  } else if (pairs->parsed()) {
    KbHandle kb = open_kb(kb_path);
    uint64_t count = 0;
    check(sqa_gen_pairs(kb.ptr, questions.c_str(), out_path.c_str(), cfg.positive_replication,
                        &count),
          "generate pairs");
    std::printf("pairs: %llu\n", (unsigned long long)count);
  } else if (ttag->parsed() || tmat->parsed() || ttyp->parsed()) {
    KbHandle kb = open_kb(kb_path);
    ModelHandle model;
    if (ttag->parsed())
      check(sqa_train_tagger(kb.ptr, questions.c_str(), &cfg, &model.ptr), "train tagger");
    else if (tmat->parsed())
      check(sqa_train_matcher(kb.ptr, questions.c_str(), &cfg, &model.ptr), "train matcher");
    else
      check(sqa_train_type_matcher(kb.ptr, questions.c_str(), &cfg, &model.ptr),
            "train type matcher");
    check(sqa_model_save(model.ptr, out_path.c_str()), "save model");
    std::printf("model written: %s\n", out_path.c_str());
  } else if (eval->parsed() || ask->parsed()) {
    KbHandle kb = open_kb(kb_path);
    IndexHandle idx = get_index(kb, index_path);
    ModelHandle tagger = open_model(tagger_path);
    ModelHandle matcher = open_model(matcher_path);
    ModelHandle type_matcher;
    if (!type_matcher_path.empty()) type_matcher = open_model(type_matcher_path);
    sqa_mode mode = parse_mode(mode_str);
    sqa_disamb disamb = parse_disamb(disamb_str);
    char* text = nullptr;
    if (eval->parsed()) {
      check(sqa_eval(kb.ptr, idx.ptr, tagger.ptr, matcher.ptr, type_matcher.ptr, mode,
                     disamb, questions.c_str(), machine ? 1 : 0, &text),
            "evaluate");
    } else {
      check(sqa_ask(kb.ptr, idx.ptr, tagger.ptr, matcher.ptr, type_matcher.ptr, mode,
                    disamb, question_text.c_str(), &text),
            "answer");
    }
    std::fputs(text, stdout);
    if (ask->parsed()) std::fputc('\n', stdout);
    sqa_string_free(text);
  }
  return 0;
}
