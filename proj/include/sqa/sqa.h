/* Simple question answering over a triple knowledge base: C API.
 *
 * All functions return SQA_OK on success; on failure sqa_last_error() holds
 * a diagnostic for the calling thread. Handles are opaque and must be
 * released with the matching *_free function. Strings returned through
 * char** out-parameters are heap-allocated; release them with
 * sqa_string_free.
 */
#ifndef SQA_H
#define SQA_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  SQA_OK = 0,
  SQA_ERR_IO = 1,
  SQA_ERR_PARSE = 2,
  SQA_ERR_INVALID = 3,
  SQA_ERR_INTERNAL = 4
} sqa_status;

typedef enum {
  SQA_MODE_FULL_CANDIDATES = 0,
  SQA_MODE_TOP1_NONE = 1,
  SQA_MODE_TOP1_TYPE = 2,
  SQA_MODE_TOP1_OUT_DEGREE = 3
} sqa_mode;

/* Entity disambiguation for SQA_MODE_FULL_CANDIDATES. */
typedef enum {
  SQA_DISAMB_NONE = 0,
  SQA_DISAMB_OUT_DEGREE = 1,
  SQA_DISAMB_NOTABLE_TYPE = 2
} sqa_disamb;

typedef struct sqa_kb sqa_kb;
typedef struct sqa_index sqa_index;
typedef struct sqa_model sqa_model; /* tagger or matcher checkpoint */

typedef struct {
  uint64_t seed;
  int32_t embedding_dim;        /* default 300 */
  int32_t hidden_size;          /* default 100 */
  int32_t epochs;               /* default 30 */
  int32_t batch_size;           /* default 64 */
  int32_t positive_replication; /* total occurrences per positive, default 4 */
  int32_t negatives_per_positive; /* type matcher, default 10 */
  double learning_rate;         /* default 0.001 */
  double dropout;               /* default 0.1 */
  const char* embeddings_path;  /* optional GloVe text file, NULL to skip */
} sqa_train_config;

void sqa_train_config_defaults(sqa_train_config* cfg);

/* Thread-local message for the most recent failure. */
const char* sqa_last_error(void);

/* --- knowledge base ------------------------------------------------- */

sqa_status sqa_kb_create(sqa_kb** out);
sqa_status sqa_kb_load_triples(sqa_kb* kb, const char* path);
sqa_status sqa_kb_load_aliases(sqa_kb* kb, const char* path);
sqa_status sqa_kb_load_types(sqa_kb* kb, const char* path);
sqa_status sqa_kb_save(const sqa_kb* kb, const char* path);
sqa_status sqa_kb_open(const char* path, sqa_kb** out);
uint64_t sqa_kb_triple_count(const sqa_kb* kb);
uint64_t sqa_kb_entity_count(const sqa_kb* kb);
uint64_t sqa_kb_type_count(const sqa_kb* kb);
uint64_t sqa_kb_out_degree(const sqa_kb* kb, const char* entity_id);
void sqa_kb_free(sqa_kb* kb);

/* N-Triples -> `entity_id<TAB>type_text` TSV. predicate_suffix may be NULL
 * for the default "common.topic.notable_types". */
sqa_status sqa_extract_types(const char* ntriples_path, const char* tsv_out_path,
                             const char* predicate_suffix, uint64_t* emitted,
                             uint64_t* skipped);

/* --- inverted n-gram index ------------------------------------------ */

sqa_status sqa_index_build(const sqa_kb* kb, sqa_index** out);
sqa_status sqa_index_save(const sqa_index* idx, const char* path);
sqa_status sqa_index_open(const char* path, const sqa_kb* kb, sqa_index** out);
void sqa_index_free(sqa_index* idx);

/* --- training-data dumps -------------------------------------------- */

/* Questions TSV is `subject<TAB>relation<TAB>object<TAB>question_text`. */
sqa_status sqa_label_entities(const sqa_kb* kb, const char* questions_tsv_path,
                              const char* out_tsv_path, uint64_t* labeled, uint64_t* skipped);
sqa_status sqa_gen_pairs(const sqa_kb* kb, const char* questions_tsv_path,
                         const char* out_tsv_path, int32_t positive_replication,
                         uint64_t* pair_count);

/* --- model training and persistence --------------------------------- */

sqa_status sqa_train_tagger(const sqa_kb* kb, const char* questions_tsv_path,
                            const sqa_train_config* cfg, sqa_model** out);
sqa_status sqa_train_matcher(const sqa_kb* kb, const char* questions_tsv_path,
                             const sqa_train_config* cfg, sqa_model** out);
sqa_status sqa_train_type_matcher(const sqa_kb* kb, const char* questions_tsv_path,
                                  const sqa_train_config* cfg, sqa_model** out);
sqa_status sqa_model_save(const sqa_model* model, const char* path);
sqa_status sqa_model_open(const char* path, sqa_model** out);
void sqa_model_free(sqa_model* model);

/* --- answering and evaluation --------------------------------------- */

/* Answer is `subject<TAB>relation<TAB>object[,object...]` or the literal
 * string "unanswered". type_matcher may be NULL unless the mode needs it. */
sqa_status sqa_ask(const sqa_kb* kb, const sqa_index* idx, const sqa_model* tagger,
                   const sqa_model* matcher, const sqa_model* type_matcher, sqa_mode mode,
                   sqa_disamb disamb, const char* question, char** answer_out);

/* machine_readable != 0 emits the key:value block, otherwise the
 * human-readable tables followed by the key:value block. */
sqa_status sqa_eval(const sqa_kb* kb, const sqa_index* idx, const sqa_model* tagger,
                    const sqa_model* matcher, const sqa_model* type_matcher, sqa_mode mode,
                    sqa_disamb disamb, const char* questions_tsv_path, int32_t machine_readable,
                    char** report_out);

void sqa_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* SQA_H */
