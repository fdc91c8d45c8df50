#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "rng.hpp"
#include "tape.hpp"

namespace sqa::nn {

using Vec = Eigen::VectorXd;

// Token -> row table. Rows loaded from a GloVe-style text file keep their
// pre-trained values; tokens interned later get a seeded uniform row. Tokens
// never interned fall back to the dedicated trainable OOV row.
class EmbeddingTable {
 public:
  EmbeddingTable(int dim, std::uint64_t seed);

  // Lines of `token v1 ... vD`. Throws with the line number on a dimension
  // mismatch.
  static EmbeddingTable load(std::istream& in, int dim, std::uint64_t seed);

  // Returns the row for `token`, creating a seeded random row when absent.
  int intern(const std::string& token);

  // -1 when the token has no row (callers then use the OOV row).
  int index_of(const std::string& token) const;

  Vec lookup(const std::string& token) const;

  int dim() const { return dim_; }
  std::size_t size() const { return vocab_.size(); }

  std::vector<Mat*> params() { return {&matrix, &oov}; }

  // Tape lookup routing unknown tokens through the OOV row.
  int lookup_t(Tape& t, const std::string& token);

  const std::map<std::string, int>& vocab() const { return vocab_; }

  Mat matrix;  // V x D
  Mat oov;     // 1 x D

  // For checkpoint reload.
  static EmbeddingTable from_parts(int dim, std::map<std::string, int> vocab, Mat matrix,
                                   Mat oov);

 private:
  Mat random_row();

  int dim_;
  std::map<std::string, int> vocab_;
  Rng rng_;
};

}  // namespace sqa::nn
