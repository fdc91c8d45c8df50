#pragma once

#include <cstdint>

namespace sqa {

struct TrainConfig {
  std::uint64_t seed = 42;
  int embedding_dim = 300;
  int hidden = 100;
  int epochs = 30;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double dropout = 0.1;
  int positive_replication = 4;    // total occurrences of each positive pair
  int negatives_per_positive = 10; // type-matcher negative sampling
};

}  // namespace sqa
