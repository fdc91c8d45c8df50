#include "embedding.hpp"

#include <sstream>
#include <stdexcept>

namespace sqa::nn {

EmbeddingTable::EmbeddingTable(int dim, std::uint64_t seed)
    : matrix(0, dim), oov(1, dim), dim_(dim), rng_(seed) {
  for (int j = 0; j < dim; ++j) oov(0, j) = rng_.uniform(-kInitScale, kInitScale);
}

EmbeddingTable EmbeddingTable::load(std::istream& in, int dim, std::uint64_t seed) {
  EmbeddingTable table(dim, seed);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    std::vector<double> values;
    double v;
    while (ss >> v) values.push_back(v);
    if (static_cast<int>(values.size()) != dim)
      throw std::runtime_error("embeddings line " + std::to_string(lineno) + ": expected " +
                               std::to_string(dim) + " values, got " +
                               std::to_string(values.size()));
    rows.emplace_back(std::move(token), std::move(values));
  }
  table.matrix = Mat(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.vocab_[rows[i].first] = static_cast<int>(i);
    for (int j = 0; j < dim; ++j) table.matrix(static_cast<Eigen::Index>(i), j) = rows[i].second[j];
  }
  return table;
}

Mat EmbeddingTable::random_row() {
  Mat row(1, dim_);
  for (int j = 0; j < dim_; ++j) row(0, j) = rng_.uniform(-kInitScale, kInitScale);
  return row;
}

int EmbeddingTable::intern(const std::string& token) {
  auto it = vocab_.find(token);
  if (it != vocab_.end()) return it->second;
  int idx = static_cast<int>(matrix.rows());
  matrix.conservativeResize(matrix.rows() + 1, Eigen::NoChange);
  matrix.row(idx) = random_row();
  vocab_[token] = idx;
  return idx;
}

int EmbeddingTable::index_of(const std::string& token) const {
  auto it = vocab_.find(token);
  return it == vocab_.end() ? -1 : it->second;
}

Vec EmbeddingTable::lookup(const std::string& token) const {
  int idx = index_of(token);
  if (idx < 0) return oov.row(0).transpose();
  return matrix.row(idx).transpose();
}

int EmbeddingTable::lookup_t(Tape& t, const std::string& token) {
  int idx = index_of(token);
  if (idx < 0) return t.row_lookup(t.param(&oov), 0);
  return t.row_lookup(t.param(&matrix), idx);
}

EmbeddingTable EmbeddingTable::from_parts(int dim, std::map<std::string, int> vocab, Mat matrix,
                                          Mat oov) {
  EmbeddingTable table(dim, 0);
  table.vocab_ = std::move(vocab);
  table.matrix = std::move(matrix);
  table.oov = std::move(oov);
  return table;
}

}  // namespace sqa::nn
