#include "checkpoint.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "../text.hpp"

namespace sqa::nn {

CheckpointWriter::CheckpointWriter(std::ostream& out) : out_(out) { out_ << "SQAMODEL v1\n"; }

void CheckpointWriter::meta(const std::string& key, const std::string& value) {
  out_ << "!meta\t" << key << '\t' << value << '\n';
}

void CheckpointWriter::vocab(const std::map<std::string, int>& vocab) {
  for (const auto& [token, idx] : vocab) out_ << "!vocab\t" << token << '\t' << idx << '\n';
}

void CheckpointWriter::tensor(const std::string& name, const Mat& m) {
  out_ << name << '\t' << m.rows() << '\t' << m.cols() << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j) out_ << ' ';
      out_ << buf;
    }
    out_ << '\n';
  }
}

CheckpointReader::CheckpointReader(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || (line != "SQAMODEL v1" && line != "SQAMODEL v1\r"))
    throw std::runtime_error("checkpoint: missing SQAMODEL v1 header");
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields[0] == "!meta") {
      if (fields.size() != 3) throw std::runtime_error("checkpoint: malformed !meta line");
      meta_[fields[1]] = fields[2];
    } else if (fields[0] == "!vocab") {
      if (fields.size() != 3) throw std::runtime_error("checkpoint: malformed !vocab line");
      vocab_[fields[1]] = std::stoi(fields[2]);
    } else {
      if (fields.size() != 3) throw std::runtime_error("checkpoint: malformed tensor header");
      Eigen::Index rows = std::stoll(fields[1]);
      Eigen::Index cols = std::stoll(fields[2]);
      Mat m(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (!std::getline(in, line))
          throw std::runtime_error("checkpoint: truncated tensor '" + fields[0] + "'");
        std::istringstream ss(line);
        for (Eigen::Index j = 0; j < cols; ++j) {
          if (!(ss >> m(i, j)))
            throw std::runtime_error("checkpoint: bad value in tensor '" + fields[0] + "'");
        }
      }
      tensors_[fields[0]] = std::move(m);
    }
  }
}

const std::string& CheckpointReader::meta(const std::string& key) const {
  auto it = meta_.find(key);
  if (it == meta_.end()) throw std::runtime_error("checkpoint: missing meta key '" + key + "'");
  return it->second;
}

const Mat& CheckpointReader::tensor(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end())
    throw std::runtime_error("checkpoint: missing tensor '" + name + "'");
  return it->second;
}

}  // namespace sqa::nn
