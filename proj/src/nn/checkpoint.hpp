#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "tape.hpp"

namespace sqa::nn {

// Text checkpoints: `SQAMODEL v1` header, `!meta` / `!vocab` auxiliary lines,
// then named tensors as `name<TAB>rows<TAB>cols` followed by one line of
// space-separated values per row (17 significant digits, so a round trip
// reproduces forward outputs exactly on the same platform).
class CheckpointWriter {
 public:
  explicit CheckpointWriter(std::ostream& out);
  void meta(const std::string& key, const std::string& value);
  void vocab(const std::map<std::string, int>& vocab);
  void tensor(const std::string& name, const Mat& m);

 private:
  std::ostream& out_;
};

class CheckpointReader {
 public:
  explicit CheckpointReader(std::istream& in);

  const std::string& meta(const std::string& key) const;
  bool has_meta(const std::string& key) const { return meta_.count(key) != 0; }
  const Mat& tensor(const std::string& name) const;
  const std::map<std::string, int>& vocab() const { return vocab_; }

 private:
  std::map<std::string, std::string> meta_;
  std::map<std::string, int> vocab_;
  std::map<std::string, Mat> tensors_;
};

}  // namespace sqa::nn
