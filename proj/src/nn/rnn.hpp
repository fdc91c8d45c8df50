#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "tape.hpp"

namespace sqa::nn {

using Vec = Eigen::VectorXd;

struct GruParams {
  Mat Wz, Uz, bz;
  Mat Wr, Ur, br;
  Mat Wh, Uh, bh;
  int input_dim = 0, hidden = 0;

  void init(int D, int H, Rng& rng);
  std::vector<Mat*> params();
  std::vector<std::pair<std::string, Mat*>> named(const std::string& prefix);
};

struct LstmParams {
  Mat Wi, Ui, bi;
  Mat Wf, Uf, bf;
  Mat Wo, Uo, bo;
  Mat Wg, Ug, bg;
  int input_dim = 0, hidden = 0;

  void init(int D, int H, Rng& rng);
  std::vector<Mat*> params();
  std::vector<std::pair<std::string, Mat*>> named(const std::string& prefix);
};

struct LstmState {
  Vec h, c;
};

// Plain (inference) cell steps. The tape variants below must agree with
// these exactly; a test pins that.
Vec gru_step(const GruParams& p, const Vec& x, const Vec& h);
LstmState lstm_step(const LstmParams& p, const Vec& x, const LstmState& s);

// Tape node ids for one cell's parameters, registered once per tape.
struct GruNodes {
  int Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh;
  static GruNodes bind(Tape& t, GruParams& p);
};
struct LstmNodes {
  int Wi, Ui, bi, Wf, Uf, bf, Wo, Uo, bo, Wg, Ug, bg;
  static LstmNodes bind(Tape& t, LstmParams& p);
};

int gru_step_t(Tape& t, const GruNodes& p, int x, int h);
std::pair<int, int> lstm_step_t(Tape& t, const LstmNodes& p, int x, std::pair<int, int> hc);

// Bidirectional encodings. Per-step vectors concatenate the forward state at
// position i with the backward state at position i; the final vector
// concatenates the two terminal states.
struct BiEncoding {
  std::vector<Vec> steps;  // 2H each
  Vec final;               // 2H
};
BiEncoding bi_encode_gru(const GruParams& fwd, const GruParams& bwd, const std::vector<Vec>& seq);
BiEncoding bi_encode_lstm(const LstmParams& fwd, const LstmParams& bwd,
                          const std::vector<Vec>& seq);

struct BiEncodingT {
  std::vector<int> steps;
  int final = -1;
};
BiEncodingT bi_encode_gru_t(Tape& t, const GruNodes& fwd, const GruNodes& bwd,
                            const std::vector<int>& seq);
BiEncodingT bi_encode_lstm_t(Tape& t, const LstmNodes& fwd, const LstmNodes& bwd,
                             const std::vector<int>& seq);

}  // namespace sqa::nn
