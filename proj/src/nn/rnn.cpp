#include "rnn.hpp"

#include <stdexcept>

namespace sqa::nn {

namespace {

Mat init_mat(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-kInitScale, kInitScale);
  return m;
}

Vec sigmoid_v(const Vec& x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }

void check_dims(int input_dim, int hidden, const Vec& x, const Vec& h) {
  if (x.size() != input_dim || h.size() != hidden)
    throw std::runtime_error("rnn step: shape mismatch");
}

}  // namespace

void GruParams::init(int D, int H, Rng& rng) {
  input_dim = D;
  hidden = H;
  Wz = init_mat(H, D, rng); Uz = init_mat(H, H, rng); bz = init_mat(H, 1, rng);
  Wr = init_mat(H, D, rng); Ur = init_mat(H, H, rng); br = init_mat(H, 1, rng);
  Wh = init_mat(H, D, rng); Uh = init_mat(H, H, rng); bh = init_mat(H, 1, rng);
}

std::vector<Mat*> GruParams::params() {
  return {&Wz, &Uz, &bz, &Wr, &Ur, &br, &Wh, &Uh, &bh};
}

std::vector<std::pair<std::string, Mat*>> GruParams::named(const std::string& prefix) {
  return {{prefix + ".Wz", &Wz}, {prefix + ".Uz", &Uz}, {prefix + ".bz", &bz},
          {prefix + ".Wr", &Wr}, {prefix + ".Ur", &Ur}, {prefix + ".br", &br},
          {prefix + ".Wh", &Wh}, {prefix + ".Uh", &Uh}, {prefix + ".bh", &bh}};
}

void LstmParams::init(int D, int H, Rng& rng) {
  input_dim = D;
  hidden = H;
  Wi = init_mat(H, D, rng); Ui = init_mat(H, H, rng); bi = init_mat(H, 1, rng);
  Wf = init_mat(H, D, rng); Uf = init_mat(H, H, rng); bf = init_mat(H, 1, rng);
  Wo = init_mat(H, D, rng); Uo = init_mat(H, H, rng); bo = init_mat(H, 1, rng);
  Wg = init_mat(H, D, rng); Ug = init_mat(H, H, rng); bg = init_mat(H, 1, rng);
}

std::vector<Mat*> LstmParams::params() {
  return {&Wi, &Ui, &bi, &Wf, &Uf, &bf, &Wo, &Uo, &bo, &Wg, &Ug, &bg};
}

std::vector<std::pair<std::string, Mat*>> LstmParams::named(const std::string& prefix) {
  return {{prefix + ".Wi", &Wi}, {prefix + ".Ui", &Ui}, {prefix + ".bi", &bi},
          {prefix + ".Wf", &Wf}, {prefix + ".Uf", &Uf}, {prefix + ".bf", &bf},
          {prefix + ".Wo", &Wo}, {prefix + ".Uo", &Uo}, {prefix + ".bo", &bo},
          {prefix + ".Wg", &Wg}, {prefix + ".Ug", &Ug}, {prefix + ".bg", &bg}};
}

Vec gru_step(const GruParams& p, const Vec& x, const Vec& h) {
  check_dims(p.input_dim, p.hidden, x, h);
  Vec z = sigmoid_v(p.Wz * x + p.Uz * h + p.bz);
  Vec r = sigmoid_v(p.Wr * x + p.Ur * h + p.br);
  Vec hc = (p.Wh * x + p.Uh * r.cwiseProduct(h) + p.bh).array().tanh();
  return (1.0 - z.array()) * h.array() + z.array() * hc.array();
}

LstmState lstm_step(const LstmParams& p, const Vec& x, const LstmState& s) {
  check_dims(p.input_dim, p.hidden, x, s.h);
  if (s.c.size() != p.hidden) throw std::runtime_error("rnn step: shape mismatch");
  Vec i = sigmoid_v(p.Wi * x + p.Ui * s.h + p.bi);
  Vec f = sigmoid_v(p.Wf * x + p.Uf * s.h + p.bf);
  Vec o = sigmoid_v(p.Wo * x + p.Uo * s.h + p.bo);
  Vec g = (p.Wg * x + p.Ug * s.h + p.bg).array().tanh();
  LstmState out;
  out.c = f.cwiseProduct(s.c) + i.cwiseProduct(g);
  out.h = o.cwiseProduct(out.c.array().tanh().matrix());
  return out;
}

GruNodes GruNodes::bind(Tape& t, GruParams& p) {
  return {t.param(&p.Wz), t.param(&p.Uz), t.param(&p.bz),
          t.param(&p.Wr), t.param(&p.Ur), t.param(&p.br),
          t.param(&p.Wh), t.param(&p.Uh), t.param(&p.bh)};
}

LstmNodes LstmNodes::bind(Tape& t, LstmParams& p) {
  return {t.param(&p.Wi), t.param(&p.Ui), t.param(&p.bi),
          t.param(&p.Wf), t.param(&p.Uf), t.param(&p.bf),
          t.param(&p.Wo), t.param(&p.Uo), t.param(&p.bo),
          t.param(&p.Wg), t.param(&p.Ug), t.param(&p.bg)};
}

int gru_step_t(Tape& t, const GruNodes& p, int x, int h) {
  int z = t.sigmoid(t.add(t.add(t.matmul(p.Wz, x), t.matmul(p.Uz, h)), p.bz));
  int r = t.sigmoid(t.add(t.add(t.matmul(p.Wr, x), t.matmul(p.Ur, h)), p.br));
  int hc = t.tanh(t.add(t.add(t.matmul(p.Wh, x), t.matmul(p.Uh, t.cmul(r, h))), p.bh));
  return t.add(t.cmul(t.affine(z, -1.0, 1.0), h), t.cmul(z, hc));
}

std::pair<int, int> lstm_step_t(Tape& t, const LstmNodes& p, int x, std::pair<int, int> hc) {
  auto [h, c] = hc;
  int i = t.sigmoid(t.add(t.add(t.matmul(p.Wi, x), t.matmul(p.Ui, h)), p.bi));
  int f = t.sigmoid(t.add(t.add(t.matmul(p.Wf, x), t.matmul(p.Uf, h)), p.bf));
  int o = t.sigmoid(t.add(t.add(t.matmul(p.Wo, x), t.matmul(p.Uo, h)), p.bo));
  int g = t.tanh(t.add(t.add(t.matmul(p.Wg, x), t.matmul(p.Ug, h)), p.bg));
  int c_new = t.add(t.cmul(f, c), t.cmul(i, g));
  int h_new = t.cmul(o, t.tanh(c_new));
  return {h_new, c_new};
}

BiEncoding bi_encode_gru(const GruParams& fwd, const GruParams& bwd, const std::vector<Vec>& seq) {
  if (seq.empty()) throw std::runtime_error("bi_encode: empty sequence");
  std::size_t n = seq.size();
  std::vector<Vec> fh(n), bh(n);
  Vec h = Vec::Zero(fwd.hidden);
  for (std::size_t i = 0; i < n; ++i) {
    h = gru_step(fwd, seq[i], h);
    fh[i] = h;
  }
  h = Vec::Zero(bwd.hidden);
  for (std::size_t i = n; i-- > 0;) {
    h = gru_step(bwd, seq[i], h);
    bh[i] = h;
  }
  BiEncoding out;
  out.steps.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec v(fwd.hidden + bwd.hidden);
    v << fh[i], bh[i];
    out.steps[i] = std::move(v);
  }
  Vec f(fwd.hidden + bwd.hidden);
  f << fh[n - 1], bh[0];
  out.final = std::move(f);
  return out;
}

BiEncoding bi_encode_lstm(const LstmParams& fwd, const LstmParams& bwd,
                          const std::vector<Vec>& seq) {
  if (seq.empty()) throw std::runtime_error("bi_encode: empty sequence");
  std::size_t n = seq.size();
  std::vector<Vec> fh(n), bh(n);
  LstmState s{Vec::Zero(fwd.hidden), Vec::Zero(fwd.hidden)};
  for (std::size_t i = 0; i < n; ++i) {
    s = lstm_step(fwd, seq[i], s);
    fh[i] = s.h;
  }
  s = {Vec::Zero(bwd.hidden), Vec::Zero(bwd.hidden)};
  for (std::size_t i = n; i-- > 0;) {
    s = lstm_step(bwd, seq[i], s);
    bh[i] = s.h;
  }
  BiEncoding out;
  out.steps.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec v(fwd.hidden + bwd.hidden);
    v << fh[i], bh[i];
    out.steps[i] = std::move(v);
  }
  Vec f(fwd.hidden + bwd.hidden);
  f << fh[n - 1], bh[0];
  out.final = std::move(f);
  return out;
}

BiEncodingT bi_encode_gru_t(Tape& t, const GruNodes& fwd, const GruNodes& bwd,
                            const std::vector<int>& seq) {
  if (seq.empty()) throw std::runtime_error("bi_encode: empty sequence");
  std::size_t n = seq.size();
  Eigen::Index H = t.val(fwd.bz).rows();
  std::vector<int> fh(n), bh(n);
  int h = t.input(Mat::Zero(H, 1));
  for (std::size_t i = 0; i < n; ++i) {
    h = gru_step_t(t, fwd, seq[i], h);
    fh[i] = h;
  }
  h = t.input(Mat::Zero(H, 1));
  for (std::size_t i = n; i-- > 0;) {
    h = gru_step_t(t, bwd, seq[i], h);
    bh[i] = h;
  }
  BiEncodingT out;
  out.steps.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.steps[i] = t.vconcat(fh[i], bh[i]);
  out.final = t.vconcat(fh[n - 1], bh[0]);
  return out;
}

BiEncodingT bi_encode_lstm_t(Tape& t, const LstmNodes& fwd, const LstmNodes& bwd,
                             const std::vector<int>& seq) {
  if (seq.empty()) throw std::runtime_error("bi_encode: empty sequence");
  std::size_t n = seq.size();
  Eigen::Index H = t.val(fwd.bi).rows();
  std::vector<int> fh(n), bh(n);
  std::pair<int, int> s{t.input(Mat::Zero(H, 1)), t.input(Mat::Zero(H, 1))};
  for (std::size_t i = 0; i < n; ++i) {
    s = lstm_step_t(t, fwd, seq[i], s);
    fh[i] = s.first;
  }
  s = {t.input(Mat::Zero(H, 1)), t.input(Mat::Zero(H, 1))};
  for (std::size_t i = n; i-- > 0;) {
    s = lstm_step_t(t, bwd, seq[i], s);
    bh[i] = s.first;
  }
  BiEncodingT out;
  out.steps.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.steps[i] = t.vconcat(fh[i], bh[i]);
  out.final = t.vconcat(fh[n - 1], bh[0]);
  return out;
}

}  // namespace sqa::nn
