#include "l2d/nn.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace l2d::nn {

using nlohmann::json;

std::string layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::Recurrent: return "recurrent";
    case LayerKind::Dense: return "dense";
    case LayerKind::SelfAttentionCls: return "self_attention_cls";
    case LayerKind::Flatten: return "flatten";
  }
  return "dense";
}

LayerKind parse_layer_kind(const std::string& s) {
  if (s == "recurrent") return LayerKind::Recurrent;
  if (s == "dense") return LayerKind::Dense;
  if (s == "self_attention_cls") return LayerKind::SelfAttentionCls;
  if (s == "flatten") return LayerKind::Flatten;
  throw DataError("unknown layer kind: " + s);
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

Activation parse_activation(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::Relu;
  if (s == "identity") return Activation::Identity;
  throw DataError("unknown activation: " + s);
}

int Model::output_dim() const { return specs.empty() ? 0 : specs.back().out_dim; }

bool Model::operator==(const Model& o) const {
  if (specs != o.specs) return false;
  if (params.size() != o.params.size()) return false;
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != o.params[i].size()) return false;
    for (size_t j = 0; j < params[i].size(); ++j) {
      const Mat& a = params[i][j].value;
      const Mat& b = o.params[i][j].value;
      if (params[i][j].name != o.params[i][j].name) return false;
      if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
      if ((a.array() != b.array()).any()) return false;
    }
  }
  return true;
}

namespace {

Mat init_mat(int rows, int cols, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
  }
  return m;
}

ParamTensor make_param(const std::string& name, int rows, int cols, int fan_in,
                       Rng& rng) {
  ParamTensor p;
  p.name = name;
  p.value = init_mat(rows, cols, fan_in, rng);
  p.grad = Mat::Zero(rows, cols);
  return p;
}

void validate_specs(const std::vector<LayerSpec>& specs) {
  if (specs.empty()) throw ConfigError("model needs at least one layer");
  for (size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    if (s.in_dim < 1 || s.out_dim < 1) {
      throw ConfigError("layer dims must be >= 1");
    }
    if (s.kind == LayerKind::Flatten) {
      if (s.steps < 1) throw ConfigError("flatten layer needs a step count");
      if (s.out_dim != s.steps * s.in_dim) {
        throw ConfigError("flatten out_dim must equal steps * in_dim");
      }
    }
    if (i > 0 && specs[i - 1].out_dim != s.in_dim) {
      throw ConfigError("adjacent layers are dimension-incompatible");
    }
  }
}

inline Mat apply_act(const Mat& pre, Activation act) {
  switch (act) {
    case Activation::Tanh: return pre.array().tanh().matrix();
    case Activation::Relu: return pre.cwiseMax(0.0);
    case Activation::Identity: return pre;
  }
  return pre;
}

inline Mat act_deriv(const Mat& pre, Activation act) {
  switch (act) {
    case Activation::Tanh: {
      Mat t = pre.array().tanh().matrix();
      return (1.0 - t.array().square()).matrix();
    }
    case Activation::Relu:
      return (pre.array() > 0.0).cast<double>().matrix();
    case Activation::Identity:
      return Mat::Ones(pre.rows(), pre.cols());
  }
  return Mat::Ones(pre.rows(), pre.cols());
}

inline Mat sigmoid(const Mat& x) {
  return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

struct Feed {
  std::vector<Mat> steps;
  bool pooled = false;
};

}  // namespace

Model build_model(const std::vector<LayerSpec>& specs, Rng& rng) {
  validate_specs(specs);
  Model m;
  m.specs = specs;
  for (const auto& s : specs) {
    std::vector<ParamTensor> ps;
    switch (s.kind) {
      case LayerKind::Recurrent:
        // Gating variant: update (z) + reset (r) gates with tanh candidate.
        for (const char* g : {"z", "r", "c"}) {
          ps.push_back(make_param(std::string("W") + g, s.out_dim, s.in_dim, s.in_dim, rng));
          ps.push_back(make_param(std::string("U") + g, s.out_dim, s.out_dim, s.out_dim, rng));
          ps.push_back(make_param(std::string("b") + g, s.out_dim, 1, s.out_dim, rng));
        }
        break;
      case LayerKind::Dense:
        ps.push_back(make_param("W", s.out_dim, s.in_dim, s.in_dim, rng));
        ps.push_back(make_param("b", s.out_dim, 1, s.in_dim, rng));
        break;
      case LayerKind::SelfAttentionCls:
        // Single head, key dim = in dim, learned CLS query.
        ps.push_back(make_param("Wk", s.in_dim, s.in_dim, s.in_dim, rng));
        ps.push_back(make_param("Wv", s.out_dim, s.in_dim, s.in_dim, rng));
        ps.push_back(make_param("q", s.in_dim, 1, s.in_dim, rng));
        break;
      case LayerKind::Flatten:
        break;
    }
    m.params.push_back(std::move(ps));
  }
  return m;
}

void zero_grads(Model& m) {
  for (auto& layer : m.params) {
    for (auto& p : layer) p.grad.setZero();
  }
}

size_t param_count(const Model& m) {
  size_t n = 0;
  for (const auto& layer : m.params) {
    for (const auto& p : layer) n += static_cast<size_t>(p.value.size());
  }
  return n;
}

namespace {

Feed forward_layer(const LayerSpec& spec, const std::vector<ParamTensor>& ps,
                   const Feed& in, LayerTrace* tr) {
  Feed out;
  switch (spec.kind) {
    case LayerKind::Dense: {
      const Mat& W = ps[0].value;
      const Mat& b = ps[1].value;
      out.pooled = in.pooled;
      out.steps.reserve(in.steps.size());
      for (const Mat& x : in.steps) {
        Mat pre = x * W.transpose();
        pre.rowwise() += b.col(0).transpose();
        if (tr) tr->preact.push_back(pre);
        out.steps.push_back(apply_act(pre, spec.act));
      }
      break;
    }
    case LayerKind::Recurrent: {
      if (in.pooled) throw DataError("recurrent layer cannot consume pooled input");
      const Mat &Wz = ps[0].value, &Uz = ps[1].value, &bz = ps[2].value;
      const Mat &Wr = ps[3].value, &Ur = ps[4].value, &br = ps[5].value;
      const Mat &Wc = ps[6].value, &Uc = ps[7].value, &bc = ps[8].value;
      const int B = static_cast<int>(in.steps.front().rows());
      Mat h = Mat::Zero(B, spec.out_dim);
      if (tr) tr->h.push_back(h);
      for (const Mat& x : in.steps) {
        Mat pre_z = x * Wz.transpose() + h * Uz.transpose();
        pre_z.rowwise() += bz.col(0).transpose();
        Mat z = sigmoid(pre_z);
        Mat pre_r = x * Wr.transpose() + h * Ur.transpose();
        pre_r.rowwise() += br.col(0).transpose();
        Mat r = sigmoid(pre_r);
        Mat pre_c = x * Wc.transpose() + (r.array() * h.array()).matrix() * Uc.transpose();
        pre_c.rowwise() += bc.col(0).transpose();
        Mat c = pre_c.array().tanh().matrix();
        h = ((1.0 - z.array()) * h.array() + z.array() * c.array()).matrix();
        if (tr) {
          tr->z.push_back(z);
          tr->r.push_back(r);
          tr->hc.push_back(c);
          tr->h.push_back(h);
        }
        out.steps.push_back(h);
      }
      out.pooled = false;
      break;
    }
    case LayerKind::SelfAttentionCls: {
      if (in.pooled) throw DataError("attention layer cannot consume pooled input");
      const Mat& Wk = ps[0].value;
      const Mat& Wv = ps[1].value;
      const Mat& q = ps[2].value;
      const int T = static_cast<int>(in.steps.size());
      const int B = static_cast<int>(in.steps.front().rows());
      const double scale = 1.0 / std::sqrt(static_cast<double>(spec.in_dim));
      Mat scores(B, T);
      std::vector<Mat> K, V;
      K.reserve(in.steps.size());
      V.reserve(in.steps.size());
      for (int t = 0; t < T; ++t) {
        K.push_back(in.steps[static_cast<size_t>(t)] * Wk.transpose());
        V.push_back(in.steps[static_cast<size_t>(t)] * Wv.transpose());
        scores.col(t) = K.back() * q.col(0) * scale;
      }
      Vec rowmax = scores.rowwise().maxCoeff();
      Mat alpha = (scores.colwise() - rowmax).array().exp().matrix();
      Vec rowsum = alpha.rowwise().sum();
      alpha.array().colwise() /= rowsum.array();
      Mat pooled = Mat::Zero(B, spec.out_dim);
      for (int t = 0; t < T; ++t) {
        pooled += (V[static_cast<size_t>(t)].array().colwise() * alpha.col(t).array()).matrix();
      }
      if (tr) {
        tr->K = std::move(K);
        tr->V = std::move(V);
        tr->alpha = alpha;
      }
      out.steps.push_back(std::move(pooled));
      out.pooled = true;
      break;
    }
    case LayerKind::Flatten: {
      if (in.pooled) throw DataError("flatten layer cannot consume pooled input");
      const int T = static_cast<int>(in.steps.size());
      if (T != spec.steps) {
        throw DataError("flatten layer expects " + std::to_string(spec.steps) +
                        " steps, got " + std::to_string(T));
      }
      const int B = static_cast<int>(in.steps.front().rows());
      Mat flat(B, spec.out_dim);
      for (int t = 0; t < T; ++t) {
        flat.middleCols(t * spec.in_dim, spec.in_dim) = in.steps[static_cast<size_t>(t)];
      }
      out.steps.push_back(std::move(flat));
      out.pooled = true;
      break;
    }
  }
  return out;
}

Feed backward_layer(const LayerSpec& spec, std::vector<ParamTensor>& ps,
                    const LayerTrace& tr, const Feed& grad_out) {
  Feed gin;
  switch (spec.kind) {
    case LayerKind::Dense: {
      const Mat& W = ps[0].value;
      gin.pooled = tr.pooled_in;
      gin.steps.resize(grad_out.steps.size());
      for (size_t t = 0; t < grad_out.steps.size(); ++t) {
        Mat dpre = (grad_out.steps[t].array() * act_deriv(tr.preact[t], spec.act).array()).matrix();
        ps[0].grad += dpre.transpose() * tr.in_steps[t];
        ps[1].grad.col(0) += dpre.colwise().sum().transpose();
        gin.steps[t] = dpre * W;
      }
      break;
    }
    case LayerKind::Recurrent: {
      const Mat &Wz = ps[0].value, &Uz = ps[1].value;
      const Mat &Wr = ps[3].value, &Ur = ps[4].value;
      const Mat &Wc = ps[6].value, &Uc = ps[7].value;
      const int T = static_cast<int>(tr.in_steps.size());
      const int B = static_cast<int>(tr.in_steps.front().rows());
      gin.pooled = false;
      gin.steps.assign(static_cast<size_t>(T), Mat());
      Mat carry = Mat::Zero(B, spec.out_dim);
      for (int t = T - 1; t >= 0; --t) {
        const size_t ut = static_cast<size_t>(t);
        const Mat& x = tr.in_steps[ut];
        const Mat& h_prev = tr.h[ut];  // h[t] is the state before step t
        const Mat& z = tr.z[ut];
        const Mat& r = tr.r[ut];
        const Mat& c = tr.hc[ut];
        Mat dh = carry + grad_out.steps[ut];
        Mat dz = (dh.array() * (c.array() - h_prev.array())).matrix();
        Mat dc = (dh.array() * z.array()).matrix();
        Mat dh_prev = (dh.array() * (1.0 - z.array())).matrix();
        Mat dpre_c = (dc.array() * (1.0 - c.array().square())).matrix();
        ps[6].grad += dpre_c.transpose() * x;
        ps[7].grad += dpre_c.transpose() * (r.array() * h_prev.array()).matrix();
        ps[8].grad.col(0) += dpre_c.colwise().sum().transpose();
        Mat drh = dpre_c * Uc;
        Mat dr = (drh.array() * h_prev.array()).matrix();
        dh_prev += (drh.array() * r.array()).matrix();
        Mat dx = dpre_c * Wc;
        Mat dpre_z = (dz.array() * z.array() * (1.0 - z.array())).matrix();
        ps[0].grad += dpre_z.transpose() * x;
        ps[1].grad += dpre_z.transpose() * h_prev;
        ps[2].grad.col(0) += dpre_z.colwise().sum().transpose();
        dh_prev += dpre_z * Uz;
        dx += dpre_z * Wz;
        Mat dpre_r = (dr.array() * r.array() * (1.0 - r.array())).matrix();
        ps[3].grad += dpre_r.transpose() * x;
        ps[4].grad += dpre_r.transpose() * h_prev;
        ps[5].grad.col(0) += dpre_r.colwise().sum().transpose();
        dh_prev += dpre_r * Ur;
        dx += dpre_r * Wr;
        gin.steps[ut] = std::move(dx);
        carry = std::move(dh_prev);
      }
      break;
    }
    case LayerKind::SelfAttentionCls: {
      const Mat& Wk = ps[0].value;
      const Mat& Wv = ps[1].value;
      const Mat& q = ps[2].value;
      const Mat& dout = grad_out.steps.front();
      const int T = static_cast<int>(tr.in_steps.size());
      const int B = static_cast<int>(tr.in_steps.front().rows());
      const double scale = 1.0 / std::sqrt(static_cast<double>(spec.in_dim));
      gin.pooled = false;
      gin.steps.assign(static_cast<size_t>(T), Mat());
      Mat ds(B, T);
      for (int t = 0; t < T; ++t) {
        ds.col(t) = (dout.array() * tr.V[static_cast<size_t>(t)].array()).rowwise().sum().matrix();
      }
      // softmax backward, rowwise
      Vec dot = (ds.array() * tr.alpha.array()).rowwise().sum().matrix();
      Mat dscore = (tr.alpha.array() * (ds.array().colwise() - dot.array())).matrix();
      for (int t = 0; t < T; ++t) {
        const size_t ut = static_cast<size_t>(t);
        Mat dV = (dout.array().colwise() * tr.alpha.col(t).array()).matrix();
        Mat dK = dscore.col(t) * q.col(0).transpose() * scale;
        ps[0].grad += dK.transpose() * tr.in_steps[ut];
        ps[1].grad += dV.transpose() * tr.in_steps[ut];
        ps[2].grad.col(0) += tr.K[ut].transpose() * dscore.col(t) * scale;
        gin.steps[ut] = dK * Wk + dV * Wv;
      }
      break;
    }
    case LayerKind::Flatten: {
      const Mat& dout = grad_out.steps.front();
      const int T = spec.steps;
      gin.pooled = false;
      gin.steps.resize(static_cast<size_t>(T));
      for (int t = 0; t < T; ++t) {
        gin.steps[static_cast<size_t>(t)] = dout.middleCols(t * spec.in_dim, spec.in_dim);
      }
      break;
    }
  }
  return gin;
}

}  // namespace

Mat forward(const Model& m, const SeqBatch& input, Trace* trace,
            bool input_pooled) {
  validate_specs(m.specs);
  if (input.steps.empty()) throw DataError("forward needs at least one step");
  if (input.dim() != m.input_dim()) {
    throw DataError("shape mismatch: input dim " + std::to_string(input.dim()) +
                    " vs model input dim " + std::to_string(m.input_dim()));
  }
  if (input_pooled && input.steps.size() != 1) {
    throw DataError("pooled input must be a single block");
  }
  Feed feed{input.steps, input_pooled};
  if (trace) trace->layers.resize(m.specs.size());
  for (size_t i = 0; i < m.specs.size(); ++i) {
    LayerTrace* tr = trace ? &trace->layers[i] : nullptr;
    if (tr) {
      tr->in_steps = feed.steps;
      tr->pooled_in = feed.pooled;
    }
    feed = forward_layer(m.specs[i], m.params[i], feed, tr);
    if (tr) tr->pooled_out = feed.pooled;
  }
  if (!feed.pooled && feed.steps.size() != 1) {
    throw DataError("model output is an unpooled sequence; add a pooling layer "
                    "or feed single-step input");
  }
  return feed.steps.front();
}

Vec forward_single(const Model& m, const Mat& input, bool input_pooled) {
  SeqBatch b;
  const int T = static_cast<int>(input.rows());
  b.steps.reserve(static_cast<size_t>(T));
  if (input_pooled) {
    b.steps.push_back(input);
  } else {
    for (int t = 0; t < T; ++t) b.steps.push_back(input.row(t));
  }
  Mat out = forward(m, b, nullptr, input_pooled);
  return out.row(0).transpose();
}

void backward(Model& m, const Trace& trace, const Mat& grad_out) {
  if (trace.layers.size() != m.specs.size()) {
    throw DataError("trace does not match model");
  }
  Feed g;
  g.pooled = trace.layers.back().pooled_out;
  g.steps.push_back(grad_out);  // unpooled outputs are single-step by contract
  for (size_t i = m.specs.size(); i-- > 0;) {
    g = backward_layer(m.specs[i], m.params[i], trace.layers[i], g);
  }
}

TripletLossResult triplet_margin_loss_batch(const Mat& a, const Mat& p,
                                            const Mat& n, double margin) {
  if (a.rows() != p.rows() || a.rows() != n.rows() || a.cols() != p.cols() ||
      a.cols() != n.cols()) {
    throw DataError("triplet loss operands must share shape");
  }
  if (margin < 0) throw ConfigError("triplet margin must be >= 0");
  const int B = static_cast<int>(a.rows());
  TripletLossResult res;
  res.grad_a = Mat::Zero(a.rows(), a.cols());
  res.grad_p = Mat::Zero(a.rows(), a.cols());
  res.grad_n = Mat::Zero(a.rows(), a.cols());
  double total = 0;
  const double inv_b = 1.0 / static_cast<double>(B);
  for (int i = 0; i < B; ++i) {
    Vec dap = (a.row(i) - p.row(i)).transpose();
    Vec dan = (a.row(i) - n.row(i)).transpose();
    const double nap = dap.norm();
    const double nan_ = dan.norm();
    const double loss = std::max(0.0, nap - nan_ + margin);
    total += loss;
    if (loss > 0) {
      Vec uap = nap > 1e-12 ? Vec(dap / nap) : Vec(Vec::Zero(dap.size()));
      Vec uan = nan_ > 1e-12 ? Vec(dan / nan_) : Vec(Vec::Zero(dan.size()));
      res.grad_a.row(i) = inv_b * (uap - uan).transpose();
      res.grad_p.row(i) = -inv_b * uap.transpose();
      res.grad_n.row(i) = inv_b * uan.transpose();
    }
  }
  res.mean_loss = total * inv_b;
  return res;
}

double triplet_margin_loss(const Vec& a, const Vec& p, const Vec& n, double margin) {
  TripletLossResult r = triplet_margin_loss_batch(a.transpose(), p.transpose(),
                                                  n.transpose(), margin);
  return r.mean_loss;
}

RankingLossResult ranking_loss_batch(const Vec& s_better, const Vec& s_worse,
                                     double label_noise) {
  if (s_better.size() != s_worse.size()) {
    throw DataError("ranking loss operands must share length");
  }
  if (!(label_noise >= 0.0 && label_noise < 0.5)) {
    throw ConfigError("label_noise must lie in [0, 0.5)");
  }
  const int B = static_cast<int>(s_better.size());
  RankingLossResult res;
  res.grad_better = Vec::Zero(B);
  res.grad_worse = Vec::Zero(B);
  const double eps = label_noise;
  const double inv_b = 1.0 / static_cast<double>(B);
  double total = 0;
  for (int i = 0; i < B; ++i) {
    const double delta = s_better(i) - s_worse(i);
    double log_p, log_1mp, prob;
    if (delta >= 0) {
      const double e = std::exp(-delta);
      log_p = -std::log1p(e);
      log_1mp = -delta + log_p;
      prob = 1.0 / (1.0 + e);
    } else {
      const double e = std::exp(delta);
      log_1mp = -std::log1p(e);
      log_p = delta + log_1mp;
      prob = e / (1.0 + e);
    }
    total += -((1.0 - eps) * log_p + eps * log_1mp);
    const double ddelta = prob - (1.0 - eps);
    res.grad_better(i) = inv_b * ddelta;
    res.grad_worse(i) = -inv_b * ddelta;
  }
  res.mean_loss = total * inv_b;
  return res;
}

double ranking_loss(double score_better, double score_worse, double label_noise) {
  Vec b(1), w(1);
  b(0) = score_better;
  w(0) = score_worse;
  return ranking_loss_batch(b, w, label_noise).mean_loss;
}

AdamState make_adam_state(const Model& m) {
  AdamState s;
  for (const auto& layer : m.params) {
    std::vector<Mat> lm, lv;
    for (const auto& p : layer) {
      lm.push_back(Mat::Zero(p.value.rows(), p.value.cols()));
      lv.push_back(Mat::Zero(p.value.rows(), p.value.cols()));
    }
    s.m.push_back(std::move(lm));
    s.v.push_back(std::move(lv));
  }
  return s;
}

void adam_step(Model& model, AdamState& state, const AdamConfig& cfg) {
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < model.params.size(); ++i) {
    for (size_t j = 0; j < model.params[i].size(); ++j) {
      Mat& g = model.params[i][j].grad;
      Mat& m = state.m[i][j];
      Mat& v = state.v[i][j];
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
      v = (cfg.beta2 * v.array() + (1.0 - cfg.beta2) * g.array().square()).matrix();
      model.params[i][j].value.array() -=
          cfg.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.eps);
    }
  }
}

std::string model_to_json(const Model& m) {
  json specs = json::array();
  for (const auto& s : m.specs) {
    specs.push_back({{"kind", layer_kind_name(s.kind)},
                     {"in_dim", s.in_dim},
                     {"out_dim", s.out_dim},
                     {"act", activation_name(s.act)},
                     {"steps", s.steps}});
  }
  json params = json::array();
  for (const auto& layer : m.params) {
    json jl = json::array();
    for (const auto& p : layer) {
      std::vector<double> data(static_cast<size_t>(p.value.size()));
      for (int i = 0; i < p.value.rows(); ++i) {
        for (int j = 0; j < p.value.cols(); ++j) {
          data[static_cast<size_t>(i * p.value.cols() + j)] = p.value(i, j);
        }
      }
      jl.push_back({{"name", p.name},
                    {"rows", p.value.rows()},
                    {"cols", p.value.cols()},
                    {"data", data}});
    }
    params.push_back(std::move(jl));
  }
  json out{{"format", "l2d-model"}, {"version", 1}, {"specs", specs}, {"params", params}};
  return out.dump();
}

Model model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed model container: ") + e.what());
  }
  if (!j.contains("format") || j["format"] != "l2d-model") {
    throw DataError("not a model container");
  }
  if (j.value("version", 0) != 1) {
    throw DataError("unsupported model container version");
  }
  Model m;
  for (const auto& js : j.at("specs")) {
    LayerSpec s;
    s.kind = parse_layer_kind(js.at("kind").get<std::string>());
    s.in_dim = js.at("in_dim").get<int>();
    s.out_dim = js.at("out_dim").get<int>();
    s.act = parse_activation(js.at("act").get<std::string>());
    s.steps = js.at("steps").get<int>();
    m.specs.push_back(s);
  }
  validate_specs(m.specs);
  for (const auto& jl : j.at("params")) {
    std::vector<ParamTensor> layer;
    for (const auto& jp : jl) {
      ParamTensor p;
      p.name = jp.at("name").get<std::string>();
      const int rows = jp.at("rows").get<int>();
      const int cols = jp.at("cols").get<int>();
      std::vector<double> data = jp.at("data").get<std::vector<double>>();
      if (static_cast<int>(data.size()) != rows * cols) {
        throw DataError("parameter '" + p.name + "' has wrong element count");
      }
      p.value = Mat(rows, cols);
      for (int i = 0; i < rows; ++i) {
        for (int c = 0; c < cols; ++c) {
          p.value(i, c) = data[static_cast<size_t>(i * cols + c)];
        }
      }
      p.grad = Mat::Zero(rows, cols);
      layer.push_back(std::move(p));
    }
    m.params.push_back(std::move(layer));
  }
  if (m.params.size() != m.specs.size()) {
    throw DataError("model container: specs/params length mismatch");
  }
  return m;
}

}  // namespace l2d::nn
