#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "l2d/errors.hpp"
#include "l2d/rng.hpp"

namespace l2d::nn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class LayerKind { Recurrent, Dense, SelfAttentionCls, Flatten };
enum class Activation { Tanh, Relu, Identity };

std::string layer_kind_name(LayerKind k);
LayerKind parse_layer_kind(const std::string& s);
std::string activation_name(Activation a);
Activation parse_activation(const std::string& s);

struct LayerSpec {
  LayerKind kind = LayerKind::Dense;
  int in_dim = 0;
  int out_dim = 0;
  Activation act = Activation::Identity;
  int steps = 0;  // Flatten only: required sequence length

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct ParamTensor {
  std::string name;
  Mat value;
  Mat grad;  // same shape, zeroed between steps
};

struct Model {
  std::vector<LayerSpec> specs;
  std::vector<std::vector<ParamTensor>> params;  // parallel to specs

  int input_dim() const { return specs.empty() ? 0 : specs.front().in_dim; }
  int output_dim() const;
  bool operator==(const Model& o) const;
};

// Parameters drawn uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
Model build_model(const std::vector<LayerSpec>& specs, Rng& rng);
void zero_grads(Model& m);
size_t param_count(const Model& m);

// Batch of equal-length sequences, time-major: steps[t] is batch x dim.
struct SeqBatch {
  std::vector<Mat> steps;

  int length() const { return static_cast<int>(steps.size()); }
  int batch() const { return steps.empty() ? 0 : static_cast<int>(steps.front().rows()); }
  int dim() const { return steps.empty() ? 0 : static_cast<int>(steps.front().cols()); }
};

// Intermediate values cached by forward for use in backward.
struct LayerTrace {
  std::vector<Mat> in_steps;  // layer input sequence (or single pooled block)
  std::vector<Mat> preact;    // dense: pre-activation per step
  std::vector<Mat> h, z, r, hc;  // recurrent gate traces
  std::vector<Mat> K, V;         // attention projections per step
  Mat alpha;                     // attention weights, batch x T
  bool pooled_in = false;
  bool pooled_out = false;
};

struct Trace {
  std::vector<LayerTrace> layers;
};

// Sequence (or pooled block, when the stack starts past pooling) in,
// batch x out_dim block out. trace may be null for inference.
Mat forward(const Model& m, const SeqBatch& input, Trace* trace,
            bool input_pooled = false);

// Single-sample convenience: input is steps x dim, returns the output vector.
Vec forward_single(const Model& m, const Mat& input, bool input_pooled = false);

// Accumulates parameter gradients (and nothing else) for a traced forward.
void backward(Model& m, const Trace& trace, const Mat& grad_out);

// max(0, |a-p| - |a-n| + margin), averaged over the batch rows.
struct TripletLossResult {
  double mean_loss = 0;
  Mat grad_a, grad_p, grad_n;  // d(mean loss)/d(embedding)
};
TripletLossResult triplet_margin_loss_batch(const Mat& a, const Mat& p,
                                            const Mat& n, double margin);
double triplet_margin_loss(const Vec& a, const Vec& p, const Vec& n, double margin);

// -[(1-eps) ln P + eps ln(1-P)] with P = sigma(s_b - s_w), stable at large
// score gaps. eps in [0, 0.5).
struct RankingLossResult {
  double mean_loss = 0;
  Vec grad_better, grad_worse;
};
RankingLossResult ranking_loss_batch(const Vec& s_better, const Vec& s_worse,
                                     double label_noise);
double ranking_loss(double score_better, double score_worse, double label_noise);

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<Mat>> m, v;
  int64_t t = 0;
};

AdamState make_adam_state(const Model& m);
void adam_step(Model& model, AdamState& state, const AdamConfig& cfg);

// Versioned self-describing container; decimal reals round-trip bit-exactly.
std::string model_to_json(const Model& m);
Model model_from_json(const std::string& text);

}  // namespace l2d::nn
