#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "l2d/corpus.hpp"
#include "l2d/nn.hpp"
#include "l2d/sampling.hpp"

namespace l2d {

struct EncoderConfig {
  int latent_dim = 12;
  int hidden_dim = 32;
  int segment_len = 48;
  int initial_len = 12;
  int final_len = 6;
  bool position_encoding = true;
  bool s1 = true;
  bool s2_initial = true;
  bool s2_final = true;
  bool time_warp = false;
  double max_warp = 0.5;
  double s1_s2_ratio = 1.0;  // P(S1) = r / (1 + r) among enabled strategies
  int steps = 20000;
  int batch = 128;
  double lr = 1e-4;
  double margin = 1.0;
  int num_segments = 2000;  // pre-sampled S1 segment bank size
  std::string arch = "attention";  // or "flatten"

  bool s2_enabled() const { return s2_initial || s2_final; }
  SamplerConfig sampler() const {
    return {segment_len, initial_len, final_len, position_encoding};
  }
};

struct EncoderModel {
  nn::Model net;
  int latent_dim = 0;
  int input_dim = 0;
  EncoderConfig config;  // training-config echo
};

struct TrainTrace {
  std::vector<double> loss;  // per optimizer step
};

// Throws ConfigError on invalid combinations (no strategy enabled with
// steps > 0, flatten arch with mixed segment lengths, ...).
void validate_encoder_config(const EncoderConfig& cfg);

// Randomly initialized model without any training steps.
EncoderModel init_encoder(const EncoderConfig& cfg, int obs_dim, uint64_t seed);

EncoderModel train_encoder(const Corpus& known, const EncoderConfig& cfg,
                           uint64_t seed, TrainTrace* trace = nullptr);

// Q = E(segment); deterministic, finite, length latent_dim.
nn::Vec encode(const EncoderModel& model, const Segment& seg);

// Equal-length segments embedded in one pass; rows follow input order.
nn::Mat encode_batch(const EncoderModel& model,
                     const std::vector<const Segment*>& segs);

// Lineage key: hash of the serialized network plus dimensions.
std::string encoder_content_hash(const EncoderModel& model);

std::string encoder_to_json(const EncoderModel& model,
                            const std::string& extra_json = "");
EncoderModel encoder_from_json(const std::string& text);

// Fraction of triplets with |E(a)-E(p)| < |E(a)-E(n)|.
double triplet_satisfaction(const EncoderModel& model,
                            const std::vector<Triplet>& triplets);

}  // namespace l2d
