#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "l2d/corpus.hpp"
#include "l2d/encoder.hpp"
#include "l2d/nn.hpp"
#include "l2d/sampling.hpp"

namespace l2d {

struct CriticConfig {
  int hidden_dim = 64;
  double label_noise = 0.1;
  int steps = 20000;
  int batch = 128;
  double lr = 1e-4;
};

struct CriticModel {
  nn::Model net;  // two dense layers over the latent space
  int input_dim = 0;
  CriticConfig config;
  std::string encoder_hash;  // lineage of the encoder this was trained on
};

void validate_critic_config(const CriticConfig& cfg);

CriticModel init_critic(const CriticConfig& cfg, const EncoderModel& encoder,
                        uint64_t seed);

// Preference-pair training in the frozen latent space; the encoder is never
// touched.
CriticModel train_critic(const EncoderModel& encoder, const Corpus& known,
                         const CriticConfig& cfg, uint64_t seed,
                         TrainTrace* trace = nullptr);

// Q(E(segment)).
double score(const CriticModel& critic, const EncoderModel& encoder,
             const Segment& seg);
nn::Vec score_batch(const CriticModel& critic, const EncoderModel& encoder,
                    const std::vector<const Segment*>& segs);

// Throws DataError when the critic was trained against a different encoder.
void verify_lineage(const EncoderModel& encoder, const CriticModel& critic);

std::string critic_content_hash(const CriticModel& model);
std::string critic_to_json(const CriticModel& model,
                           const std::string& extra_json = "");
CriticModel critic_from_json(const std::string& text);

// Fraction of held-out preference pairs ranked correctly.
double pair_accuracy(const CriticModel& critic, const EncoderModel& encoder,
                     const std::vector<PreferencePair>& pairs);

}  // namespace l2d
