#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "l2d/corpus.hpp"
#include "l2d/critic.hpp"
#include "l2d/encoder.hpp"
#include "l2d/synthgen.hpp"

namespace l2d {

// Every knob of the pipeline, echoed verbatim into output artifacts.
struct RunConfig {
  // generation
  int obs_dim = 4;
  std::string tiers = "bad,okay,good";  // worst first
  int n_demonstrators = 6;
  int per_tier_count = 50;
  int min_length = 96;
  // split
  std::string split_mode = "unseen";
  double split_fraction = 0.5;
  // sampling
  int segment_len = 48;
  int initial_len = 12;
  int final_len = 6;
  int k = 2;
  bool position_encoding = true;
  bool s1 = true;
  bool s2_initial = true;
  bool s2_final = true;
  bool time_warp = true;
  double max_warp = 0.5;
  double s1_s2_ratio = 1.0;
  // models / optimization
  std::string arch = "attention";
  int latent_dim = 12;
  int hidden_dim = 32;
  int critic_hidden = 64;
  double lr = 1e-4;
  double margin = 1.0;
  double label_noise = 0.1;
  int encoder_steps = 20000;
  int critic_steps = 20000;
  int batch = 128;
  int num_segments = 2000;
  // scoring / evaluation
  int n_segments_per_tier = 1000;
  bool normalize_scores = true;
  bool weighted_assign = true;
  bool stride_partition = false;
  int top_k = 50;
  int hist_bins = 20;
  uint64_t seed = 0;
};

// "key = value" lines, '#' comments; unknown keys are config errors.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});
void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value);

// Checked against module preconditions before any work happens.
void validate_config(const RunConfig& cfg);

TierLadder config_ladder(const RunConfig& cfg);
GenConfig gen_config(const RunConfig& cfg);
EncoderConfig encoder_config(const RunConfig& cfg);
CriticConfig critic_config(const RunConfig& cfg);

// Deterministic key=value rendering (one line), and a JSON object string for
// artifact embedding.
std::string config_echo_text(const RunConfig& cfg);
std::string config_json(const RunConfig& cfg);

}  // namespace l2d
