#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "l2d/corpus.hpp"
#include "l2d/rng.hpp"

namespace l2d {

// Noise knobs per quality tier. Monotone in tier: worse tiers get larger
// values on every knob.
struct QualityParams {
  double jitter_std = 0.0;
  double detour_prob = 0.0;
  double pause_prob = 0.0;
  double overshoot_gain = 0.0;
};

// Per-demonstrator execution style, constant across that demonstrator's
// tiers. Curvature is signed; detour side is +1 (left of travel) or -1.
struct Style {
  double approach_curvature = 0.0;
  int preferred_detour_side = +1;
  double base_speed = 0.012;
};

struct DemonstratorProfile {
  std::string id;
  Style style;
  std::vector<QualityParams> tier_params;  // indexed by tier rank
};

struct GenConfig {
  int n_demonstrators = 6;
  int per_tier_count = 50;
  int obs_dim = 4;
  int min_length = 96;  // trajectories are padded in the goal hold to this
  TierLadder ladder = default_ladder();
};

// Default knob table; the 3-tier ladder gets the canonical values
// (bad/okay/good jitter 0.08/0.04/0.01 etc.), other ladder sizes
// interpolate between the bad and good endpoints.
QualityParams default_tier_params(int rank, int n_tiers);

DemonstratorProfile make_profile(int index, const TierLadder& ladder, const Rng& root);

// One reach->grasp->place execution. Observation rows are
// [agent_x, agent_y, objrel_x, objrel_y, 0...] padded to obs_dim.
std::vector<std::vector<double>> rollout(const Style& style,
                                         const QualityParams& qp, int obs_dim,
                                         int min_length, Rng& rng);

// Labeled corpus: per_tier_count trajectories per (demonstrator, tier).
Corpus generate_corpus(const GenConfig& cfg, uint64_t seed);

// Task layout; every generated trajectory terminates inside the goal region.
std::pair<double, double> goal_center();
double goal_radius();

}  // namespace l2d
