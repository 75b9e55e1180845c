#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "l2d/corpus.hpp"
#include "l2d/rng.hpp"

namespace l2d {

enum class Region { Initial, Final, Interior };

std::string region_name(Region r);

// Contiguous window of a trajectory. Rows are augmented observations; when
// position encoding is on the last column is t/T of the source trajectory,
// strictly increasing within the segment.
struct Segment {
  std::string source_id;
  int start = 0;
  Eigen::MatrixXd steps;  // length x dim
  Region region = Region::Interior;
  std::optional<QualityTier> tier;

  int length() const { return static_cast<int>(steps.rows()); }
  int dim() const { return static_cast<int>(steps.cols()); }
};

enum class Strategy { S1, S2 };

struct Triplet {
  Segment anchor, positive, negative;
  Strategy strategy = Strategy::S1;
};

struct PreferencePair {
  Segment better, worse;
};

struct SamplerConfig {
  int segment_len = 48;  // L1
  int initial_len = 12;
  int final_len = 6;
  bool position_encoding = true;
};

// [o_t, t/T] with t zero-based and T = trajectory length, so t/T in [0, 1).
std::vector<std::vector<double>> augment_with_position(const Trajectory& traj);

// ceil((L / L1) * k), evaluated in exact integer arithmetic.
int64_t segment_budget(int64_t L, int64_t L1, int64_t k);

// Uniform random window of the given length; region classified per config.
Segment sample_segment(const Trajectory& traj, int length,
                       const SamplerConfig& cfg, Rng& rng);

// Monotone piecewise-linear resampling along the time axis with fixed
// endpoints; interior sample times move by at most +-max_warp of a step.
Segment time_warp(const Segment& seg, double max_warp, Rng& rng);

struct S2Options {
  bool initial = true;
  bool final_region = true;
};

// Precomputed per-trajectory matrices for fast repeated window extraction;
// all triplet/pair sampling runs through this.
class SegmentSampler {
 public:
  SegmentSampler(const Corpus& corpus, SamplerConfig cfg);

  const SamplerConfig& config() const { return cfg_; }
  const Corpus& corpus() const { return *corpus_; }
  int input_dim() const;

  // Deterministic window of a cached trajectory.
  Segment window(size_t traj_idx, int start, int length) const;
  Segment sample_window(size_t traj_idx, int length, Rng& rng) const;

  // Strategy 1: anchor/positive from distinct trajectories of one uniformly
  // chosen tier, negative from a uniformly chosen different tier; length L1.
  Triplet sample_triplet_s1(Rng& rng) const;

  // Strategy 2: anchor/positive are the region-aligned windows of two
  // distinct trajectories from arbitrary tiers; negative is an interior
  // window of matching length from any trajectory.
  Triplet sample_triplet_s2(const S2Options& opts, Rng& rng) const;

  // Better/worse segments of length L1 from a uniformly chosen ordered tier
  // pair (better tier strictly above worse).
  PreferencePair sample_preference_pair(Rng& rng) const;

  size_t size() const { return mats_.size(); }
  int traj_length(size_t idx) const { return static_cast<int>(mats_[idx].rows()); }
  const std::vector<size_t>& tier_members(int rank) const;

 private:
  const Corpus* corpus_;
  SamplerConfig cfg_;
  std::vector<Eigen::MatrixXd> mats_;
  std::vector<std::vector<size_t>> by_tier_;  // rank -> trajectory indices
};

}  // namespace l2d
