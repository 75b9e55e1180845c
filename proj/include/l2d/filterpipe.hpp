#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "l2d/corpus.hpp"
#include "l2d/critic.hpp"
#include "l2d/encoder.hpp"
#include "l2d/gmm.hpp"

namespace l2d {

struct TrajectoryScoreReport {
  std::string id;
  std::vector<double> segment_scores;
  std::vector<QualityTier> assignments;
  double good_fraction = 0;  // share of segments assigned to the top tier
  double score_mean = 0;
  double score_var = 0;
};

// Samples segment_budget(L, L1, k) segments (uniform starts per seed, or an
// even stride partition), scores and assigns each, and aggregates the vote.
TrajectoryScoreReport score_trajectory(const EncoderModel& encoder,
                                       const CriticModel& critic,
                                       const QualityGMM& gmm,
                                       const Trajectory& traj, int k,
                                       uint64_t seed,
                                       bool stride_partition = false);

// Rank by good_fraction desc, then score mean desc, then score variance asc,
// then id; returns the first top_k ids.
std::vector<std::string> select_top(const std::vector<TrajectoryScoreReport>& reports,
                                    int top_k);

std::string report_to_json(const TrajectoryScoreReport& r);
TrajectoryScoreReport report_from_json(const std::string& text,
                                       const TierLadder& ladder);

}  // namespace l2d
