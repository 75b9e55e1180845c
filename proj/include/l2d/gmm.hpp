#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "l2d/corpus.hpp"
#include "l2d/critic.hpp"
#include "l2d/encoder.hpp"

namespace l2d {

struct TierComponent {
  QualityTier tier;
  double mean = 0;
  double var = 0;     // >= variance floor
  double weight = 0;  // in (0,1], weights sum to 1
};

struct QualityGMM {
  std::vector<TierComponent> components;  // ascending rank
  double variance_floor = 1e-6;
  bool weighted = true;  // include component weights in assignment

  const TierComponent& component(int rank) const;
};

// Per-tier maximum likelihood fit from pooled score sets: sample mean,
// population variance (floored), weight = count fraction.
QualityGMM fit_from_scores(const std::map<int, std::vector<double>>& by_rank,
                           const TierLadder& ladder, bool weighted = true,
                           double variance_floor = 1e-6);

// Samples ceil(L/L1 * k) segments per trajectory, scores them, pools by the
// trajectory's tier, and fits one Gaussian per tier.
QualityGMM fit_quality_gmm(const EncoderModel& encoder, const CriticModel& critic,
                           const Corpus& known, int k, uint64_t seed,
                           bool weighted = true);

// argmax over tiers of w_t N(x; mu_t, var_t) in log space; exact ties go to
// the better tier.
QualityTier assign(const QualityGMM& g, double x);

double log_component_density(const QualityGMM& g, int rank, double x);

std::string gmm_to_json(const QualityGMM& g, const std::string& extra_json = "");
QualityGMM gmm_from_json(const std::string& text);

}  // namespace l2d
