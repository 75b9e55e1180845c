#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "l2d/corpus.hpp"
#include "l2d/critic.hpp"
#include "l2d/encoder.hpp"

namespace l2d {

// Exact 1-Wasserstein distance between the empirical distributions, by the
// merged-quantile breakpoint method. For equal sizes this equals
// mean |sorted x_i - sorted y_i|.
double wasserstein_1d(std::vector<double> xs, std::vector<double> ys);

struct SeparabilityReport {
  struct Entry {
    std::string tier_a, tier_b;  // tier_a ranks above tier_b
    double distance = 0;
  };
  std::vector<Entry> pairwise;  // better-vs-worse pairs, best first
  double total = 0;
};

// Samples n segments per tier from the labeled evaluation corpus, scores
// them, and reports all pairwise tier distances plus their sum. With
// normalize on, scores are z-scored over the pooled sample first so
// ablation comparisons are scale-free.
SeparabilityReport separability_report(const EncoderModel& encoder,
                                       const CriticModel& critic,
                                       const Corpus& labeled_eval,
                                       int n_segments_per_tier, uint64_t seed,
                                       bool normalize = true);

std::string separability_to_text(const SeparabilityReport& r,
                                 const std::vector<std::string>& header_lines = {});

struct SelectionConfusion {
  std::vector<std::pair<QualityTier, int>> counts;  // ascending rank
  int top_k = 0;

  int count_for(int rank) const;
};

SelectionConfusion selection_confusion(const std::vector<std::string>& selected_ids,
                                       const Corpus& labeled);

std::string confusion_to_text(const SelectionConfusion& c,
                              const std::vector<std::string>& header_lines = {});

// Equal-width bins over the pooled [min, max]; one row per (tier, bin).
std::string histogram_to_text(const std::map<std::string, std::vector<double>>& by_tier,
                              int bins,
                              const std::vector<std::string>& header_lines = {});
void export_histogram(const std::map<std::string, std::vector<double>>& by_tier,
                      int bins, const std::string& path,
                      const std::vector<std::string>& header_lines = {});

// Per-tier critic scores of sampled segments (the histogram/separability raw
// material).
std::map<std::string, std::vector<double>> tier_scores(
    const EncoderModel& encoder, const CriticModel& critic,
    const Corpus& labeled_eval, int n_segments_per_tier, uint64_t seed);

}  // namespace l2d
