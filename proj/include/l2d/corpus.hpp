#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "l2d/errors.hpp"

namespace l2d {

// Ordinal quality grade; rank 0 is the worst tier.
struct QualityTier {
  int rank = 0;
  std::string name;

  friend bool operator==(const QualityTier&, const QualityTier&) = default;
};

// Strictly ordered ladder, ascending rank. Default is bad < okay < good.
using TierLadder = std::vector<QualityTier>;

TierLadder default_ladder();
TierLadder make_ladder(const std::vector<std::string>& names_worst_first);

// At least two tiers, unique names, ranks 0..n-1.
void validate_ladder(const TierLadder& ladder);

struct Trajectory {
  std::string id;
  std::string demonstrator;
  std::optional<QualityTier> label;
  std::vector<std::vector<double>> obs;  // length x obs_dim, all finite

  int length() const { return static_cast<int>(obs.size()); }
};

class Corpus {
 public:
  Corpus() = default;
  Corpus(int obs_dim, TierLadder ladder);

  // Validates dimensions, finiteness and (when present) the label name.
  void add(Trajectory t);

  int obs_dim() const { return obs_dim_; }
  const TierLadder& tiers() const { return tiers_; }
  const std::vector<Trajectory>& trajectories() const { return trajs_; }
  size_t size() const { return trajs_.size(); }
  bool empty() const { return trajs_.empty(); }

  bool fully_labeled() const;

  // Label-free copy handed to scoring paths so evaluation labels cannot
  // leak into anything downstream of training.
  Corpus stripped() const;

  std::optional<QualityTier> find_tier(const std::string& name) const;
  const QualityTier& top_tier() const;

 private:
  int obs_dim_ = 0;
  TierLadder tiers_;
  std::vector<Trajectory> trajs_;
};

// Line-oriented text format: one header record, then one record per
// trajectory. Reals round-trip double precision exactly.
Corpus load_corpus(const std::string& path);
Corpus parse_corpus(const std::string& text, const std::string& origin);
void save_corpus(const Corpus& c, const std::string& path,
                 const std::string& extra_header_json = "");
std::string corpus_to_string(const Corpus& c,
                             const std::string& extra_header_json = "");

enum class SplitMode { Familiar, Unseen };

SplitMode parse_split_mode(const std::string& s);

struct SplitResult {
  Corpus known;
  Corpus unknown;  // labels retained for evaluation
};

// familiar: every demonstrator contributes floor(fraction*n) trajectories
// per tier to known. unseen: demonstrator ids are partitioned disjointly.
SplitResult split_corpus(const Corpus& c, SplitMode mode, double fraction,
                         uint64_t seed);

}  // namespace l2d
