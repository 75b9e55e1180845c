#include "l2d/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace l2d {

std::string region_name(Region r) {
  switch (r) {
    case Region::Initial: return "initial";
    case Region::Final: return "final";
    case Region::Interior: return "interior";
  }
  return "interior";
}

std::vector<std::vector<double>> augment_with_position(const Trajectory& traj) {
  const int T = traj.length();
  if (T < 1) throw DataError("cannot position-encode an empty trajectory");
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<size_t>(T));
  for (int t = 0; t < T; ++t) {
    std::vector<double> row = traj.obs[static_cast<size_t>(t)];
    row.push_back(static_cast<double>(t) / static_cast<double>(T));
    out.push_back(std::move(row));
  }
  return out;
}

int64_t segment_budget(int64_t L, int64_t L1, int64_t k) {
  if (L1 < 1 || k < 1 || L < L1) {
    throw ConfigError("segment_budget requires L >= L1 >= 1 and k >= 1");
  }
  return (L * k + L1 - 1) / L1;
}

namespace {

Region classify_region(int start, int length, int traj_len,
                       const SamplerConfig& cfg) {
  if (start == 0 && length == cfg.initial_len) return Region::Initial;
  if (start + length == traj_len && length == cfg.final_len) return Region::Final;
  return Region::Interior;
}

Eigen::MatrixXd traj_matrix(const Trajectory& traj, bool position_encoding) {
  const int T = traj.length();
  const int d = static_cast<int>(traj.obs.front().size());
  Eigen::MatrixXd m(T, position_encoding ? d + 1 : d);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < d; ++j) m(t, j) = traj.obs[static_cast<size_t>(t)][static_cast<size_t>(j)];
    if (position_encoding) m(t, d) = static_cast<double>(t) / static_cast<double>(T);
  }
  return m;
}

}  // namespace

Segment sample_segment(const Trajectory& traj, int length,
                       const SamplerConfig& cfg, Rng& rng) {
  if (length < 1) throw ConfigError("segment length must be >= 1");
  const int T = traj.length();
  if (T < length) {
    throw DataError("trajectory '" + traj.id + "' too short: length " +
                    std::to_string(T) + " < segment length " +
                    std::to_string(length));
  }
  const int start = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(T - length + 1)));
  Eigen::MatrixXd m = traj_matrix(traj, cfg.position_encoding);
  Segment seg;
  seg.source_id = traj.id;
  seg.start = start;
  seg.steps = m.middleRows(start, length);
  seg.region = classify_region(start, length, T, cfg);
  seg.tier = traj.label;
  return seg;
}

Segment time_warp(const Segment& seg, double max_warp, Rng& rng) {
  const int n = seg.length();
  if (n < 3) throw DataError("time_warp needs a segment of length >= 3");
  if (max_warp < 0) throw ConfigError("max_warp must be >= 0");
  std::vector<double> times(static_cast<size_t>(n));
  times.front() = 0.0;
  times.back() = static_cast<double>(n - 1);
  for (int i = 1; i < n - 1; ++i) {
    times[static_cast<size_t>(i)] = i + rng.uniform(-max_warp, max_warp);
  }
  // keep the warp monotone and inside the original support
  std::sort(times.begin(), times.end());
  for (double& t : times) t = std::clamp(t, 0.0, static_cast<double>(n - 1));

  Segment out = seg;
  for (int i = 0; i < n; ++i) {
    const double u = times[static_cast<size_t>(i)];
    const int lo = std::min(static_cast<int>(std::floor(u)), n - 2);
    const double frac = u - lo;
    out.steps.row(i) = (1.0 - frac) * seg.steps.row(lo) + frac * seg.steps.row(lo + 1);
  }
  return out;
}

SegmentSampler::SegmentSampler(const Corpus& corpus, SamplerConfig cfg)
    : corpus_(&corpus), cfg_(cfg) {
  if (cfg_.segment_len < 1 || cfg_.initial_len < 1 || cfg_.final_len < 1) {
    throw ConfigError("segment lengths must be >= 1");
  }
  by_tier_.resize(corpus.tiers().size());
  const auto& trajs = corpus.trajectories();
  mats_.reserve(trajs.size());
  for (size_t i = 0; i < trajs.size(); ++i) {
    mats_.push_back(traj_matrix(trajs[i], cfg_.position_encoding));
    if (trajs[i].label) {
      by_tier_[static_cast<size_t>(trajs[i].label->rank)].push_back(i);
    }
  }
}

int SegmentSampler::input_dim() const {
  return corpus_->obs_dim() + (cfg_.position_encoding ? 1 : 0);
}

const std::vector<size_t>& SegmentSampler::tier_members(int rank) const {
  return by_tier_.at(static_cast<size_t>(rank));
}

Segment SegmentSampler::window(size_t traj_idx, int start, int length) const {
  const auto& traj = corpus_->trajectories()[traj_idx];
  const int T = traj.length();
  if (start < 0 || start + length > T) {
    throw DataError("window out of range for trajectory '" + traj.id + "'");
  }
  Segment seg;
  seg.source_id = traj.id;
  seg.start = start;
  seg.steps = mats_[traj_idx].middleRows(start, length);
  seg.region = classify_region(start, length, T, cfg_);
  seg.tier = traj.label;
  return seg;
}

Segment SegmentSampler::sample_window(size_t traj_idx, int length, Rng& rng) const {
  const int T = traj_length(traj_idx);
  if (T < length) {
    throw DataError("trajectory '" + corpus_->trajectories()[traj_idx].id +
                    "' too short: length " + std::to_string(T) +
                    " < segment length " + std::to_string(length));
  }
  const int start = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(T - length + 1)));
  return window(traj_idx, start, length);
}

Triplet SegmentSampler::sample_triplet_s1(Rng& rng) const {
  std::vector<int> anchor_tiers;  // tiers with >= 2 trajectories
  std::vector<int> tiers_present;
  for (size_t r = 0; r < by_tier_.size(); ++r) {
    if (by_tier_[r].size() >= 2) anchor_tiers.push_back(static_cast<int>(r));
    if (!by_tier_[r].empty()) tiers_present.push_back(static_cast<int>(r));
  }
  if (anchor_tiers.empty() || tiers_present.size() < 2) {
    throw DataError("insufficient data for S1 triplets: need a tier with >= 2 "
                    "trajectories and a second non-empty tier");
  }
  const int tier = anchor_tiers[rng.uniform_int(anchor_tiers.size())];
  const auto& members = by_tier_[static_cast<size_t>(tier)];
  const size_t ai = members[rng.uniform_int(members.size())];
  size_t pi = ai;
  while (pi == ai) pi = members[rng.uniform_int(members.size())];

  std::vector<int> neg_tiers;
  for (int r : tiers_present) {
    if (r != tier) neg_tiers.push_back(r);
  }
  const int ntier = neg_tiers[rng.uniform_int(neg_tiers.size())];
  const auto& nmembers = by_tier_[static_cast<size_t>(ntier)];
  const size_t ni = nmembers[rng.uniform_int(nmembers.size())];

  Triplet t;
  t.strategy = Strategy::S1;
  t.anchor = sample_window(ai, cfg_.segment_len, rng);
  t.positive = sample_window(pi, cfg_.segment_len, rng);
  t.negative = sample_window(ni, cfg_.segment_len, rng);
  return t;
}

Triplet SegmentSampler::sample_triplet_s2(const S2Options& opts, Rng& rng) const {
  if (!opts.initial && !opts.final_region) {
    throw ConfigError("S2 sampling needs at least one of the initial/final regions");
  }
  const size_t n = mats_.size();
  if (n < 2) throw DataError("insufficient data for S2 triplets: need >= 2 trajectories");

  std::vector<Region> regions;
  if (opts.initial) regions.push_back(Region::Initial);
  if (opts.final_region) regions.push_back(Region::Final);
  const Region region = regions[rng.uniform_int(regions.size())];
  const int len = region == Region::Initial ? cfg_.initial_len : cfg_.final_len;

  const size_t t1 = rng.uniform_int(n);
  size_t t2 = t1;
  while (t2 == t1) t2 = rng.uniform_int(n);

  auto region_window = [&](size_t idx) {
    const int T = traj_length(idx);
    if (T < cfg_.initial_len + cfg_.final_len) {
      throw DataError("trajectory '" + corpus_->trajectories()[idx].id +
                      "' too short for region-aligned S2 sampling");
    }
    return region == Region::Initial ? window(idx, 0, len)
                                     : window(idx, T - len, len);
  };

  Triplet t;
  t.strategy = Strategy::S2;
  t.anchor = region_window(t1);
  t.positive = region_window(t2);

  // Interior negative of matching length, from any trajectory. Starts are
  // kept clear of both region-aligned zones so a negative never nearly
  // coincides with a region window.
  const size_t tn = rng.uniform_int(n);
  const int Tn = traj_length(tn);
  int lo = cfg_.initial_len;
  int hi = Tn - len - cfg_.final_len;
  if (hi < lo) {
    lo = 1;
    hi = Tn - len - 1;  // fallback for short trajectories
  }
  if (hi < lo) {
    throw DataError("trajectory '" + corpus_->trajectories()[tn].id +
                    "' too short for an interior negative");
  }
  const int start = lo + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(hi - lo + 1)));
  t.negative = window(tn, start, len);
  return t;
}

PreferencePair SegmentSampler::sample_preference_pair(Rng& rng) const {
  std::vector<std::pair<int, int>> ordered;  // (better rank, worse rank)
  for (size_t hi = 0; hi < by_tier_.size(); ++hi) {
    if (by_tier_[hi].empty()) continue;
    for (size_t lo = 0; lo < hi; ++lo) {
      if (by_tier_[lo].empty()) continue;
      ordered.push_back({static_cast<int>(hi), static_cast<int>(lo)});
    }
  }
  if (ordered.empty()) {
    throw DataError("insufficient data for preference pairs: need >= 2 "
                    "non-empty tiers");
  }
  const auto [hi, lo] = ordered[rng.uniform_int(ordered.size())];
  const auto& better_members = by_tier_[static_cast<size_t>(hi)];
  const auto& worse_members = by_tier_[static_cast<size_t>(lo)];
  PreferencePair p;
  p.better = sample_window(better_members[rng.uniform_int(better_members.size())],
                           cfg_.segment_len, rng);
  p.worse = sample_window(worse_members[rng.uniform_int(worse_members.size())],
                          cfg_.segment_len, rng);
  return p;
}

}  // namespace l2d
