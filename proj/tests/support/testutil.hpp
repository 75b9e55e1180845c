#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l2d/corpus.hpp"
#include "l2d/synthgen.hpp"

namespace testutil {

inline l2d::Trajectory make_traj(const std::string& id, const std::string& demo,
                                 std::optional<l2d::QualityTier> tier, int len,
                                 int obs_dim, double scale = 1.0) {
  l2d::Trajectory t;
  t.id = id;
  t.demonstrator = demo;
  t.label = std::move(tier);
  for (int i = 0; i < len; ++i) {
    std::vector<double> row(static_cast<size_t>(obs_dim));
    for (int j = 0; j < obs_dim; ++j) {
      row[static_cast<size_t>(j)] = scale * (0.01 * i + 0.1 * (j + 1));
    }
    t.obs.push_back(std::move(row));
  }
  return t;
}

// Hand-built labeled corpus: n_demos x 3 tiers x per_cell, obs_dim 4.
inline l2d::Corpus make_tiny_corpus(int n_demos, int per_cell, int len,
                                    int obs_dim = 4) {
  l2d::Corpus c(obs_dim, l2d::default_ladder());
  const auto& ladder = c.tiers();
  for (int d = 0; d < n_demos; ++d) {
    for (const auto& tier : ladder) {
      for (int j = 0; j < per_cell; ++j) {
        const std::string id = "d" + std::to_string(d) + "_" + tier.name + "_" +
                               std::to_string(j);
        c.add(make_traj(id, "d" + std::to_string(d), tier, len + d + j, obs_dim,
                        1.0 + 0.1 * d + 0.01 * j));
      }
    }
  }
  return c;
}

// Small generated corpus for training-oracle tests.
inline l2d::Corpus make_gen_corpus(int n_demos, int per_tier, int min_length,
                                   uint64_t seed) {
  l2d::GenConfig cfg;
  cfg.n_demonstrators = n_demos;
  cfg.per_tier_count = per_tier;
  cfg.obs_dim = 4;
  cfg.min_length = min_length;
  return l2d::generate_corpus(cfg, seed);
}

}  // namespace testutil
