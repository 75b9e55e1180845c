#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "l2d/synthgen.hpp"
#include "support/testutil.hpp"

using namespace l2d;

namespace {

double dist_to_goal(const std::vector<double>& row) {
  auto [gx, gy] = goal_center();
  return std::hypot(row[0] - gx, row[1] - gy);
}

// resample a path onto a fixed-length grid by linear interpolation
std::vector<std::array<double, 2>> resample(const std::vector<std::vector<double>>& obs,
                                            int points) {
  std::vector<std::array<double, 2>> out;
  const int T = static_cast<int>(obs.size());
  for (int i = 0; i < points; ++i) {
    const double u = static_cast<double>(i) / (points - 1) * (T - 1);
    const int lo = std::min(static_cast<int>(u), T - 2);
    const double f = u - lo;
    out.push_back({(1 - f) * obs[lo][0] + f * obs[lo + 1][0],
                   (1 - f) * obs[lo][1] + f * obs[lo + 1][1]});
  }
  return out;
}

}  // namespace

TEST_CASE("corpus shape matches the protocol: 6 demonstrators x 3 tiers x 50") {
  GenConfig cfg;
  cfg.per_tier_count = 50;
  Corpus c = generate_corpus(cfg, 42);
  CHECK(c.size() == 900);
  std::map<std::string, int> per_demo;
  for (const auto& t : c.trajectories()) per_demo[t.demonstrator]++;
  CHECK(per_demo.size() == 6);
  for (const auto& [d, n] : per_demo) CHECK(n == 150);
  CHECK(c.fully_labeled());
}

TEST_CASE("every trajectory ends inside the goal region, regardless of tier") {
  Corpus c = testutil::make_gen_corpus(4, 6, 96, 7);
  for (const auto& t : c.trajectories()) {
    CHECK(dist_to_goal(t.obs.back()) < goal_radius());
    CHECK(t.length() >= 96);
  }
}

TEST_CASE("noise-free quality params collapse to one path per style") {
  Style style{0.2, +1, 0.012};
  QualityParams zero{0.0, 0.0, 0.0, 0.0};
  Rng r1(1), r2(99);
  auto a = rollout(style, zero, 4, 96, r1);
  auto b = rollout(style, zero, 4, 96, r2);
  CHECK(a == b);  // stochastic channels all scale with the quality knobs

  // noise-free length is the style-determined minimum
  for (uint64_t s = 0; s < 20; ++s) {
    QualityParams noisy{0.05, 0.4, 0.3, 0.4};
    Rng rn(100 + s);
    auto n = rollout(style, noisy, 4, 96, rn);
    CHECK(n.size() >= a.size());
  }

  // a different style gives a different path
  Style other{-0.2, -1, 0.012};
  Rng r3(1);
  auto c = rollout(other, zero, 4, 96, r3);
  CHECK(a != c);
}

TEST_CASE("detour side separates mean paths well beyond jitter") {
  // derived oracle: mean paths over 100 rollouts differ by > 5 x jitter_std
  Style left{0.0, +1, 0.012};
  Style right{0.0, -1, 0.012};
  QualityParams qp{0.02, 1.0, 0.0, 0.0};  // always detour
  const int n = 100, grid = 100;
  std::vector<std::array<double, 2>> mean_l(grid, {0, 0}), mean_r(grid, {0, 0});
  for (int i = 0; i < n; ++i) {
    Rng rl(1000 + static_cast<uint64_t>(i)), rr(1000 + static_cast<uint64_t>(i));
    auto pl = resample(rollout(left, qp, 4, 96, rl), grid);
    auto pr = resample(rollout(right, qp, 4, 96, rr), grid);
    for (int g = 0; g < grid; ++g) {
      mean_l[g][0] += pl[g][0] / n;
      mean_l[g][1] += pl[g][1] / n;
      mean_r[g][0] += pr[g][0] / n;
      mean_r[g][1] += pr[g][1] / n;
    }
  }
  double max_diff = 0;
  for (int g = 0; g < grid; ++g) {
    max_diff = std::max({max_diff, std::abs(mean_l[g][0] - mean_r[g][0]),
                         std::abs(mean_l[g][1] - mean_r[g][1])});
  }
  CHECK(max_diff > 5.0 * qp.jitter_std);
}

TEST_CASE("expected path length is non-increasing in tier rank per demonstrator") {
  Corpus c = testutil::make_gen_corpus(4, 30, 96, 11);
  std::map<std::string, std::map<int, double>> mean_len;
  std::map<std::string, std::map<int, int>> count;
  for (const auto& t : c.trajectories()) {
    mean_len[t.demonstrator][t.label->rank] += t.length();
    count[t.demonstrator][t.label->rank]++;
  }
  for (auto& [d, by_rank] : mean_len) {
    for (auto& [r, sum] : by_rank) sum /= count[d][r];
    CHECK(by_rank[0] >= by_rank[1]);
    CHECK(by_rank[1] >= by_rank[2]);
  }
}

TEST_CASE("generation is deterministic and seed-sensitive") {
  GenConfig cfg;
  cfg.n_demonstrators = 3;
  cfg.per_tier_count = 2;
  Corpus a = generate_corpus(cfg, 5);
  Corpus b = generate_corpus(cfg, 5);
  Corpus c = generate_corpus(cfg, 6);
  CHECK(corpus_to_string(a) == corpus_to_string(b));
  CHECK(corpus_to_string(a) != corpus_to_string(c));
}

TEST_CASE("obs_dim beyond 4 pads with zeros") {
  GenConfig cfg;
  cfg.n_demonstrators = 2;
  cfg.per_tier_count = 1;
  cfg.obs_dim = 6;
  Corpus c = generate_corpus(cfg, 3);
  for (const auto& t : c.trajectories()) {
    for (const auto& row : t.obs) {
      CHECK(row[4] == 0.0);
      CHECK(row[5] == 0.0);
    }
  }
}

TEST_CASE("tier parameter table is monotone in tier") {
  for (int n : {2, 3, 4, 5}) {
    for (int r = 0; r + 1 < n; ++r) {
      QualityParams lo = default_tier_params(r, n);
      QualityParams hi = default_tier_params(r + 1, n);
      CHECK(lo.jitter_std >= hi.jitter_std);
      CHECK(lo.detour_prob >= hi.detour_prob);
      CHECK(lo.pause_prob >= hi.pause_prob);
      CHECK(lo.overshoot_gain >= hi.overshoot_gain);
    }
  }
  // canonical 3-tier values
  QualityParams bad = default_tier_params(0, 3);
  CHECK(bad.jitter_std == 0.08);
  CHECK(bad.detour_prob == 0.5);
  CHECK(bad.pause_prob == 0.3);
  CHECK(bad.overshoot_gain == 0.5);
  QualityParams good = default_tier_params(2, 3);
  CHECK(good.jitter_std == 0.01);
  CHECK(good.detour_prob == 0.0);
}

TEST_CASE("generator preconditions") {
  GenConfig cfg;
  cfg.n_demonstrators = 1;
  CHECK_THROWS_AS(generate_corpus(cfg, 1), ConfigError);
  cfg.n_demonstrators = 2;
  cfg.per_tier_count = 0;
  CHECK_THROWS_AS(generate_corpus(cfg, 1), ConfigError);
  cfg.per_tier_count = 1;
  cfg.obs_dim = 3;
  CHECK_THROWS_AS(generate_corpus(cfg, 1), ConfigError);
}
