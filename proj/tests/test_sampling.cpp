#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "l2d/sampling.hpp"
#include "support/testutil.hpp"

using namespace l2d;
using testutil::make_traj;
using testutil::make_tiny_corpus;

TEST_CASE("position encoding is t/T with zero-based t") {
  Trajectory t = make_traj("a", "d", std::nullopt, 100, 2);
  t.obs[50] = {1.0, 2.0};
  auto aug = augment_with_position(t);
  REQUIRE(aug.size() == 100);
  REQUIRE(aug[50].size() == 3);
  CHECK(aug[50] == std::vector<double>{1.0, 2.0, 0.5});
  CHECK(aug[0][2] == 0.0);
  CHECK(aug[99][2] == doctest::Approx(0.99).epsilon(1e-12));
  for (const auto& row : aug) {
    CHECK(row[2] >= 0.0);
    CHECK(row[2] < 1.0);
  }
}

TEST_CASE("segment budget formula") {
  CHECK(segment_budget(480, 48, 2) == 20);
  CHECK(segment_budget(50, 48, 1) == 2);
  CHECK(segment_budget(48, 48, 1) == 1);
  CHECK(segment_budget(100, 30, 3) == 10);
  CHECK_THROWS_AS(segment_budget(10, 48, 1), ConfigError);
  CHECK_THROWS_AS(segment_budget(48, 48, 0), ConfigError);
}

TEST_CASE("sample_segment bounds, regions and errors") {
  SamplerConfig cfg;  // 48 / 12 / 6, position encoding on
  Trajectory t = make_traj("a", "d", std::nullopt, 480, 4);
  Rng rng(3);
  SUBCASE("uniform start range") {
    int min_start = 1 << 30, max_start = -1;
    for (int i = 0; i < 2000; ++i) {
      Segment s = sample_segment(t, 48, cfg, rng);
      CHECK(s.length() == 48);
      CHECK(s.dim() == 5);
      CHECK(s.start >= 0);
      CHECK(s.start <= 432);
      min_start = std::min(min_start, s.start);
      max_start = std::max(max_start, s.start);
    }
    CHECK(min_start < 20);
    CHECK(max_start > 412);
  }
  SUBCASE("whole trajectory when lengths match") {
    Trajectory w = make_traj("w", "d", std::nullopt, 48, 4);
    Segment s = sample_segment(w, 48, cfg, rng);
    CHECK(s.start == 0);
    CHECK(s.length() == 48);
  }
  SUBCASE("too short") {
    Trajectory w = make_traj("w", "d", std::nullopt, 40, 4);
    CHECK_THROWS_AS(sample_segment(w, 48, cfg, rng), DataError);
  }
}

TEST_CASE("region classification follows the configured lengths") {
  Corpus c = make_tiny_corpus(2, 2, 60);
  SamplerConfig cfg{48, 12, 6, true};
  SegmentSampler sampler(c, cfg);
  CHECK(sampler.window(0, 0, 12).region == Region::Initial);
  CHECK(sampler.window(0, 0, 48).region == Region::Interior);  // wrong length for initial
  const int T = sampler.traj_length(0);
  CHECK(sampler.window(0, T - 6, 6).region == Region::Final);
  CHECK(sampler.window(0, T - 12, 12).region == Region::Interior);
  CHECK(sampler.window(0, 5, 12).region == Region::Interior);
}

TEST_CASE("position channel in segments matches (start + t) / T") {
  Corpus c = make_tiny_corpus(1, 2, 100);
  SamplerConfig cfg{20, 12, 6, true};
  SegmentSampler sampler(c, cfg);
  const int T = sampler.traj_length(0);
  Segment s = sampler.window(0, 30, 20);
  for (int t = 0; t < 20; ++t) {
    CHECK(s.steps(t, 4) == doctest::Approx((30.0 + t) / T).epsilon(1e-12));
    if (t > 0) CHECK(s.steps(t, 4) > s.steps(t - 1, 4));
  }
}

TEST_CASE("S1 triplets obey the tier and source invariants") {
  Corpus c = make_tiny_corpus(3, 3, 110);  // 9 per tier
  SamplerConfig cfg{48, 12, 6, true};
  SegmentSampler sampler(c, cfg);
  Rng rng(17);
  int good_anchors = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Triplet t = sampler.sample_triplet_s1(rng);
    REQUIRE(t.anchor.tier.has_value());
    REQUIRE(t.positive.tier.has_value());
    REQUIRE(t.negative.tier.has_value());
    CHECK(t.anchor.tier->rank == t.positive.tier->rank);
    CHECK(t.anchor.tier->rank != t.negative.tier->rank);
    CHECK(t.anchor.source_id != t.positive.source_id);
    CHECK(t.anchor.length() == 48);
    CHECK(t.positive.length() == 48);
    CHECK(t.negative.length() == 48);
    if (t.anchor.tier->rank == 2) good_anchors++;
  }
  // anchor tier is uniform over the three tiers
  CHECK(static_cast<double>(good_anchors) / draws == doctest::Approx(1.0 / 3).epsilon(0.06));
  CHECK(std::abs(static_cast<double>(good_anchors) / draws - 1.0 / 3) < 0.02);
}

TEST_CASE("S1 requires two tiers") {
  Corpus c(4, default_ladder());
  for (int i = 0; i < 3; ++i) {
    c.add(make_traj("t" + std::to_string(i), "d", c.tiers()[2], 60, 4));
  }
  SegmentSampler sampler(c, SamplerConfig{20, 6, 4, true});
  Rng rng(1);
  CHECK_THROWS_AS(sampler.sample_triplet_s1(rng), DataError);
}

TEST_CASE("S2 triplets align regions and ignore tiers") {
  Corpus c = make_tiny_corpus(3, 2, 60);
  SamplerConfig cfg{20, 12, 6, true};
  SegmentSampler sampler(c, cfg);
  Rng rng(23);
  bool saw_cross_tier = false, saw_initial = false, saw_final = false;
  for (int i = 0; i < 500; ++i) {
    Triplet t = sampler.sample_triplet_s2({true, true}, rng);
    CHECK(t.anchor.region == t.positive.region);
    CHECK(t.anchor.region != t.negative.region);
    CHECK(t.negative.region == Region::Interior);
    CHECK(t.anchor.source_id != t.positive.source_id);
    CHECK(t.anchor.length() == t.negative.length());
    if (t.anchor.region == Region::Initial) {
      saw_initial = true;
      CHECK(t.anchor.start == 0);
      CHECK(t.anchor.length() == 12);
    } else {
      saw_final = true;
      CHECK(t.anchor.length() == 6);
    }
    if (t.anchor.tier->rank != t.positive.tier->rank) saw_cross_tier = true;
  }
  CHECK(saw_initial);
  CHECK(saw_final);
  CHECK(saw_cross_tier);  // arbitrary quality sets by definition
}

TEST_CASE("S2 region toggles restrict the sampled regions") {
  Corpus c = make_tiny_corpus(2, 2, 60);
  SegmentSampler sampler(c, SamplerConfig{20, 12, 6, true});
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    CHECK(sampler.sample_triplet_s2({true, false}, rng).anchor.region == Region::Initial);
    CHECK(sampler.sample_triplet_s2({false, true}, rng).anchor.region == Region::Final);
  }
  CHECK_THROWS_AS(sampler.sample_triplet_s2({false, false}, rng), ConfigError);
}

TEST_CASE("preference pairs order tiers strictly") {
  Corpus c = make_tiny_corpus(2, 2, 110);
  SegmentSampler sampler(c, SamplerConfig{48, 12, 6, true});
  Rng rng(9);
  for (int i = 0; i < 300; ++i) {
    PreferencePair p = sampler.sample_preference_pair(rng);
    CHECK(p.better.tier->rank > p.worse.tier->rank);
  }
}

TEST_CASE("time warp: identity, constants, endpoints, range") {
  Corpus c = make_tiny_corpus(1, 2, 60);
  SegmentSampler sampler(c, SamplerConfig{20, 12, 6, true});
  Segment seg = sampler.window(0, 10, 20);

  SUBCASE("max_warp = 0 is the identity") {
    Rng rng(1);
    Segment w = time_warp(seg, 0.0, rng);
    CHECK(w.steps == seg.steps);
  }
  SUBCASE("constant segments are fixed points") {
    Segment k = seg;
    for (int t = 0; t < k.length(); ++t) {
      for (int j = 0; j < k.dim(); ++j) k.steps(t, j) = 3.25;
    }
    Rng rng(2);
    Segment w = time_warp(k, 0.5, rng);
    for (int t = 0; t < w.length(); ++t) {
      for (int j = 0; j < w.dim(); ++j) CHECK(w.steps(t, j) == doctest::Approx(3.25));
    }
  }
  SUBCASE("range, endpoints and length over many random warps") {
    // linear ramp segment
    Segment ramp = seg;
    for (int t = 0; t < ramp.length(); ++t) {
      for (int j = 0; j < ramp.dim(); ++j) ramp.steps(t, j) = 0.1 * t + j;
    }
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
      Segment w = time_warp(ramp, 0.5, rng);
      CHECK(w.length() == ramp.length());
      CHECK(w.steps.row(0) == ramp.steps.row(0));
      CHECK(w.steps.row(w.length() - 1) == ramp.steps.row(ramp.length() - 1));
      for (int j = 0; j < w.dim(); ++j) {
        const double lo = ramp.steps.col(j).minCoeff();
        const double hi = ramp.steps.col(j).maxCoeff();
        CHECK(w.steps.col(j).minCoeff() >= lo - 1e-12);
        CHECK(w.steps.col(j).maxCoeff() <= hi + 1e-12);
      }
      // position channel stays strictly increasing under warping
      for (int t = 1; t < w.length(); ++t) {
        CHECK(w.steps(t, 4) >= w.steps(t - 1, 4));
      }
    }
  }
  SUBCASE("too-short segments are rejected") {
    Segment tiny = sampler.window(0, 0, 2);
    Rng rng(4);
    CHECK_THROWS_AS(time_warp(tiny, 0.1, rng), DataError);
  }
}

TEST_CASE("sampling is deterministic given the rng seed") {
  Corpus c = make_tiny_corpus(3, 3, 110);
  SegmentSampler sampler(c, SamplerConfig{48, 12, 6, true});
  auto run = [&](uint64_t seed) {
    Rng rng(seed);
    std::vector<std::string> log;
    for (int i = 0; i < 20; ++i) {
      Triplet t = sampler.sample_triplet_s1(rng);
      log.push_back(t.anchor.source_id + "/" + std::to_string(t.anchor.start) +
                    "|" + t.negative.source_id);
    }
    return log;
  };
  CHECK(run(12) == run(12));
  CHECK(run(12) != run(13));
}
