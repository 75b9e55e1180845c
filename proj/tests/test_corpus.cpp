#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <set>

#include "l2d/corpus.hpp"
#include "support/testutil.hpp"

using namespace l2d;
using testutil::make_traj;
using testutil::make_tiny_corpus;

namespace {

bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

bool corpora_equal(const Corpus& a, const Corpus& b) {
  if (a.obs_dim() != b.obs_dim()) return false;
  if (a.tiers() != b.tiers()) return false;
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    const auto& ta = a.trajectories()[i];
    const auto& tb = b.trajectories()[i];
    if (ta.id != tb.id || ta.demonstrator != tb.demonstrator) return false;
    if (ta.label != tb.label) return false;
    if (ta.obs.size() != tb.obs.size()) return false;
    for (size_t t = 0; t < ta.obs.size(); ++t) {
      for (size_t j = 0; j < ta.obs[t].size(); ++j) {
        if (!same_bits(ta.obs[t][j], tb.obs[t][j])) return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("ladder validation") {
  CHECK_NOTHROW(make_ladder({"bad", "good"}));
  CHECK_THROWS_AS(make_ladder({"only"}), ConfigError);
  CHECK_THROWS_AS(make_ladder({"a", "a"}), ConfigError);
  auto ladder = default_ladder();
  REQUIRE(ladder.size() == 3);
  CHECK(ladder[0].name == "bad");
  CHECK(ladder[2].name == "good");
  CHECK(ladder[2].rank == 2);
}

TEST_CASE("round-trips the format exactly, including awkward doubles") {
  Corpus c(3, default_ladder());
  Trajectory t;
  t.id = "t0";
  t.demonstrator = "alice";
  t.label = c.tiers()[2];
  t.obs = {{0.1, 1.0 / 3.0, -0.0},
           {1e-300, 1e300, -1.2345678901234567e-7},
           {0.1 + 0.2, 2.2250738585072014e-308, 42.0}};
  c.add(t);
  Trajectory u = make_traj("t1", "bob", std::nullopt, 5, 3);
  c.add(u);

  const std::string text = corpus_to_string(c);
  Corpus back = parse_corpus(text, "mem");
  CHECK(corpora_equal(c, back));
  // idempotent re-serialization
  CHECK(corpus_to_string(back) == text);
}

TEST_CASE("single-trajectory file loads as expected") {
  Corpus c(4, default_ladder());
  c.add(make_traj("a", "d0", c.tiers()[2], 100, 4));
  Corpus back = parse_corpus(corpus_to_string(c), "mem");
  REQUIRE(back.size() == 1);
  CHECK(back.obs_dim() == 4);
  CHECK(back.trajectories()[0].length() == 100);
  CHECK(back.trajectories()[0].label->name == "good");
}

TEST_CASE("empty file is a valid empty corpus") {
  Corpus c = parse_corpus("", "mem");
  CHECK(c.size() == 0);
}

TEST_CASE("parse errors name the offending line") {
  const std::string header = R"({"obs_dim":2,"tiers":["bad","okay","good"]})";
  SUBCASE("malformed json") {
    const std::string text = header + "\n" +
        R"({"id":"a","demonstrator":"d","label":null,"obs":[[1,2]]})" + "\n" +
        "{not json\n";
    try {
      parse_corpus(text, "f");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("f:3") != std::string::npos);
    }
  }
  SUBCASE("dimension mismatch") {
    const std::string text = header + "\n" +
        R"({"id":"a","demonstrator":"d","label":null,"obs":[[1,2],[1,2,3]]})" + "\n";
    try {
      parse_corpus(text, "f");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("f:2") != std::string::npos);
      CHECK(msg.find("dimension") != std::string::npos);
    }
  }
  SUBCASE("unknown tier") {
    const std::string text = header + "\n" +
        R"({"id":"a","demonstrator":"d","label":"great","obs":[[1,2]]})" + "\n";
    try {
      parse_corpus(text, "f");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("f:2") != std::string::npos);
      CHECK(msg.find("great") != std::string::npos);
    }
  }
  SUBCASE("missing header") {
    CHECK_THROWS_AS(parse_corpus(R"({"id":"a"})" "\n", "f"), DataError);
  }
}

TEST_CASE("corpus add validates") {
  Corpus c(2, default_ladder());
  CHECK_THROWS_AS(c.add(make_traj("x", "d", std::nullopt, 3, 4)), DataError);
  Trajectory bad = make_traj("y", "d", std::nullopt, 3, 2);
  bad.obs[1][0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(c.add(bad), DataError);
  c.add(make_traj("z", "d", std::nullopt, 3, 2));
  CHECK_THROWS_AS(c.add(make_traj("z", "d", std::nullopt, 3, 2)), DataError);
}

TEST_CASE("stripped removes labels and nothing else") {
  Corpus c = make_tiny_corpus(2, 2, 10);
  REQUIRE(c.fully_labeled());
  Corpus s = c.stripped();
  CHECK(!s.fully_labeled());
  CHECK(s.size() == c.size());
  for (size_t i = 0; i < s.size(); ++i) {
    CHECK(!s.trajectories()[i].label.has_value());
    CHECK(s.trajectories()[i].id == c.trajectories()[i].id);
    CHECK(s.trajectories()[i].obs == c.trajectories()[i].obs);
  }
}

TEST_CASE("familiar split balances every (demonstrator, tier) cell") {
  Corpus c = make_tiny_corpus(6, 4, 12);  // 72 trajectories
  auto res = split_corpus(c, SplitMode::Familiar, 0.5, 11);
  CHECK(res.known.size() == 36);
  CHECK(res.unknown.size() == 36);
  std::set<std::string> known_demos, unknown_demos;
  for (const auto& t : res.known.trajectories()) known_demos.insert(t.demonstrator);
  for (const auto& t : res.unknown.trajectories()) unknown_demos.insert(t.demonstrator);
  CHECK(known_demos.size() == 6);
  CHECK(unknown_demos.size() == 6);
  // per-cell counts differ by <= 1 at fraction 0.5
  auto cell_count = [](const Corpus& cc, const std::string& d, int rank) {
    int n = 0;
    for (const auto& t : cc.trajectories()) {
      if (t.demonstrator == d && t.label->rank == rank) n++;
    }
    return n;
  };
  for (const auto& d : known_demos) {
    for (int r = 0; r < 3; ++r) {
      CHECK(std::abs(cell_count(res.known, d, r) - cell_count(res.unknown, d, r)) <= 1);
    }
  }
}

TEST_CASE("familiar split with odd cells keeps the <=1 imbalance") {
  Corpus c = make_tiny_corpus(2, 5, 12);
  auto res = split_corpus(c, SplitMode::Familiar, 0.5, 3);
  CHECK(res.known.size() == 2 * 3 * 2);   // floor(2.5) = 2 per cell
  CHECK(res.unknown.size() == 2 * 3 * 3);
}

TEST_CASE("unseen split partitions demonstrators disjointly") {
  Corpus c = make_tiny_corpus(6, 3, 12);
  auto res = split_corpus(c, SplitMode::Unseen, 0.5, 5);
  std::set<std::string> known_demos, unknown_demos;
  for (const auto& t : res.known.trajectories()) known_demos.insert(t.demonstrator);
  for (const auto& t : res.unknown.trajectories()) unknown_demos.insert(t.demonstrator);
  CHECK(known_demos.size() == 3);
  CHECK(unknown_demos.size() == 3);
  for (const auto& d : known_demos) CHECK(unknown_demos.count(d) == 0);
  // evaluation labels are retained on the unknown half
  CHECK(res.unknown.fully_labeled());
}

TEST_CASE("split is deterministic in the seed") {
  Corpus c = make_tiny_corpus(4, 3, 12);
  auto ids = [](const Corpus& cc) {
    std::vector<std::string> v;
    for (const auto& t : cc.trajectories()) v.push_back(t.id);
    return v;
  };
  auto a = split_corpus(c, SplitMode::Unseen, 0.5, 7);
  auto b = split_corpus(c, SplitMode::Unseen, 0.5, 7);
  CHECK(ids(a.known) == ids(b.known));
  auto fa = split_corpus(c, SplitMode::Familiar, 0.5, 7);
  auto fb = split_corpus(c, SplitMode::Familiar, 0.5, 7);
  CHECK(ids(fa.known) == ids(fb.known));
}

TEST_CASE("infeasible splits are rejected") {
  SUBCASE("unseen with one demonstrator") {
    Corpus c = make_tiny_corpus(1, 3, 12);
    CHECK_THROWS_AS(split_corpus(c, SplitMode::Unseen, 0.5, 1), DataError);
  }
  SUBCASE("familiar with a single-trajectory cell") {
    Corpus c = make_tiny_corpus(2, 1, 12);
    CHECK_THROWS_AS(split_corpus(c, SplitMode::Familiar, 0.5, 1), DataError);
  }
  SUBCASE("bad fraction") {
    Corpus c = make_tiny_corpus(2, 2, 12);
    CHECK_THROWS_AS(split_corpus(c, SplitMode::Familiar, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(split_corpus(c, SplitMode::Familiar, 1.0, 1), ConfigError);
  }
}
