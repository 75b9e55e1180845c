#include "l2d/gmm.hpp"

#include <cmath>

#include <json.hpp>

#include "l2d/sampling.hpp"

namespace l2d {

using nlohmann::json;

const TierComponent& QualityGMM::component(int rank) const {
  return components.at(static_cast<size_t>(rank));
}

QualityGMM fit_from_scores(const std::map<int, std::vector<double>>& by_rank,
                           const TierLadder& ladder, bool weighted,
                           double variance_floor) {
  validate_ladder(ladder);
  if (variance_floor <= 0) throw ConfigError("variance floor must be > 0");
  QualityGMM g;
  g.variance_floor = variance_floor;
  g.weighted = weighted;
  size_t total = 0;
  for (const auto& tier : ladder) {
    auto it = by_rank.find(tier.rank);
    if (it == by_rank.end() || it->second.size() < 2) {
      throw DataError("insufficient data: tier '" + tier.name +
                      "' has fewer than 2 scores");
    }
    total += it->second.size();
  }
  for (const auto& tier : ladder) {
    const auto& xs = by_rank.at(tier.rank);
    const double n = static_cast<double>(xs.size());
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= n;  // population variance (MLE)
    TierComponent c;
    c.tier = tier;
    c.mean = mean;
    c.var = std::max(var, variance_floor);
    c.weight = n / static_cast<double>(total);
    g.components.push_back(c);
  }
  return g;
}

QualityGMM fit_quality_gmm(const EncoderModel& encoder, const CriticModel& critic,
                           const Corpus& known, int k, uint64_t seed,
                           bool weighted) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (known.empty()) throw DataError("corpus is empty");
  if (!known.fully_labeled()) {
    throw DataError("GMM fitting requires a fully labeled corpus");
  }
  verify_lineage(encoder, critic);
  SegmentSampler sampler(known, encoder.config.sampler());
  const int L1 = encoder.config.segment_len;
  Rng root(seed);

  std::map<int, std::vector<double>> by_rank;
  for (size_t ti = 0; ti < sampler.size(); ++ti) {
    const auto& traj = known.trajectories()[ti];
    const int64_t budget = segment_budget(traj.length(), L1, k);
    Rng rng = root.fork(ti);
    std::vector<Segment> segs;
    segs.reserve(static_cast<size_t>(budget));
    for (int64_t i = 0; i < budget; ++i) {
      segs.push_back(sampler.sample_window(ti, L1, rng));
    }
    std::vector<const Segment*> ptrs;
    for (const auto& s : segs) ptrs.push_back(&s);
    nn::Vec scores = score_batch(critic, encoder, ptrs);
    auto& pool = by_rank[traj.label->rank];
    for (int i = 0; i < scores.size(); ++i) pool.push_back(scores(i));
  }
  return fit_from_scores(by_rank, known.tiers(), weighted);
}

double log_component_density(const QualityGMM& g, int rank, double x) {
  const TierComponent& c = g.component(rank);
  const double d = x - c.mean;
  double lp = -0.5 * std::log(2.0 * M_PI * c.var) - d * d / (2.0 * c.var);
  if (g.weighted) lp += std::log(c.weight);
  return lp;
}

QualityTier assign(const QualityGMM& g, double x) {
  if (g.components.empty()) throw DataError("GMM has no components");
  int best = 0;
  double best_lp = log_component_density(g, 0, x);
  // scanning worst-to-best with >= sends exact ties to the better tier
  for (int r = 1; r < static_cast<int>(g.components.size()); ++r) {
    const double lp = log_component_density(g, r, x);
    if (lp >= best_lp) {
      best = r;
      best_lp = lp;
    }
  }
  return g.components[static_cast<size_t>(best)].tier;
}

std::string gmm_to_json(const QualityGMM& g, const std::string& extra_json) {
  json comps = json::array();
  for (const auto& c : g.components) {
    comps.push_back({{"rank", c.tier.rank},
                     {"name", c.tier.name},
                     {"mean", c.mean},
                     {"var", c.var},
                     {"weight", c.weight}});
  }
  json j{{"format", "l2d-gmm"},
         {"version", 1},
         {"components", comps},
         {"variance_floor", g.variance_floor},
         {"weighted", g.weighted}};
  if (!extra_json.empty()) {
    json extra = json::parse(extra_json);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  }
  return j.dump();
}

QualityGMM gmm_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed GMM artifact: ") + e.what());
  }
  if (!j.contains("format") || j["format"] != "l2d-gmm") {
    throw DataError("not a GMM artifact");
  }
  QualityGMM g;
  g.variance_floor = j.at("variance_floor").get<double>();
  g.weighted = j.at("weighted").get<bool>();
  for (const auto& jc : j.at("components")) {
    TierComponent c;
    c.tier.rank = jc.at("rank").get<int>();
    c.tier.name = jc.at("name").get<std::string>();
    c.mean = jc.at("mean").get<double>();
    c.var = jc.at("var").get<double>();
    c.weight = jc.at("weight").get<double>();
    g.components.push_back(c);
  }
  if (g.components.size() < 2) throw DataError("GMM artifact needs >= 2 components");
  double wsum = 0;
  for (const auto& c : g.components) {
    if (c.var < g.variance_floor) throw DataError("GMM component variance below floor");
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw DataError("GMM weights do not sum to 1");
  return g;
}

}  // namespace l2d
