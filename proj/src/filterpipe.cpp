#include "l2d/filterpipe.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "l2d/sampling.hpp"

namespace l2d {

using nlohmann::json;

TrajectoryScoreReport score_trajectory(const EncoderModel& encoder,
                                       const CriticModel& critic,
                                       const QualityGMM& gmm,
                                       const Trajectory& traj, int k,
                                       uint64_t seed, bool stride_partition) {
  if (k < 1) throw ConfigError("k must be >= 1");
  const SamplerConfig scfg = encoder.config.sampler();
  const int L1 = scfg.segment_len;
  const int T = traj.length();
  if (T < L1) {
    throw DataError("trajectory '" + traj.id + "' too short: length " +
                    std::to_string(T) + " < segment length " + std::to_string(L1));
  }
  const int64_t budget = segment_budget(T, L1, k);

  Rng rng(seed);
  std::vector<Segment> segs;
  segs.reserve(static_cast<size_t>(budget));
  std::vector<std::vector<double>> aug = augment_with_position(traj);
  auto window = [&](int start) {
    Segment s;
    s.source_id = traj.id;
    s.start = start;
    const int dim = scfg.position_encoding
                        ? static_cast<int>(aug.front().size())
                        : static_cast<int>(traj.obs.front().size());
    s.steps = Eigen::MatrixXd(L1, dim);
    for (int t = 0; t < L1; ++t) {
      const auto& row = scfg.position_encoding
                            ? aug[static_cast<size_t>(start + t)]
                            : traj.obs[static_cast<size_t>(start + t)];
      for (int j = 0; j < dim; ++j) s.steps(t, j) = row[static_cast<size_t>(j)];
    }
    s.tier = traj.label;
    return s;
  };
  if (stride_partition) {
    for (int64_t i = 0; i < budget; ++i) {
      const double frac = budget > 1 ? static_cast<double>(i) / (budget - 1) : 0.0;
      segs.push_back(window(static_cast<int>(std::llround(frac * (T - L1)))));
    }
  } else {
    for (int64_t i = 0; i < budget; ++i) {
      segs.push_back(window(static_cast<int>(rng.uniform_int(static_cast<uint64_t>(T - L1 + 1)))));
    }
  }

  std::vector<const Segment*> ptrs;
  for (const auto& s : segs) ptrs.push_back(&s);
  nn::Vec scores = score_batch(critic, encoder, ptrs);

  TrajectoryScoreReport rep;
  rep.id = traj.id;
  const int top_rank = static_cast<int>(gmm.components.size()) - 1;
  int top_count = 0;
  double mean = 0;
  for (int i = 0; i < scores.size(); ++i) {
    rep.segment_scores.push_back(scores(i));
    QualityTier t = assign(gmm, scores(i));
    if (t.rank == top_rank) top_count++;
    rep.assignments.push_back(std::move(t));
    mean += scores(i);
  }
  mean /= static_cast<double>(scores.size());
  double var = 0;
  for (int i = 0; i < scores.size(); ++i) {
    var += (scores(i) - mean) * (scores(i) - mean);
  }
  var /= static_cast<double>(scores.size());
  rep.good_fraction = static_cast<double>(top_count) / static_cast<double>(scores.size());
  rep.score_mean = mean;
  rep.score_var = var;
  return rep;
}

std::vector<std::string> select_top(const std::vector<TrajectoryScoreReport>& reports,
                                    int top_k) {
  if (top_k < 0 || top_k > static_cast<int>(reports.size())) {
    throw ConfigError("top_k must lie in [0, number of reports]");
  }
  std::vector<const TrajectoryScoreReport*> order;
  order.reserve(reports.size());
  for (const auto& r : reports) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const TrajectoryScoreReport* a, const TrajectoryScoreReport* b) {
              if (a->good_fraction != b->good_fraction) {
                return a->good_fraction > b->good_fraction;
              }
              if (a->score_mean != b->score_mean) return a->score_mean > b->score_mean;
              if (a->score_var != b->score_var) return a->score_var < b->score_var;
              return a->id < b->id;
            });
  std::vector<std::string> ids;
  ids.reserve(static_cast<size_t>(top_k));
  for (int i = 0; i < top_k; ++i) ids.push_back(order[static_cast<size_t>(i)]->id);
  return ids;
}

std::string report_to_json(const TrajectoryScoreReport& r) {
  json j;
  j["id"] = r.id;
  j["segment_scores"] = r.segment_scores;
  json names = json::array();
  for (const auto& t : r.assignments) names.push_back(t.name);
  j["assignments"] = names;
  j["good_fraction"] = r.good_fraction;
  j["score_mean"] = r.score_mean;
  j["score_var"] = r.score_var;
  return j.dump();
}

TrajectoryScoreReport report_from_json(const std::string& text,
                                       const TierLadder& ladder) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed report record: ") + e.what());
  }
  TrajectoryScoreReport r;
  r.id = j.at("id").get<std::string>();
  r.segment_scores = j.at("segment_scores").get<std::vector<double>>();
  for (const auto& name : j.at("assignments")) {
    bool found = false;
    for (const auto& t : ladder) {
      if (t.name == name.get<std::string>()) {
        r.assignments.push_back(t);
        found = true;
        break;
      }
    }
    if (!found) throw DataError("report references unknown tier '" +
                                name.get<std::string>() + "'");
  }
  r.good_fraction = j.at("good_fraction").get<double>();
  r.score_mean = j.at("score_mean").get<double>();
  r.score_var = j.at("score_var").get<double>();
  if (r.segment_scores.size() != r.assignments.size()) {
    throw DataError("report scores/assignments length mismatch");
  }
  return r;
}

}  // namespace l2d
