#include "l2d/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "l2d/sampling.hpp"
#include "l2d/serialize.hpp"

namespace l2d {

double wasserstein_1d(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty() || ys.empty()) {
    throw DataError("wasserstein_1d needs non-empty samples");
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double wx = 1.0 / static_cast<double>(xs.size());
  const double wy = 1.0 / static_cast<double>(ys.size());
  size_t i = 0, j = 0;
  double rx = wx, ry = wy;
  double dist = 0;
  while (i < xs.size() && j < ys.size()) {
    const double step = std::min(rx, ry);
    dist += step * std::abs(xs[i] - ys[j]);
    rx -= step;
    ry -= step;
    if (rx <= 0) {
      ++i;
      rx = wx;
    }
    if (ry <= 0) {
      ++j;
      ry = wy;
    }
  }
  return dist;
}

namespace {

std::map<int, std::vector<double>> scores_by_rank(const EncoderModel& encoder,
                                                  const CriticModel& critic,
                                                  const Corpus& labeled_eval,
                                                  int n_segments_per_tier,
                                                  uint64_t seed) {
  if (n_segments_per_tier < 1) {
    throw ConfigError("n_segments_per_tier must be >= 1");
  }
  if (labeled_eval.empty()) throw DataError("evaluation corpus is empty");
  if (!labeled_eval.fully_labeled()) {
    throw DataError("separability evaluation requires labels");
  }
  SegmentSampler sampler(labeled_eval, encoder.config.sampler());
  const int L1 = encoder.config.segment_len;
  Rng root(seed);
  std::map<int, std::vector<double>> by_rank;
  int tiers_with_data = 0;
  for (const auto& tier : labeled_eval.tiers()) {
    const auto& members = sampler.tier_members(tier.rank);
    if (members.empty()) continue;
    tiers_with_data++;
    Rng rng = root.fork(static_cast<uint64_t>(tier.rank));
    std::vector<Segment> segs;
    segs.reserve(static_cast<size_t>(n_segments_per_tier));
    for (int i = 0; i < n_segments_per_tier; ++i) {
      const size_t ti = members[rng.uniform_int(members.size())];
      segs.push_back(sampler.sample_window(ti, L1, rng));
    }
    std::vector<const Segment*> ptrs;
    for (const auto& s : segs) ptrs.push_back(&s);
    nn::Vec scores = score_batch(critic, encoder, ptrs);
    auto& pool = by_rank[tier.rank];
    for (int i = 0; i < scores.size(); ++i) pool.push_back(scores(i));
  }
  if (tiers_with_data < 2) {
    throw DataError("separability evaluation needs >= 2 tiers with data");
  }
  return by_rank;
}

}  // namespace

SeparabilityReport separability_report(const EncoderModel& encoder,
                                       const CriticModel& critic,
                                       const Corpus& labeled_eval,
                                       int n_segments_per_tier, uint64_t seed,
                                       bool normalize) {
  auto by_rank = scores_by_rank(encoder, critic, labeled_eval,
                                n_segments_per_tier, seed);
  if (normalize) {
    double mean = 0;
    size_t n = 0;
    for (const auto& [rank, xs] : by_rank) {
      for (double x : xs) mean += x;
      n += xs.size();
    }
    mean /= static_cast<double>(n);
    double var = 0;
    for (const auto& [rank, xs] : by_rank) {
      for (double x : xs) var += (x - mean) * (x - mean);
    }
    var /= static_cast<double>(n);
    const double sd = var > 0 ? std::sqrt(var) : 1.0;
    for (auto& [rank, xs] : by_rank) {
      for (double& x : xs) x = (x - mean) / sd;
    }
  }
  SeparabilityReport rep;
  const auto& ladder = labeled_eval.tiers();
  for (auto hi = ladder.rbegin(); hi != ladder.rend(); ++hi) {
    if (!by_rank.count(hi->rank)) continue;
    for (auto lo = std::next(hi); lo != ladder.rend(); ++lo) {
      if (!by_rank.count(lo->rank)) continue;
      SeparabilityReport::Entry e;
      e.tier_a = hi->name;
      e.tier_b = lo->name;
      e.distance = wasserstein_1d(by_rank.at(hi->rank), by_rank.at(lo->rank));
      rep.total += e.distance;
      rep.pairwise.push_back(std::move(e));
    }
  }
  return rep;
}

std::string separability_to_text(const SeparabilityReport& r,
                                 const std::vector<std::string>& header_lines) {
  std::ostringstream out;
  for (const auto& h : header_lines) out << "# " << h << "\n";
  out << "tier_a\ttier_b\tdistance\n";
  for (const auto& e : r.pairwise) {
    out << e.tier_a << "\t" << e.tier_b << "\t" << format_double(e.distance) << "\n";
  }
  out << "total\t-\t" << format_double(r.total) << "\n";
  return out.str();
}

int SelectionConfusion::count_for(int rank) const {
  for (const auto& [tier, n] : counts) {
    if (tier.rank == rank) return n;
  }
  return 0;
}

SelectionConfusion selection_confusion(const std::vector<std::string>& selected_ids,
                                       const Corpus& labeled) {
  if (!labeled.fully_labeled()) {
    throw DataError("selection confusion requires a labeled corpus");
  }
  SelectionConfusion c;
  c.top_k = static_cast<int>(selected_ids.size());
  for (const auto& tier : labeled.tiers()) c.counts.push_back({tier, 0});
  for (const auto& id : selected_ids) {
    bool found = false;
    for (const auto& t : labeled.trajectories()) {
      if (t.id == id) {
        c.counts[static_cast<size_t>(t.label->rank)].second++;
        found = true;
        break;
      }
    }
    if (!found) throw DataError("unknown trajectory id in selection: " + id);
  }
  return c;
}

std::string confusion_to_text(const SelectionConfusion& c,
                              const std::vector<std::string>& header_lines) {
  std::ostringstream out;
  for (const auto& h : header_lines) out << "# " << h << "\n";
  out << "tier\tselected\ttop_k\n";
  for (auto it = c.counts.rbegin(); it != c.counts.rend(); ++it) {
    out << it->first.name << "\t" << it->second << "\t" << c.top_k << "\n";
  }
  return out.str();
}

std::string histogram_to_text(const std::map<std::string, std::vector<double>>& by_tier,
                              int bins,
                              const std::vector<std::string>& header_lines) {
  if (bins < 1) throw ConfigError("bins must be >= 1");
  bool any = false;
  double lo = 0, hi = 0;
  for (const auto& [tier, xs] : by_tier) {
    for (double x : xs) {
      if (!any) {
        lo = hi = x;
        any = true;
      } else {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  }
  if (!any) throw DataError("histogram export needs at least one score");
  const double width = (hi - lo) / static_cast<double>(bins);
  std::ostringstream out;
  for (const auto& h : header_lines) out << "# " << h << "\n";
  out << "tier\tbin_lo\tbin_hi\tcount\n";
  for (const auto& [tier, xs] : by_tier) {
    std::vector<int> counts(static_cast<size_t>(bins), 0);
    for (double x : xs) {
      int b = width > 0 ? static_cast<int>((x - lo) / width) : 0;
      b = std::clamp(b, 0, bins - 1);
      counts[static_cast<size_t>(b)]++;
    }
    for (int b = 0; b < bins; ++b) {
      const double blo = lo + width * b;
      const double bhi = b == bins - 1 ? hi : lo + width * (b + 1);
      out << tier << "\t" << format_double(blo) << "\t" << format_double(bhi)
          << "\t" << counts[static_cast<size_t>(b)] << "\n";
    }
  }
  return out.str();
}

void export_histogram(const std::map<std::string, std::vector<double>>& by_tier,
                      int bins, const std::string& path,
                      const std::vector<std::string>& header_lines) {
  write_file(path, histogram_to_text(by_tier, bins, header_lines));
}

std::map<std::string, std::vector<double>> tier_scores(
    const EncoderModel& encoder, const CriticModel& critic,
    const Corpus& labeled_eval, int n_segments_per_tier, uint64_t seed) {
  auto by_rank = scores_by_rank(encoder, critic, labeled_eval,
                                n_segments_per_tier, seed);
  std::map<std::string, std::vector<double>> out;
  for (const auto& tier : labeled_eval.tiers()) {
    auto it = by_rank.find(tier.rank);
    if (it != by_rank.end()) out[tier.name] = it->second;
  }
  return out;
}

}  // namespace l2d
