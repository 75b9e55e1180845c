#include "l2d/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "l2d/rng.hpp"
#include "l2d/serialize.hpp"

namespace l2d {

using nlohmann::json;

TierLadder default_ladder() { return make_ladder({"bad", "okay", "good"}); }

TierLadder make_ladder(const std::vector<std::string>& names_worst_first) {
  TierLadder ladder;
  int rank = 0;
  for (const auto& n : names_worst_first) ladder.push_back({rank++, n});
  validate_ladder(ladder);
  return ladder;
}

void validate_ladder(const TierLadder& ladder) {
  if (ladder.size() < 2) throw ConfigError("tier ladder needs at least 2 tiers");
  std::set<std::string> names;
  for (size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i].rank != static_cast<int>(i)) {
      throw ConfigError("tier ranks must be 0..n-1 in order");
    }
    if (ladder[i].name.empty()) throw ConfigError("tier names must be non-empty");
    if (!names.insert(ladder[i].name).second) {
      throw ConfigError("duplicate tier name: " + ladder[i].name);
    }
  }
}

Corpus::Corpus(int obs_dim, TierLadder ladder)
    : obs_dim_(obs_dim), tiers_(std::move(ladder)) {
  if (obs_dim_ < 1) throw ConfigError("obs_dim must be >= 1");
  validate_ladder(tiers_);
}

void Corpus::add(Trajectory t) {
  if (t.id.empty()) throw DataError("trajectory id must be non-empty");
  for (const auto& existing : trajs_) {
    if (existing.id == t.id) throw DataError("duplicate trajectory id: " + t.id);
  }
  if (t.obs.empty()) throw DataError("trajectory '" + t.id + "' has no observations");
  for (const auto& row : t.obs) {
    if (static_cast<int>(row.size()) != obs_dim_) {
      throw DataError("trajectory '" + t.id + "': observation has dimension " +
                      std::to_string(row.size()) + ", expected " +
                      std::to_string(obs_dim_));
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw DataError("trajectory '" + t.id + "': non-finite observation value");
      }
    }
  }
  if (t.label) {
    auto found = find_tier(t.label->name);
    if (!found || found->rank != t.label->rank) {
      throw DataError("trajectory '" + t.id + "': unknown tier '" +
                      t.label->name + "'");
    }
  }
  trajs_.push_back(std::move(t));
}

bool Corpus::fully_labeled() const {
  return std::all_of(trajs_.begin(), trajs_.end(),
                     [](const Trajectory& t) { return t.label.has_value(); });
}

Corpus Corpus::stripped() const {
  Corpus out(obs_dim_, tiers_);
  for (auto t : trajs_) {
    t.label.reset();
    out.trajs_.push_back(std::move(t));
  }
  return out;
}

std::optional<QualityTier> Corpus::find_tier(const std::string& name) const {
  for (const auto& t : tiers_) {
    if (t.name == name) return t;
  }
  return std::nullopt;
}

const QualityTier& Corpus::top_tier() const { return tiers_.back(); }

namespace {

json tier_names(const TierLadder& ladder) {
  json arr = json::array();
  for (const auto& t : ladder) arr.push_back(t.name);
  return arr;
}

}  // namespace

std::string corpus_to_string(const Corpus& c, const std::string& extra_header_json) {
  std::ostringstream out;
  json header;
  header["obs_dim"] = c.obs_dim();
  header["tiers"] = tier_names(c.tiers());
  if (!extra_header_json.empty()) {
    json extra = json::parse(extra_header_json);
    for (auto it = extra.begin(); it != extra.end(); ++it) header[it.key()] = it.value();
  }
  out << header.dump() << "\n";
  for (const auto& t : c.trajectories()) {
    json rec;
    rec["id"] = t.id;
    rec["demonstrator"] = t.demonstrator;
    if (t.label) {
      rec["label"] = t.label->name;
    } else {
      rec["label"] = nullptr;
    }
    rec["obs"] = t.obs;
    out << rec.dump() << "\n";
  }
  return out.str();
}

void save_corpus(const Corpus& c, const std::string& path,
                 const std::string& extra_header_json) {
  write_file(path, corpus_to_string(c, extra_header_json));
}

Corpus parse_corpus(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  Corpus corpus;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(origin + ":" + std::to_string(lineno) +
                      ": malformed record: " + e.what());
    }
    const std::string where = origin + ":" + std::to_string(lineno);
    try {
      if (!have_header) {
        if (!rec.contains("obs_dim") || !rec.contains("tiers")) {
          throw DataError(where + ": header record must carry obs_dim and tiers");
        }
        std::vector<std::string> names = rec.at("tiers").get<std::vector<std::string>>();
        corpus = Corpus(rec.at("obs_dim").get<int>(), make_ladder(names));
        have_header = true;
        continue;
      }
      Trajectory t;
      t.id = rec.at("id").get<std::string>();
      t.demonstrator = rec.at("demonstrator").get<std::string>();
      if (rec.contains("label") && !rec.at("label").is_null()) {
        const std::string name = rec.at("label").get<std::string>();
        auto tier = corpus.find_tier(name);
        if (!tier) throw DataError(where + ": unknown tier '" + name + "'");
        t.label = *tier;
      }
      t.obs = rec.at("obs").get<std::vector<std::vector<double>>>();
      corpus.add(std::move(t));
    } catch (const json::exception& e) {
      throw DataError(where + ": bad record: " + e.what());
    } catch (const DataError& e) {
      // add() errors don't know the line; prefix once
      std::string msg = e.what();
      if (msg.rfind(origin, 0) == 0) throw;
      throw DataError(where + ": " + msg);
    }
  }
  if (!have_header && lineno > 0) {
    throw DataError(origin + ": missing header record");
  }
  if (!have_header) {
    // empty file: a valid corpus with zero trajectories and defaults
    return Corpus();
  }
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  return parse_corpus(read_file(path), path);
}

SplitMode parse_split_mode(const std::string& s) {
  if (s == "familiar") return SplitMode::Familiar;
  if (s == "unseen") return SplitMode::Unseen;
  throw ConfigError("split mode must be 'familiar' or 'unseen', got '" + s + "'");
}

namespace {

template <typename T>
void seeded_shuffle(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.uniform_int(i)]);
  }
}

}  // namespace

SplitResult split_corpus(const Corpus& c, SplitMode mode, double fraction,
                         uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split fraction must lie in (0,1)");
  }
  if (!c.fully_labeled()) {
    throw DataError("split requires a fully labeled corpus");
  }
  Rng rng(seed);
  const auto& trajs = c.trajectories();
  std::vector<bool> to_known(trajs.size(), false);

  if (mode == SplitMode::Familiar) {
    // (demonstrator, tier) cells; keys ordered for determinism.
    std::map<std::pair<std::string, int>, std::vector<size_t>> cells;
    for (size_t i = 0; i < trajs.size(); ++i) {
      cells[{trajs[i].demonstrator, trajs[i].label->rank}].push_back(i);
    }
    for (auto& [key, idxs] : cells) {
      if (idxs.size() < 2) {
        throw DataError("infeasible familiar split: demonstrator '" + key.first +
                        "' has fewer than 2 trajectories in tier rank " +
                        std::to_string(key.second));
      }
    }
    for (auto& [key, idxs] : cells) {
      seeded_shuffle(idxs, rng);
      const size_t n_known =
          static_cast<size_t>(std::floor(fraction * static_cast<double>(idxs.size())));
      for (size_t j = 0; j < n_known; ++j) to_known[idxs[j]] = true;
    }
  } else {
    std::map<int, std::set<std::string>> demos_per_tier;
    std::vector<std::string> demos;
    for (const auto& t : trajs) {
      demos_per_tier[t.label->rank].insert(t.demonstrator);
      if (std::find(demos.begin(), demos.end(), t.demonstrator) == demos.end()) {
        demos.push_back(t.demonstrator);
      }
    }
    for (const auto& tier : c.tiers()) {
      auto it = demos_per_tier.find(tier.rank);
      if (it == demos_per_tier.end() || it->second.size() < 2) {
        throw DataError("infeasible unseen split: tier '" + tier.name +
                        "' needs at least 2 demonstrators");
      }
    }
    std::sort(demos.begin(), demos.end());
    seeded_shuffle(demos, rng);
    size_t n_known =
        static_cast<size_t>(std::floor(fraction * static_cast<double>(demos.size())));
    n_known = std::clamp<size_t>(n_known, 1, demos.size() - 1);
    std::set<std::string> known_demos(demos.begin(), demos.begin() + n_known);
    for (size_t i = 0; i < trajs.size(); ++i) {
      to_known[i] = known_demos.count(trajs[i].demonstrator) > 0;
    }
  }

  SplitResult res{Corpus(c.obs_dim(), c.tiers()), Corpus(c.obs_dim(), c.tiers())};
  for (size_t i = 0; i < trajs.size(); ++i) {
    (to_known[i] ? res.known : res.unknown).add(trajs[i]);
  }
  return res;
}

}  // namespace l2d
