#include "l2d/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "l2d/serialize.hpp"

namespace l2d {

using nlohmann::json;

namespace {

using Field = std::variant<int RunConfig::*, double RunConfig::*, bool RunConfig::*,
                           std::string RunConfig::*, uint64_t RunConfig::*>;

struct Key {
  const char* name;
  Field field;
};

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      {"obs_dim", &RunConfig::obs_dim},
      {"tiers", &RunConfig::tiers},
      {"n_demonstrators", &RunConfig::n_demonstrators},
      {"per_tier_count", &RunConfig::per_tier_count},
      {"min_length", &RunConfig::min_length},
      {"split_mode", &RunConfig::split_mode},
      {"split_fraction", &RunConfig::split_fraction},
      {"segment_len", &RunConfig::segment_len},
      {"initial_len", &RunConfig::initial_len},
      {"final_len", &RunConfig::final_len},
      {"k", &RunConfig::k},
      {"position_encoding", &RunConfig::position_encoding},
      {"s1", &RunConfig::s1},
      {"s2_initial", &RunConfig::s2_initial},
      {"s2_final", &RunConfig::s2_final},
      {"time_warp", &RunConfig::time_warp},
      {"max_warp", &RunConfig::max_warp},
      {"s1_s2_ratio", &RunConfig::s1_s2_ratio},
      {"arch", &RunConfig::arch},
      {"latent_dim", &RunConfig::latent_dim},
      {"hidden_dim", &RunConfig::hidden_dim},
      {"critic_hidden", &RunConfig::critic_hidden},
      {"lr", &RunConfig::lr},
      {"margin", &RunConfig::margin},
      {"label_noise", &RunConfig::label_noise},
      {"encoder_steps", &RunConfig::encoder_steps},
      {"critic_steps", &RunConfig::critic_steps},
      {"batch", &RunConfig::batch},
      {"num_segments", &RunConfig::num_segments},
      {"n_segments_per_tier", &RunConfig::n_segments_per_tier},
      {"normalize_scores", &RunConfig::normalize_scores},
      {"weighted_assign", &RunConfig::weighted_assign},
      {"stride_partition", &RunConfig::stride_partition},
      {"top_k", &RunConfig::top_k},
      {"hist_bins", &RunConfig::hist_bins},
      {"seed", &RunConfig::seed},
  };
  return k;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
  uint64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "' expects an unsigned integer, got '" +
                      v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "' expects true/false, got '" + v + "'");
}

}  // namespace

void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& k : keys()) {
    if (key != k.name) continue;
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, int>) {
            cfg.*member = parse_int(key, value);
          } else if constexpr (std::is_same_v<T, double>) {
            try {
              cfg.*member = parse_double(value);
            } catch (const DataError&) {
              throw ConfigError("config key '" + key + "' expects a real, got '" +
                                value + "'");
            }
          } else if constexpr (std::is_same_v<T, bool>) {
            cfg.*member = parse_bool(key, value);
          } else if constexpr (std::is_same_v<T, uint64_t>) {
            cfg.*member = parse_u64(key, value);
          } else {
            cfg.*member = value;
          }
        },
        k.field);
    return;
  }
  throw ConfigError("unknown config key: '" + key + "'");
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    set_config_key(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  return parse_config_text(read_file(path), std::move(base));
}

TierLadder config_ladder(const RunConfig& cfg) {
  std::vector<std::string> names;
  std::string cur;
  for (char c : cfg.tiers) {
    if (c == ',') {
      names.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  names.push_back(trim(cur));
  return make_ladder(names);  // validates size/uniqueness
}

void validate_config(const RunConfig& cfg) {
  config_ladder(cfg);
  if (cfg.obs_dim < 4) throw ConfigError("obs_dim must be >= 4");
  if (cfg.n_demonstrators < 2) throw ConfigError("n_demonstrators must be >= 2");
  if (cfg.per_tier_count < 1) throw ConfigError("per_tier_count must be >= 1");
  if (!(cfg.split_fraction > 0 && cfg.split_fraction < 1)) {
    throw ConfigError("split_fraction must lie in (0,1)");
  }
  parse_split_mode(cfg.split_mode);
  if (cfg.min_length < 2 * std::max({cfg.segment_len, cfg.initial_len, cfg.final_len})) {
    throw ConfigError("min_length must be >= 2 x max segment length");
  }
  if (cfg.k < 1) throw ConfigError("k must be >= 1");
  if (cfg.top_k < 1) throw ConfigError("top_k must be >= 1");
  if (cfg.n_segments_per_tier < 1) throw ConfigError("n_segments_per_tier must be >= 1");
  if (cfg.hist_bins < 1) throw ConfigError("hist_bins must be >= 1");
  if (cfg.critic_hidden < 1) throw ConfigError("critic_hidden must be >= 1");
  validate_encoder_config(encoder_config(cfg));
  validate_critic_config(critic_config(cfg));
}

GenConfig gen_config(const RunConfig& cfg) {
  GenConfig g;
  g.n_demonstrators = cfg.n_demonstrators;
  g.per_tier_count = cfg.per_tier_count;
  g.obs_dim = cfg.obs_dim;
  g.min_length = cfg.min_length;
  g.ladder = config_ladder(cfg);
  return g;
}

EncoderConfig encoder_config(const RunConfig& cfg) {
  EncoderConfig e;
  e.latent_dim = cfg.latent_dim;
  e.hidden_dim = cfg.hidden_dim;
  e.segment_len = cfg.segment_len;
  e.initial_len = cfg.initial_len;
  e.final_len = cfg.final_len;
  e.position_encoding = cfg.position_encoding;
  e.s1 = cfg.s1;
  e.s2_initial = cfg.s2_initial;
  e.s2_final = cfg.s2_final;
  e.time_warp = cfg.time_warp;
  e.max_warp = cfg.max_warp;
  e.s1_s2_ratio = cfg.s1_s2_ratio;
  e.steps = cfg.encoder_steps;
  e.batch = cfg.batch;
  e.lr = cfg.lr;
  e.margin = cfg.margin;
  e.num_segments = cfg.num_segments;
  e.arch = cfg.arch;
  return e;
}

CriticConfig critic_config(const RunConfig& cfg) {
  CriticConfig c;
  c.hidden_dim = cfg.critic_hidden;
  c.label_noise = cfg.label_noise;
  c.steps = cfg.critic_steps;
  c.batch = cfg.batch;
  c.lr = cfg.lr;
  return c;
}

std::string config_json(const RunConfig& cfg) {
  json j;
  for (const auto& k : keys()) {
    std::visit([&](auto member) { j[k.name] = cfg.*member; }, k.field);
  }
  return j.dump();
}

std::string config_echo_text(const RunConfig& cfg) {
  std::ostringstream out;
  bool first = true;
  for (const auto& k : keys()) {
    if (!first) out << " ";
    first = false;
    out << k.name << "=";
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, double>) {
            out << format_double(cfg.*member);
          } else if constexpr (std::is_same_v<T, bool>) {
            out << (cfg.*member ? "true" : "false");
          } else {
            out << cfg.*member;
          }
        },
        k.field);
  }
  return out.str();
}

}  // namespace l2d
