#include "l2d/encoder.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "l2d/serialize.hpp"

namespace l2d {

using nlohmann::json;

void validate_encoder_config(const EncoderConfig& cfg) {
  if (cfg.latent_dim < 1 || cfg.hidden_dim < 1) {
    throw ConfigError("latent_dim and hidden_dim must be >= 1");
  }
  if (cfg.segment_len < 1 || cfg.initial_len < 1 || cfg.final_len < 1) {
    throw ConfigError("segment lengths must be >= 1");
  }
  if (cfg.steps < 0 || cfg.batch < 1 || cfg.num_segments < 1) {
    throw ConfigError("steps must be >= 0, batch and num_segments >= 1");
  }
  if (cfg.lr <= 0 || cfg.margin < 0 || cfg.max_warp < 0 || cfg.s1_s2_ratio <= 0) {
    throw ConfigError("lr and s1_s2_ratio must be > 0, margin and max_warp >= 0");
  }
  if (cfg.steps > 0 && !cfg.s1 && !cfg.s2_enabled()) {
    throw ConfigError("no contrastive strategy enabled");
  }
  if (cfg.arch != "attention" && cfg.arch != "flatten") {
    throw ConfigError("arch must be 'attention' or 'flatten'");
  }
  if (cfg.arch == "flatten") {
    // the flatten stack fixes the step count, so every enabled segment
    // length must match L1
    if ((cfg.s2_initial && cfg.initial_len != cfg.segment_len) ||
        (cfg.s2_final && cfg.final_len != cfg.segment_len)) {
      throw ConfigError("flatten arch requires all enabled segment lengths "
                        "to equal segment_len");
    }
  }
}

namespace {

std::vector<nn::LayerSpec> arch_specs(const EncoderConfig& cfg, int input_dim) {
  using nn::Activation;
  using nn::LayerKind;
  std::vector<nn::LayerSpec> specs;
  const int h = cfg.hidden_dim;
  if (cfg.arch == "attention") {
    specs.push_back({LayerKind::Recurrent, input_dim, h, Activation::Identity, 0});
    specs.push_back({LayerKind::SelfAttentionCls, h, h, Activation::Identity, 0});
    specs.push_back({LayerKind::Dense, h, h, Activation::Tanh, 0});
    specs.push_back({LayerKind::Dense, h, cfg.latent_dim, Activation::Identity, 0});
  } else {
    specs.push_back({LayerKind::Recurrent, input_dim, h, Activation::Identity, 0});
    specs.push_back({LayerKind::Dense, h, h, Activation::Tanh, 0});
    specs.push_back({LayerKind::Dense, h, h, Activation::Tanh, 0});
    specs.push_back({LayerKind::Flatten, h, h * cfg.segment_len, Activation::Identity,
                     cfg.segment_len});
    specs.push_back({LayerKind::Dense, h * cfg.segment_len, h, Activation::Tanh, 0});
    specs.push_back({LayerKind::Dense, h, cfg.latent_dim, Activation::Identity, 0});
  }
  return specs;
}

nn::SeqBatch pack(const std::vector<const Segment*>& segs) {
  if (segs.empty()) throw DataError("cannot pack an empty segment batch");
  const int T = segs.front()->length();
  const int dim = segs.front()->dim();
  const int B = static_cast<int>(segs.size());
  for (const Segment* s : segs) {
    if (s->length() != T || s->dim() != dim) {
      throw DataError("batched segments must share length and dimension");
    }
  }
  nn::SeqBatch batch;
  batch.steps.reserve(static_cast<size_t>(T));
  for (int t = 0; t < T; ++t) {
    nn::Mat m(B, dim);
    for (int b = 0; b < B; ++b) m.row(b) = segs[static_cast<size_t>(b)]->steps.row(t);
    batch.steps.push_back(std::move(m));
  }
  return batch;
}

// Pre-sampled L1 segments with tier and source tags; Strategy 1 triplets are
// drawn from this bank.
struct SegmentBank {
  std::vector<Segment> segments;
  std::vector<size_t> source;                 // trajectory index per segment
  std::vector<std::vector<size_t>> by_tier;   // rank -> bank indices

  void build(const SegmentSampler& sampler, int count, Rng& rng) {
    const size_t n_traj = sampler.size();
    by_tier.assign(sampler.corpus().tiers().size(), {});
    for (int i = 0; i < count; ++i) {
      const size_t ti = rng.uniform_int(n_traj);
      Segment seg = sampler.sample_window(ti, sampler.config().segment_len, rng);
      if (!seg.tier) continue;  // unlabeled trajectories carry no S1 signal
      by_tier[static_cast<size_t>(seg.tier->rank)].push_back(segments.size());
      segments.push_back(std::move(seg));
      source.push_back(ti);
    }
  }

  const Segment* draw_s1(int tier, size_t exclude_source, Rng& rng,
                         size_t* src_out) const {
    const auto& pool = by_tier[static_cast<size_t>(tier)];
    for (int tries = 0; tries < 256; ++tries) {
      const size_t idx = pool[rng.uniform_int(pool.size())];
      if (source[idx] != exclude_source) {
        if (src_out) *src_out = source[idx];
        return &segments[idx];
      }
    }
    throw DataError("segment bank lacks a second source trajectory in tier rank " +
                    std::to_string(tier));
  }
};

void check_training_corpus(const Corpus& known, const EncoderConfig& cfg) {
  if (known.empty()) throw DataError("training corpus is empty");
  if (!known.fully_labeled()) {
    throw DataError("encoder training requires a fully labeled corpus");
  }
  const int min_len = 2 * std::max({cfg.segment_len, cfg.initial_len, cfg.final_len});
  int tiers_with_data = 0;
  std::vector<int> counts(known.tiers().size(), 0);
  for (const auto& t : known.trajectories()) {
    if (t.length() < min_len) {
      throw DataError("trajectory '" + t.id + "' shorter than 2 x max segment "
                      "length (" + std::to_string(min_len) + ")");
    }
    counts[static_cast<size_t>(t.label->rank)]++;
  }
  for (int c : counts) {
    if (c > 0) tiers_with_data++;
  }
  if (tiers_with_data < 2) {
    throw DataError("encoder training needs trajectories in at least 2 tiers");
  }
}

}  // namespace

EncoderModel init_encoder(const EncoderConfig& cfg, int obs_dim, uint64_t seed) {
  validate_encoder_config(cfg);
  EncoderModel model;
  model.config = cfg;
  model.latent_dim = cfg.latent_dim;
  model.input_dim = obs_dim + (cfg.position_encoding ? 1 : 0);
  Rng root(seed);
  Rng init_rng = root.fork(0);
  model.net = nn::build_model(arch_specs(cfg, model.input_dim), init_rng);
  return model;
}

EncoderModel train_encoder(const Corpus& known, const EncoderConfig& cfg,
                           uint64_t seed, TrainTrace* trace) {
  validate_encoder_config(cfg);
  if (known.empty()) throw DataError("training corpus is empty");
  EncoderModel model = init_encoder(cfg, known.obs_dim(), seed);
  if (cfg.steps == 0) return model;

  check_training_corpus(known, cfg);
  SegmentSampler sampler(known, cfg.sampler());

  Rng root(seed);
  Rng bank_rng = root.fork(1);
  Rng step_rng = root.fork(2);

  SegmentBank bank;
  if (cfg.s1) {
    bank.build(sampler, cfg.num_segments, bank_rng);
    int tiers_nonempty = 0;
    for (const auto& pool : bank.by_tier) {
      if (!pool.empty()) tiers_nonempty++;
    }
    if (tiers_nonempty < 2) {
      throw DataError("segment bank does not cover two tiers; corpus too small");
    }
  }

  const double p_s1 =
      cfg.s1 && cfg.s2_enabled() ? cfg.s1_s2_ratio / (1.0 + cfg.s1_s2_ratio)
      : cfg.s1                   ? 1.0
                                 : 0.0;
  S2Options s2opts{cfg.s2_initial, cfg.s2_final};

  nn::AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  nn::AdamState adam = nn::make_adam_state(model.net);

  // anchor/positive/negative lists per length class: S1, S2-initial, S2-final
  struct Group {
    std::vector<Segment> a, p, n;
  };

  for (int step = 0; step < cfg.steps; ++step) {
    Group groups[3];
    for (int b = 0; b < cfg.batch; ++b) {
      const bool use_s1 = step_rng.uniform() < p_s1;
      if (use_s1) {
        std::vector<int> anchor_tiers;
        for (size_t r = 0; r < bank.by_tier.size(); ++r) {
          if (!bank.by_tier[r].empty()) anchor_tiers.push_back(static_cast<int>(r));
        }
        const int tier = anchor_tiers[step_rng.uniform_int(anchor_tiers.size())];
        size_t a_src = 0;
        const Segment* a = bank.draw_s1(tier, SIZE_MAX, step_rng, &a_src);
        const Segment* p = bank.draw_s1(tier, a_src, step_rng, nullptr);
        std::vector<int> neg_tiers;
        for (int r : anchor_tiers) {
          if (r != tier) neg_tiers.push_back(r);
        }
        const int ntier = neg_tiers[step_rng.uniform_int(neg_tiers.size())];
        const auto& npool = bank.by_tier[static_cast<size_t>(ntier)];
        const Segment* n = &bank.segments[npool[step_rng.uniform_int(npool.size())]];
        groups[0].a.push_back(*a);
        groups[0].p.push_back(*p);
        groups[0].n.push_back(*n);
      } else {
        Triplet t = sampler.sample_triplet_s2(s2opts, step_rng);
        if (cfg.time_warp && cfg.max_warp > 0) {
          t.anchor = time_warp(t.anchor, cfg.max_warp, step_rng);
          t.positive = time_warp(t.positive, cfg.max_warp, step_rng);
        }
        Group& g = t.anchor.region == Region::Initial ? groups[1] : groups[2];
        g.a.push_back(std::move(t.anchor));
        g.p.push_back(std::move(t.positive));
        g.n.push_back(std::move(t.negative));
      }
    }

    nn::zero_grads(model.net);
    double loss_sum = 0;
    for (Group& g : groups) {
      if (g.a.empty()) continue;
      auto ptrs = [](const std::vector<Segment>& v) {
        std::vector<const Segment*> out;
        out.reserve(v.size());
        for (const auto& s : v) out.push_back(&s);
        return out;
      };
      nn::Trace ta, tp, tn;
      nn::Mat ea = nn::forward(model.net, pack(ptrs(g.a)), &ta);
      nn::Mat ep = nn::forward(model.net, pack(ptrs(g.p)), &tp);
      nn::Mat en = nn::forward(model.net, pack(ptrs(g.n)), &tn);
      nn::TripletLossResult lr = nn::triplet_margin_loss_batch(ea, ep, en, cfg.margin);
      const double w = static_cast<double>(g.a.size()) / cfg.batch;
      loss_sum += lr.mean_loss * w;
      nn::backward(model.net, ta, lr.grad_a * w);
      nn::backward(model.net, tp, lr.grad_p * w);
      nn::backward(model.net, tn, lr.grad_n * w);
    }
    nn::adam_step(model.net, adam, adam_cfg);
    if (trace) trace->loss.push_back(loss_sum);
  }
  return model;
}

nn::Vec encode(const EncoderModel& model, const Segment& seg) {
  if (seg.dim() != model.input_dim) {
    throw DataError("shape mismatch: segment dim " + std::to_string(seg.dim()) +
                    " vs encoder input dim " + std::to_string(model.input_dim));
  }
  return nn::forward_single(model.net, seg.steps);
}

nn::Mat encode_batch(const EncoderModel& model,
                     const std::vector<const Segment*>& segs) {
  for (const Segment* s : segs) {
    if (s->dim() != model.input_dim) {
      throw DataError("shape mismatch in encode_batch");
    }
  }
  return nn::forward(model.net, pack(segs), nullptr);
}

std::string encoder_content_hash(const EncoderModel& model) {
  return content_hash(nn::model_to_json(model.net) + "|" +
                      std::to_string(model.latent_dim) + "|" +
                      std::to_string(model.input_dim));
}

std::string encoder_to_json(const EncoderModel& model, const std::string& extra_json) {
  json j;
  j["format"] = "l2d-encoder";
  j["version"] = 1;
  j["latent_dim"] = model.latent_dim;
  j["input_dim"] = model.input_dim;
  const EncoderConfig& c = model.config;
  j["config"] = {{"latent_dim", c.latent_dim},
                 {"hidden_dim", c.hidden_dim},
                 {"segment_len", c.segment_len},
                 {"initial_len", c.initial_len},
                 {"final_len", c.final_len},
                 {"position_encoding", c.position_encoding},
                 {"s1", c.s1},
                 {"s2_initial", c.s2_initial},
                 {"s2_final", c.s2_final},
                 {"time_warp", c.time_warp},
                 {"max_warp", c.max_warp},
                 {"s1_s2_ratio", c.s1_s2_ratio},
                 {"steps", c.steps},
                 {"batch", c.batch},
                 {"lr", c.lr},
                 {"margin", c.margin},
                 {"num_segments", c.num_segments},
                 {"arch", c.arch}};
  j["net"] = json::parse(nn::model_to_json(model.net));
  j["content_hash"] = encoder_content_hash(model);
  if (!extra_json.empty()) {
    json extra = json::parse(extra_json);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  }
  return j.dump();
}

EncoderModel encoder_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed encoder artifact: ") + e.what());
  }
  if (!j.contains("format") || j["format"] != "l2d-encoder") {
    throw DataError("not an encoder artifact");
  }
  EncoderModel m;
  m.latent_dim = j.at("latent_dim").get<int>();
  m.input_dim = j.at("input_dim").get<int>();
  const json& c = j.at("config");
  m.config.latent_dim = c.at("latent_dim").get<int>();
  m.config.hidden_dim = c.at("hidden_dim").get<int>();
  m.config.segment_len = c.at("segment_len").get<int>();
  m.config.initial_len = c.at("initial_len").get<int>();
  m.config.final_len = c.at("final_len").get<int>();
  m.config.position_encoding = c.at("position_encoding").get<bool>();
  m.config.s1 = c.at("s1").get<bool>();
  m.config.s2_initial = c.at("s2_initial").get<bool>();
  m.config.s2_final = c.at("s2_final").get<bool>();
  m.config.time_warp = c.at("time_warp").get<bool>();
  m.config.max_warp = c.at("max_warp").get<double>();
  m.config.s1_s2_ratio = c.at("s1_s2_ratio").get<double>();
  m.config.steps = c.at("steps").get<int>();
  m.config.batch = c.at("batch").get<int>();
  m.config.lr = c.at("lr").get<double>();
  m.config.margin = c.at("margin").get<double>();
  m.config.num_segments = c.at("num_segments").get<int>();
  m.config.arch = c.at("arch").get<std::string>();
  m.net = nn::model_from_json(j.at("net").dump());
  if (j.contains("content_hash") &&
      j.at("content_hash").get<std::string>() != encoder_content_hash(m)) {
    throw DataError("encoder artifact failed its integrity check");
  }
  return m;
}

double triplet_satisfaction(const EncoderModel& model,
                            const std::vector<Triplet>& triplets) {
  if (triplets.empty()) throw DataError("no triplets to evaluate");
  int ok = 0;
  for (const auto& t : triplets) {
    nn::Vec a = encode(model, t.anchor);
    nn::Vec p = encode(model, t.positive);
    nn::Vec n = encode(model, t.negative);
    if ((a - p).norm() < (a - n).norm()) ok++;
  }
  return static_cast<double>(ok) / static_cast<double>(triplets.size());
}

}  // namespace l2d
