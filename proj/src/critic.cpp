#include "l2d/critic.hpp"

#include <json.hpp>

#include "l2d/serialize.hpp"

namespace l2d {

using nlohmann::json;

void validate_critic_config(const CriticConfig& cfg) {
  if (cfg.hidden_dim < 1) throw ConfigError("critic hidden_dim must be >= 1");
  if (!(cfg.label_noise >= 0.0 && cfg.label_noise < 0.5)) {
    throw ConfigError("label_noise must lie in [0, 0.5)");
  }
  if (cfg.steps < 0 || cfg.batch < 1) {
    throw ConfigError("critic steps must be >= 0 and batch >= 1");
  }
  if (cfg.lr <= 0) throw ConfigError("critic lr must be > 0");
}

CriticModel init_critic(const CriticConfig& cfg, const EncoderModel& encoder,
                        uint64_t seed) {
  validate_critic_config(cfg);
  CriticModel m;
  m.config = cfg;
  m.input_dim = encoder.latent_dim;
  m.encoder_hash = encoder_content_hash(encoder);
  Rng root(seed);
  Rng init_rng = root.fork(0);
  using nn::Activation;
  using nn::LayerKind;
  m.net = nn::build_model(
      {{LayerKind::Dense, encoder.latent_dim, cfg.hidden_dim, Activation::Tanh, 0},
       {LayerKind::Dense, cfg.hidden_dim, 1, Activation::Identity, 0}},
      init_rng);
  return m;
}

CriticModel train_critic(const EncoderModel& encoder, const Corpus& known,
                         const CriticConfig& cfg, uint64_t seed,
                         TrainTrace* trace) {
  validate_critic_config(cfg);
  CriticModel critic = init_critic(cfg, encoder, seed);
  if (cfg.steps == 0) return critic;

  if (known.empty()) throw DataError("training corpus is empty");
  if (!known.fully_labeled()) {
    throw DataError("critic training requires a fully labeled corpus");
  }
  SegmentSampler sampler(known, encoder.config.sampler());

  Rng root(seed);
  Rng step_rng = root.fork(2);

  nn::AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  nn::AdamState adam = nn::make_adam_state(critic.net);

  for (int step = 0; step < cfg.steps; ++step) {
    std::vector<PreferencePair> pairs;
    pairs.reserve(static_cast<size_t>(cfg.batch));
    for (int b = 0; b < cfg.batch; ++b) {
      pairs.push_back(sampler.sample_preference_pair(step_rng));
    }
    std::vector<const Segment*> better, worse;
    for (const auto& p : pairs) {
      better.push_back(&p.better);
      worse.push_back(&p.worse);
    }
    nn::Mat eb = encode_batch(encoder, better);
    nn::Mat ew = encode_batch(encoder, worse);

    nn::SeqBatch bb, bw;
    bb.steps.push_back(eb);
    bw.steps.push_back(ew);
    nn::Trace tb, tw;
    nn::Mat sb = nn::forward(critic.net, bb, &tb, /*input_pooled=*/true);
    nn::Mat sw = nn::forward(critic.net, bw, &tw, /*input_pooled=*/true);
    nn::RankingLossResult lr =
        nn::ranking_loss_batch(sb.col(0), sw.col(0), cfg.label_noise);
    nn::zero_grads(critic.net);
    nn::backward(critic.net, tb, lr.grad_better);
    nn::backward(critic.net, tw, lr.grad_worse);
    nn::adam_step(critic.net, adam, adam_cfg);
    if (trace) trace->loss.push_back(lr.mean_loss);
  }
  return critic;
}

double score(const CriticModel& critic, const EncoderModel& encoder,
             const Segment& seg) {
  nn::Vec latent = encode(encoder, seg);
  if (static_cast<int>(latent.size()) != critic.input_dim) {
    throw DataError("shape mismatch: latent dim vs critic input dim");
  }
  return nn::forward_single(critic.net, latent.transpose(), /*input_pooled=*/true)(0);
}

nn::Vec score_batch(const CriticModel& critic, const EncoderModel& encoder,
                    const std::vector<const Segment*>& segs) {
  nn::Mat latents = encode_batch(encoder, segs);
  if (static_cast<int>(latents.cols()) != critic.input_dim) {
    throw DataError("shape mismatch: latent dim vs critic input dim");
  }
  nn::SeqBatch b;
  b.steps.push_back(latents);
  return nn::forward(critic.net, b, nullptr, /*input_pooled=*/true).col(0);
}

void verify_lineage(const EncoderModel& encoder, const CriticModel& critic) {
  if (critic.encoder_hash != encoder_content_hash(encoder)) {
    throw DataError("critic/encoder lineage mismatch: critic was trained "
                    "against a different encoder");
  }
}

std::string critic_content_hash(const CriticModel& model) {
  return content_hash(nn::model_to_json(model.net) + "|" + model.encoder_hash);
}

std::string critic_to_json(const CriticModel& model, const std::string& extra_json) {
  json j;
  j["format"] = "l2d-critic";
  j["version"] = 1;
  j["input_dim"] = model.input_dim;
  j["encoder_hash"] = model.encoder_hash;
  j["config"] = {{"hidden_dim", model.config.hidden_dim},
                 {"label_noise", model.config.label_noise},
                 {"steps", model.config.steps},
                 {"batch", model.config.batch},
                 {"lr", model.config.lr}};
  j["net"] = json::parse(nn::model_to_json(model.net));
  j["content_hash"] = critic_content_hash(model);
  if (!extra_json.empty()) {
    json extra = json::parse(extra_json);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  }
  return j.dump();
}

CriticModel critic_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed critic artifact: ") + e.what());
  }
  if (!j.contains("format") || j["format"] != "l2d-critic") {
    throw DataError("not a critic artifact");
  }
  CriticModel m;
  m.input_dim = j.at("input_dim").get<int>();
  m.encoder_hash = j.at("encoder_hash").get<std::string>();
  const json& c = j.at("config");
  m.config.hidden_dim = c.at("hidden_dim").get<int>();
  m.config.label_noise = c.at("label_noise").get<double>();
  m.config.steps = c.at("steps").get<int>();
  m.config.batch = c.at("batch").get<int>();
  m.config.lr = c.at("lr").get<double>();
  m.net = nn::model_from_json(j.at("net").dump());
  if (j.contains("content_hash") &&
      j.at("content_hash").get<std::string>() != critic_content_hash(m)) {
    throw DataError("critic artifact failed its integrity check");
  }
  return m;
}

double pair_accuracy(const CriticModel& critic, const EncoderModel& encoder,
                     const std::vector<PreferencePair>& pairs) {
  if (pairs.empty()) throw DataError("no pairs to evaluate");
  std::vector<const Segment*> better, worse;
  for (const auto& p : pairs) {
    better.push_back(&p.better);
    worse.push_back(&p.worse);
  }
  nn::Vec sb = score_batch(critic, encoder, better);
  nn::Vec sw = score_batch(critic, encoder, worse);
  int ok = 0;
  for (int i = 0; i < sb.size(); ++i) {
    if (sb(i) > sw(i)) ok++;
  }
  return static_cast<double>(ok) / static_cast<double>(sb.size());
}

}  // namespace l2d
