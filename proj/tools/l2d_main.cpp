#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "l2d/config.hpp"
#include "l2d/corpus.hpp"
#include "l2d/critic.hpp"
#include "l2d/encoder.hpp"
#include "l2d/evalkit.hpp"
#include "l2d/filterpipe.hpp"
#include "l2d/gmm.hpp"
#include "l2d/sampling.hpp"
#include "l2d/serialize.hpp"
#include "l2d/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  bool seed_set = false;
  uint64_t seed = 0;
  std::string out_dir = ".";
};

l2d::RunConfig effective_config(const CommonArgs& args) {
  l2d::RunConfig cfg;
  if (!args.config_path.empty()) cfg = l2d::load_config_file(args.config_path, cfg);
  for (const auto& kv : args.overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw l2d::ConfigError("--set expects key=value, got '" + kv + "'");
    }
    l2d::set_config_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.seed_set) cfg.seed = args.seed;
  l2d::validate_config(cfg);
  std::cout << "effective config: " << l2d::config_echo_text(cfg) << "\n";
  return cfg;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw l2d::IoError("cannot create output directory '" + dir + "'");
}

std::string artifact_header(const l2d::RunConfig& cfg,
                            const std::vector<std::pair<std::string, std::string>>& hashes) {
  json j;
  j["config"] = json::parse(l2d::config_json(cfg));
  for (const auto& [key, value] : hashes) j[key] = value;
  return j.dump();
}

struct Artifacts {
  l2d::EncoderModel encoder;
  l2d::CriticModel critic;
  l2d::QualityGMM gmm;
  std::string encoder_hash, critic_hash;
};

Artifacts load_artifacts(const std::string& models_dir, bool need_gmm) {
  Artifacts a;
  a.encoder = l2d::encoder_from_json(l2d::read_file(models_dir + "/encoder.json"));
  a.critic = l2d::critic_from_json(l2d::read_file(models_dir + "/critic.json"));
  l2d::verify_lineage(a.encoder, a.critic);
  a.encoder_hash = l2d::encoder_content_hash(a.encoder);
  a.critic_hash = l2d::critic_content_hash(a.critic);
  if (need_gmm) {
    const std::string text = l2d::read_file(models_dir + "/gmm.json");
    a.gmm = l2d::gmm_from_json(text);
    json j = json::parse(text);
    if (j.value("encoder_hash", a.encoder_hash) != a.encoder_hash ||
        j.value("critic_hash", a.critic_hash) != a.critic_hash) {
      throw l2d::DataError("GMM artifact lineage does not match the loaded "
                           "encoder/critic");
    }
  }
  return a;
}

void write_reports_and_selection(const l2d::RunConfig& cfg, const Artifacts& art,
                                 const l2d::Corpus& corpus,
                                 const std::string& corpus_hash,
                                 const std::string& out_dir, bool do_select) {
  std::ostringstream reports;
  json header;
  header["format"] = "l2d-reports";
  header["config"] = json::parse(l2d::config_json(cfg));
  header["encoder_hash"] = art.encoder_hash;
  header["critic_hash"] = art.critic_hash;
  header["corpus_hash"] = corpus_hash;
  reports << header.dump() << "\n";

  l2d::Rng root(cfg.seed);
  std::vector<l2d::TrajectoryScoreReport> reps;
  const auto& trajs = corpus.trajectories();
  for (size_t i = 0; i < trajs.size(); ++i) {
    reps.push_back(l2d::score_trajectory(art.encoder, art.critic, art.gmm,
                                         trajs[i], cfg.k,
                                         root.fork(0x5c0 + i).seed(),
                                         cfg.stride_partition));
    reports << l2d::report_to_json(reps.back()) << "\n";
  }
  l2d::write_file(out_dir + "/reports.jsonl", reports.str());

  if (do_select) {
    if (cfg.top_k > static_cast<int>(reps.size())) {
      throw l2d::ConfigError("top_k (" + std::to_string(cfg.top_k) +
                             ") exceeds corpus size (" +
                             std::to_string(reps.size()) + ")");
    }
    std::vector<std::string> ids = l2d::select_top(reps, cfg.top_k);
    std::ostringstream sel;
    json sh;
    sh["format"] = "l2d-selection";
    sh["config"] = json::parse(l2d::config_json(cfg));
    sh["encoder_hash"] = art.encoder_hash;
    sh["critic_hash"] = art.critic_hash;
    sh["corpus_hash"] = corpus_hash;
    sel << sh.dump() << "\n";
    for (size_t i = 0; i < ids.size(); ++i) {
      json rec;
      rec["rank"] = i;
      rec["id"] = ids[i];
      sel << rec.dump() << "\n";
    }
    l2d::write_file(out_dir + "/selection.jsonl", sel.str());
  }
}

std::vector<std::string> load_selection(const std::string& path) {
  std::istringstream in(l2d::read_file(path));
  std::string line;
  std::vector<std::string> ids;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (first) {
      first = false;
      if (j.value("format", "") != "l2d-selection") {
        throw l2d::DataError("'" + path + "' is not a selection file");
      }
      continue;
    }
    ids.push_back(j.at("id").get<std::string>());
  }
  return ids;
}

int cmd_gen(const CommonArgs& args) {
  l2d::RunConfig cfg = effective_config(args);
  ensure_out_dir(args.out_dir);
  l2d::Corpus corpus = l2d::generate_corpus(l2d::gen_config(cfg), cfg.seed);
  const std::string cfg_hash = l2d::content_hash(l2d::config_json(cfg));
  const std::string header = artifact_header(cfg, {{"config_hash", cfg_hash}});
  l2d::save_corpus(corpus, args.out_dir + "/corpus.jsonl", header);
  auto split = l2d::split_corpus(corpus, l2d::parse_split_mode(cfg.split_mode),
                                 cfg.split_fraction, cfg.seed);
  l2d::save_corpus(split.known, args.out_dir + "/corpus_known.jsonl", header);
  l2d::save_corpus(split.unknown, args.out_dir + "/corpus_unknown.jsonl", header);
  std::cout << "wrote " << corpus.size() << " trajectories ("
            << split.known.size() << " known / " << split.unknown.size()
            << " unknown) to " << args.out_dir << "\n";
  return 0;
}

std::string loss_trace_text(const l2d::TrainTrace& trace) {
  std::ostringstream out;
  out << "step\tloss\n";
  for (size_t i = 0; i < trace.loss.size(); ++i) {
    out << i << "\t" << l2d::format_double(trace.loss[i]) << "\n";
  }
  return out.str();
}

int cmd_train(const CommonArgs& args, const std::string& corpus_path) {
  l2d::RunConfig cfg = effective_config(args);
  ensure_out_dir(args.out_dir);
  const std::string corpus_bytes = l2d::read_file(corpus_path);
  const std::string corpus_hash = l2d::content_hash(corpus_bytes);
  l2d::Corpus known = l2d::parse_corpus(corpus_bytes, corpus_path);
  if (!known.fully_labeled()) {
    throw l2d::DataError("training corpus must be fully labeled");
  }

  l2d::TrainTrace enc_trace;
  l2d::EncoderModel encoder =
      l2d::train_encoder(known, l2d::encoder_config(cfg), cfg.seed, &enc_trace);
  l2d::TrainTrace cr_trace;
  l2d::CriticModel critic =
      l2d::train_critic(encoder, known, l2d::critic_config(cfg), cfg.seed, &cr_trace);
  l2d::QualityGMM gmm = l2d::fit_quality_gmm(encoder, critic, known, cfg.k,
                                             cfg.seed, cfg.weighted_assign);

  json extra;
  extra["config"] = json::parse(l2d::config_json(cfg));
  extra["corpus_hash"] = corpus_hash;
  l2d::write_file(args.out_dir + "/encoder.json",
                  l2d::encoder_to_json(encoder, extra.dump()));
  l2d::write_file(args.out_dir + "/critic.json",
                  l2d::critic_to_json(critic, extra.dump()));
  json gmm_extra = extra;
  gmm_extra["encoder_hash"] = l2d::encoder_content_hash(encoder);
  gmm_extra["critic_hash"] = l2d::critic_content_hash(critic);
  l2d::write_file(args.out_dir + "/gmm.json", l2d::gmm_to_json(gmm, gmm_extra.dump()));
  l2d::write_file(args.out_dir + "/encoder_loss.tsv", loss_trace_text(enc_trace));
  l2d::write_file(args.out_dir + "/critic_loss.tsv", loss_trace_text(cr_trace));
  std::cout << "wrote encoder/critic/gmm artifacts to " << args.out_dir << "\n";
  return 0;
}

int cmd_score(const CommonArgs& args, const std::string& corpus_path,
              const std::string& models_dir, bool do_select) {
  l2d::RunConfig cfg = effective_config(args);
  ensure_out_dir(args.out_dir);
  Artifacts art = load_artifacts(models_dir, /*need_gmm=*/true);
  const std::string corpus_bytes = l2d::read_file(corpus_path);
  const std::string corpus_hash = l2d::content_hash(corpus_bytes);
  // scoring never reads labels
  l2d::Corpus corpus = l2d::parse_corpus(corpus_bytes, corpus_path).stripped();
  if (corpus.empty()) throw l2d::DataError("corpus has no trajectories to score");
  write_reports_and_selection(cfg, art, corpus, corpus_hash, args.out_dir, do_select);
  std::cout << "scored " << corpus.size() << " trajectories into " << args.out_dir
            << "\n";
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& corpus_path,
             const std::string& models_dir, const std::string& selection_path) {
  l2d::RunConfig cfg = effective_config(args);
  ensure_out_dir(args.out_dir);
  Artifacts art = load_artifacts(models_dir, /*need_gmm=*/false);
  const std::string corpus_bytes = l2d::read_file(corpus_path);
  const std::string corpus_hash = l2d::content_hash(corpus_bytes);
  l2d::Corpus corpus = l2d::parse_corpus(corpus_bytes, corpus_path);
  if (!corpus.fully_labeled()) {
    throw l2d::DataError("evaluation corpus must carry labels");
  }
  const std::vector<std::string> header = {
      "config: " + l2d::config_echo_text(cfg),
      "encoder_hash: " + art.encoder_hash,
      "critic_hash: " + art.critic_hash,
      "corpus_hash: " + corpus_hash,
  };
  l2d::SeparabilityReport sep = l2d::separability_report(
      art.encoder, art.critic, corpus, cfg.n_segments_per_tier, cfg.seed,
      cfg.normalize_scores);
  l2d::write_file(args.out_dir + "/separability.tsv",
                  l2d::separability_to_text(sep, header));
  auto by_tier = l2d::tier_scores(art.encoder, art.critic, corpus,
                                  cfg.n_segments_per_tier, cfg.seed);
  l2d::export_histogram(by_tier, cfg.hist_bins, args.out_dir + "/histogram.tsv",
                        header);
  if (!selection_path.empty()) {
    std::vector<std::string> ids = load_selection(selection_path);
    l2d::SelectionConfusion conf = l2d::selection_confusion(ids, corpus);
    l2d::write_file(args.out_dir + "/confusion.tsv",
                    l2d::confusion_to_text(conf, header));
  }
  std::cout << "total separability distance: " << l2d::format_double(sep.total)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"demonstration-quality estimation pipeline"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string corpus_path, models_dir = ".", selection_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "config file (key = value lines)");
    cmd->add_option("--set", args.overrides, "override a config key (key=value)");
    cmd->add_option("--seed", args.seed, "seed override")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--out", args.out_dir, "output directory");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic corpus and its splits");
  add_common(gen);

  CLI::App* train = app.add_subcommand("train", "train encoder, critic and GMM");
  add_common(train);
  train->add_option("--corpus", corpus_path, "labeled corpus file")->required();

  CLI::App* score = app.add_subcommand("score", "score trajectories and write reports");
  add_common(score);
  score->add_option("--corpus", corpus_path, "corpus file to score")->required();
  score->add_option("--models", models_dir, "directory with trained artifacts");

  CLI::App* filter = app.add_subcommand("filter", "score and select the top demonstrations");
  add_common(filter);
  filter->add_option("--corpus", corpus_path, "corpus file to filter")->required();
  filter->add_option("--models", models_dir, "directory with trained artifacts");

  CLI::App* eval = app.add_subcommand("eval", "separability/confusion/histogram reports");
  add_common(eval);
  eval->add_option("--corpus", corpus_path, "labeled evaluation corpus")->required();
  eval->add_option("--models", models_dir, "directory with trained artifacts");
  eval->add_option("--selection", selection_path, "selection file from 'filter'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(args);
    if (train->parsed()) return cmd_train(args, corpus_path);
    if (score->parsed()) return cmd_score(args, corpus_path, models_dir, false);
    if (filter->parsed()) return cmd_score(args, corpus_path, models_dir, true);
    if (eval->parsed()) return cmd_eval(args, corpus_path, models_dir, selection_path);
  } catch (const l2d::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const l2d::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const l2d::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
