// wmtk: watermark embedding, detection and tracing benchmarks.
//
// Machine-readable JSON goes to stdout; --format table switches the report
// commands to aligned text. Exit codes: 0 ok, 1 operational error, 2 usage
// error, 3 detect ran fine but did not flag.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wmtk/bitstats.hpp"
#include "wmtk/codec.hpp"
#include "wmtk/imageio.hpp"
#include "wmtk/keyfile.hpp"
#include "wmtk/synth.hpp"
#include "wmtk/tracing.hpp"
#include "wmtk/transforms.hpp"

namespace {

using nlohmann::json;

json config_echo(int argc, char** argv) {
  json cfg;
  cfg["argv"] = json::array();
  for (int i = 1; i < argc; ++i) cfg["argv"].push_back(argv[i]);
  return cfg;
}

void emit(const json& out) { std::cout << out.dump(2) << "\n"; }

json report_json(const wmtk::ExperimentReport& rep) { return json::parse(report_to_json(rep)); }

void emit_report(const wmtk::ExperimentReport& rep, const std::string& format,
                 const std::string& out_path, const std::string& csv_path, const json& cfg) {
  if (format == "table") {
    std::cout << report_to_table(rep);
  } else {
    json j = report_json(rep);
    j["config"] = cfg;
    emit(j);
  }
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot open report path " + out_path);
    json j = report_json(rep);
    j["config"] = cfg;
    f << j.dump(2) << "\n";
  }
  if (!csv_path.empty()) {
    std::ofstream f(csv_path);
    if (!f) throw std::runtime_error("cannot open csv path " + csv_path);
    f << report_to_csv(rep);
  }
}

std::vector<wmtk::ImageBuffer> load_corpus_dir(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto p = e.path().string();
    if (p.ends_with(".png") || p.ends_with(".ppm")) files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .png/.ppm images under " + dir);
  std::vector<wmtk::ImageBuffer> corpus;
  corpus.reserve(files.size());
  for (const auto& f : files) corpus.push_back(wmtk::load_image(f));
  return corpus;
}

struct CorpusOpts {
  std::string dir;
  int synthetic = 0;
  int size = 512;

  std::vector<wmtk::ImageBuffer> load(uint64_t seed) const {
    if (!dir.empty()) return load_corpus_dir(dir);
    if (synthetic > 0) return wmtk::synthetic_corpus(synthetic, size, size, seed);
    throw std::runtime_error("need --corpus-dir or --synthetic N");
  }
};

void add_corpus_opts(CLI::App* cmd, CorpusOpts& c) {
  cmd->add_option("--corpus-dir", c.dir, "directory of .png/.ppm images");
  cmd->add_option("--synthetic", c.synthetic, "use N generated seed images instead");
  cmd->add_option("--size", c.size, "side of generated images")->capture_default_str();
}

wmtk::BitMessage message_for(const wmtk::CodecKey& key, const std::string& bits) {
  if (bits.empty()) return key_default_message(key);
  wmtk::BitMessage m = wmtk::BitMessage::from_string(bits);
  if (m.k() != key.k) throw std::runtime_error("--message length does not match key k");
  return m;
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return std::to_string(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"watermark detection & tracing toolkit"};
  app.require_subcommand(1);
  const json cfg = config_echo(argc, argv);

  // keygen ------------------------------------------------------------------
  auto* c_keygen = app.add_subcommand("keygen", "create a codec key file");
  std::string kg_kind = "spreadspectrum", kg_out;
  int kg_k = 48, kg_canon = 256;
  uint64_t kg_seed = 0;
  double kg_alpha = 0.03, kg_delta = 36.0 / 255.0;
  c_keygen->add_option("--kind", kg_kind, "dctdwt | spreadspectrum")->capture_default_str();
  c_keygen->add_option("--k", kg_k, "payload bits")->capture_default_str();
  c_keygen->add_option("--seed", kg_seed, "key seed")->required();
  c_keygen->add_option("--alpha", kg_alpha)->capture_default_str();
  c_keygen->add_option("--delta", kg_delta)->capture_default_str();
  c_keygen->add_option("--canonical-size", kg_canon)->capture_default_str();
  c_keygen->add_option("--out", kg_out, "key file path")->required();

  // whiten-fit ----------------------------------------------------------------
  auto* c_whiten = app.add_subcommand("whiten-fit", "fit whitening on vanilla images");
  std::string wf_key, wf_out;
  CorpusOpts wf_corpus;
  wf_corpus.synthetic = 0;
  wf_corpus.size = 256;
  uint64_t wf_seed = 0;
  double wf_floor = -1.0;
  int wf_samples = 1000;
  c_whiten->add_option("--key", wf_key)->required();
  c_whiten->add_option("--out", wf_out, "output key file (defaults to --key)");
  add_corpus_opts(c_whiten, wf_corpus);
  c_whiten->add_option("--samples", wf_samples, "synthetic corpus size when no dir given")
      ->capture_default_str();
  auto* wf_seed_opt = c_whiten->add_option("--seed", wf_seed, "corpus seed");
  c_whiten->add_option("--eigen-floor", wf_floor, "negative selects the default");

  // embed ---------------------------------------------------------------------
  auto* c_embed = app.add_subcommand("embed", "embed a signature into an image");
  std::string em_key, em_in, em_out, em_msg;
  bool em_iterative = false;
  double em_lambda = 0.2;
  int em_steps = 10;
  c_embed->add_option("--key", em_key)->required();
  c_embed->add_option("--in", em_in)->required();
  c_embed->add_option("--out", em_out)->required();
  c_embed->add_option("--message", em_msg, "bit string; default derives from the key seed");
  c_embed->add_flag("--iterative", em_iterative, "loss-driven embedding (spread spectrum)");
  c_embed->add_option("--lambda", em_lambda)->capture_default_str();
  c_embed->add_option("--steps", em_steps)->capture_default_str();

  // extract ---------------------------------------------------------------------
  auto* c_extract = app.add_subcommand("extract", "extract the signature from an image");
  std::string ex_key, ex_in;
  c_extract->add_option("--key", ex_key)->required();
  c_extract->add_option("--in", ex_in)->required();

  // detect ------------------------------------------------------------------------
  auto* c_detect = app.add_subcommand("detect", "flag an image against one signature");
  std::string de_key, de_in, de_msg;
  double de_fpr = 1e-6;
  c_detect->add_option("--key", de_key)->required();
  c_detect->add_option("--image,--in", de_in)->required();
  c_detect->add_option("--fpr", de_fpr)->capture_default_str();
  c_detect->add_option("--message", de_msg, "reference bits; default derives from the key seed");

  // identify -------------------------------------------------------------------
  auto* c_identify = app.add_subcommand("identify", "attribute an image to one of N signatures");
  std::string id_key, id_in, id_sigs;
  double id_fpr = 1e-6;
  c_identify->add_option("--key", id_key)->required();
  c_identify->add_option("--image,--in", id_in)->required();
  c_identify->add_option("--signatures", id_sigs, "JSON array of bit strings")->required();
  c_identify->add_option("--fpr", id_fpr)->capture_default_str();

  // channel ---------------------------------------------------------------------
  auto* c_channel = app.add_subcommand("channel", "apply an edit chain to an image");
  std::string ch_in, ch_out, ch_spec;
  uint64_t ch_seed = 0;
  c_channel->add_option("--in", ch_in)->required();
  c_channel->add_option("--out", ch_out)->required();
  c_channel->add_option("--transform", ch_spec, "e.g. crop:0.5,brightness:1.5,jpeg:80")->required();
  c_channel->add_option("--seed", ch_seed, "drives seeded edits")->required();

  // metric -----------------------------------------------------------------------
  auto* c_metric = app.add_subcommand("metric", "psnr or ssim between two images");
  std::string mt_name, mt_a, mt_b;
  c_metric->add_option("name", mt_name, "psnr | ssim")->required();
  c_metric->add_option("a", mt_a)->required();
  c_metric->add_option("b", mt_b)->required();

  // bench-robustness ----------------------------------------------------------
  auto* c_bench = app.add_subcommand("bench-robustness", "bit accuracy per transform");
  std::string br_key, br_out, br_csv, br_format = "json";
  std::vector<std::string> br_transforms;
  CorpusOpts br_corpus;
  int br_nkeys = 10, br_jobs = 1;
  uint64_t br_seed = 0;
  bool br_iterative = false;
  double br_lambda = 0.2;
  c_bench->add_option("--key", br_key)->required();
  add_corpus_opts(c_bench, br_corpus);
  c_bench->add_option("--transform", br_transforms, "transform spec (repeatable)")->required();
  c_bench->add_option("--n-keys", br_nkeys, "number of random signatures")->capture_default_str();
  c_bench->add_option("--seed", br_seed)->required();
  c_bench->add_option("--jobs", br_jobs)->capture_default_str();
  c_bench->add_option("--out", br_out, "also write the JSON report here");
  c_bench->add_option("--csv", br_csv, "also write rows as CSV");
  c_bench->add_option("--format", br_format, "json | table")->capture_default_str();
  c_bench->add_flag("--iterative", br_iterative);
  c_bench->add_option("--lambda", br_lambda)->capture_default_str();

  // bench-detection -------------------------------------------------------------
  auto* c_bdet = app.add_subcommand("bench-detection", "TPR at thresholds for target FPRs");
  std::string bd_key, bd_out, bd_csv, bd_format = "json", bd_transform = "identity";
  std::vector<double> bd_fprs;
  CorpusOpts bd_corpus;
  double bd_bsc = 0.0;
  int bd_trials = 10000, bd_jobs = 1;
  uint64_t bd_seed = 0;
  c_bdet->add_option("--key", bd_key)->required();
  add_corpus_opts(c_bdet, bd_corpus);
  c_bdet->add_option("--transform", bd_transform, "channel spec")->capture_default_str();
  c_bdet->add_option("--bsc", bd_bsc, "bit-accuracy p; replaces the image channel");
  c_bdet->add_option("--target-fpr", bd_fprs, "target FPR (repeatable)")->required();
  c_bdet->add_option("--trials", bd_trials, "bsc mode trials")->capture_default_str();
  c_bdet->add_option("--seed", bd_seed)->required();
  c_bdet->add_option("--jobs", bd_jobs)->capture_default_str();
  c_bdet->add_option("--out", bd_out);
  c_bdet->add_option("--csv", bd_csv, "curve rows: transform, tau, fpr_theoretical, tpr");
  c_bdet->add_option("--format", bd_format)->capture_default_str();

  // sim-identify -----------------------------------------------------------------
  auto* c_simid = app.add_subcommand("sim-identify", "N-user identification simulation");
  int si_k = 48, si_users = 100, si_decoys = 0, si_per_user = 100, si_jobs = 1;
  double si_p = 0.92, si_fpr = 1e-6;
  uint64_t si_seed = 0;
  std::string si_out, si_format = "json";
  c_simid->add_option("--k", si_k)->capture_default_str();
  c_simid->add_option("--p", si_p, "per-bit accuracy of the channel")->capture_default_str();
  c_simid->add_option("--n-users", si_users)->capture_default_str();
  c_simid->add_option("--decoys", si_decoys)->capture_default_str();
  c_simid->add_option("--trials-per-user", si_per_user)->capture_default_str();
  c_simid->add_option("--fpr", si_fpr)->capture_default_str();
  c_simid->add_option("--seed", si_seed)->required();
  c_simid->add_option("--jobs", si_jobs)->capture_default_str();
  c_simid->add_option("--out", si_out);
  c_simid->add_option("--format", si_format)->capture_default_str();

  // sim-collusion ------------------------------------------------------------------
  auto* c_collude = app.add_subcommand("sim-collusion", "two-colluder marking-assumption model");
  int co_k = 48;
  int64_t co_bits = 48000;
  double co_p = 0.9;
  uint64_t co_seed = 0;
  std::string co_out, co_format = "json", co_ki, co_kj;
  c_collude->add_option("--k", co_k)->capture_default_str();
  c_collude->add_option("--p", co_p, "accuracy on agreeing positions")->capture_default_str();
  c_collude->add_option("--bits", co_bits, "total simulated bits")->capture_default_str();
  c_collude->add_option("--key-i", co_ki, "bit string; default random from seed");
  c_collude->add_option("--key-j", co_kj, "bit string; default random from seed");
  c_collude->add_option("--seed", co_seed)->required();
  c_collude->add_option("--out", co_out);
  c_collude->add_option("--format", co_format)->capture_default_str();

  // validate-fpr -----------------------------------------------------------------
  auto* c_vfpr = app.add_subcommand("validate-fpr", "empirical vs closed-form FPR");
  int vf_k = 48;
  std::vector<int> vf_taus;
  int64_t vf_trials = 1000000;
  uint64_t vf_seed = 0;
  std::string vf_source = "synthetic", vf_key, vf_out, vf_format = "json";
  CorpusOpts vf_corpus;
  c_vfpr->add_option("--k", vf_k)->capture_default_str();
  c_vfpr->add_option("--tau", vf_taus, "threshold (repeatable)")->required();
  c_vfpr->add_option("--trials", vf_trials)->capture_default_str();
  c_vfpr->add_option("--seed", vf_seed)->required();
  c_vfpr->add_option("--source", vf_source, "synthetic | extractor")->capture_default_str();
  c_vfpr->add_option("--key", vf_key, "extractor mode key file");
  add_corpus_opts(c_vfpr, vf_corpus);
  c_vfpr->add_option("--out", vf_out);
  c_vfpr->add_option("--format", vf_format)->capture_default_str();

  // attack-remove ------------------------------------------------------------------
  auto* c_remove = app.add_subcommand("attack-remove", "white-box watermark removal");
  std::string ar_key, ar_in, ar_out, ar_msg;
  double ar_floor = 26.0;
  uint64_t ar_seed = 0;
  c_remove->add_option("--key", ar_key)->required();
  c_remove->add_option("--in", ar_in)->required();
  c_remove->add_option("--out", ar_out)->required();
  c_remove->add_option("--psnr-floor", ar_floor)->capture_default_str();
  c_remove->add_option("--seed", ar_seed)->required();
  c_remove->add_option("--message", ar_msg, "signature to score accuracy against");

  // attack-forge --------------------------------------------------------------------
  auto* c_forge = app.add_subcommand("attack-forge", "unauthorized embedding");
  std::string af_key, af_in, af_out, af_victim;
  double af_floor = 30.0;
  c_forge->add_option("--key", af_key)->required();
  c_forge->add_option("--in", af_in)->required();
  c_forge->add_option("--out", af_out)->required();
  c_forge->add_option("--victim-message", af_victim, "bit string; default from the key seed");
  c_forge->add_option("--psnr-floor", af_floor)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (c_keygen->parsed()) {
      wmtk::KeygenParams params;
      params.alpha = kg_alpha;
      params.delta = kg_delta;
      params.canonical_size = kg_canon;
      const auto kind = kg_kind == "dctdwt" ? wmtk::CodecKind::dctdwt
                                            : wmtk::CodecKind::spreadspectrum;
      if (kg_kind != "dctdwt" && kg_kind != "spreadspectrum" && kg_kind != "ss") {
        throw std::runtime_error("unknown --kind " + kg_kind);
      }
      const wmtk::CodecKey key = wmtk::keygen(kind, kg_k, kg_seed, params);
      wmtk::save_key(key, kg_out);
      json out{{"written", kg_out},
               {"codec_kind", kg_kind == "ss" ? "spreadspectrum" : kg_kind},
               {"k", kg_k},
               {"seed", kg_seed},
               {"default_message", key_default_message(key).to_string()},
               {"config", cfg}};
      emit(out);
    } else if (c_whiten->parsed()) {
      wmtk::CodecKey key = wmtk::load_key(wf_key);
      if (wf_corpus.dir.empty() && !*wf_seed_opt) {
        throw std::runtime_error("--seed is required when fitting on a synthetic corpus");
      }
      std::vector<wmtk::ImageBuffer> corpus;
      if (!wf_corpus.dir.empty()) {
        corpus = load_corpus_dir(wf_corpus.dir);
      } else {
        corpus = wmtk::synthetic_corpus(wf_samples, wf_corpus.size, wf_corpus.size, wf_seed);
      }
      key.whitening = fit_ss_whitening(key, corpus, wf_floor);
      const std::string out_path = wf_out.empty() ? wf_key : wf_out;
      wmtk::save_key(key, out_path);
      emit(json{{"written", out_path},
                {"fitted_on", corpus.size()},
                {"eigen_floor", key.whitening->eigen_floor},
                {"seed", wf_seed},
                {"config", cfg}});
    } else if (c_embed->parsed()) {
      const wmtk::CodecKey key = wmtk::load_key(em_key);
      const wmtk::ImageBuffer x = wmtk::load_image(em_in);
      const wmtk::BitMessage m = message_for(key, em_msg);
      wmtk::ImageBuffer w;
      if (key.kind == wmtk::CodecKind::dctdwt) {
        if (em_iterative) throw std::runtime_error("--iterative needs a spreadspectrum key");
        w = wmtk::embed_dctdwt(x, key, m);
      } else if (em_iterative) {
        w = wmtk::embed_ss_iterative(x, key, m, em_lambda, em_steps);
      } else {
        w = wmtk::embed_ss_additive(x, key, m);
      }
      wmtk::save_image(w, em_out);
      emit(json{{"written", em_out},
                {"message", m.to_string()},
                {"psnr", wmtk::psnr(x, w)},
                {"config", cfg}});
    } else if (c_extract->parsed()) {
      const wmtk::CodecKey key = wmtk::load_key(ex_key);
      const wmtk::ImageBuffer x = wmtk::load_image(ex_in);
      json out{{"config", cfg}};
      if (key.kind == wmtk::CodecKind::dctdwt) {
        out["bits"] = wmtk::extract_dctdwt(x, key).to_string();
      } else {
        const auto [soft, bits] = wmtk::extract_ss(x, key);
        out["bits"] = bits.to_string();
        out["soft"] = soft.values;
      }
      emit(out);
    } else if (c_detect->parsed()) {
      const wmtk::CodecKey key = wmtk::load_key(de_key);
      const wmtk::ImageBuffer x = wmtk::load_image(de_in);
      const wmtk::BitMessage m = message_for(key, de_msg);
      const wmtk::BitMessage got = key.kind == wmtk::CodecKind::dctdwt
                                       ? wmtk::extract_dctdwt(x, key)
                                       : wmtk::extract_ss(x, key).second;
      const int tau = wmtk::threshold_for_fpr(key.k, de_fpr, 1);
      const wmtk::DetectionVerdict v = wmtk::detect(m, got, tau);
      emit(json{{"flagged", v.flagged},
                {"score", v.score},
                {"tau", v.threshold},
                {"p_value", v.p_value},
                {"target_fpr", de_fpr},
                {"config", cfg}});
      if (!v.flagged) return 3;
    } else if (c_identify->parsed()) {
      const wmtk::CodecKey key = wmtk::load_key(id_key);
      const wmtk::ImageBuffer x = wmtk::load_image(id_in);
      std::ifstream sf(id_sigs);
      if (!sf) throw std::runtime_error("cannot open " + id_sigs);
      json sig_json = json::parse(sf);
      std::vector<wmtk::BitMessage> sigs;
      for (const auto& s : sig_json) sigs.push_back(wmtk::BitMessage::from_string(s));
      const wmtk::BitMessage got = key.kind == wmtk::CodecKind::dctdwt
                                       ? wmtk::extract_dctdwt(x, key)
                                       : wmtk::extract_ss(x, key).second;
      const int tau =
          wmtk::threshold_for_fpr(key.k, id_fpr, static_cast<int64_t>(sigs.size()));
      const wmtk::IdentificationVerdict v = wmtk::identify(got, sigs, tau);
      json out{{"flagged", v.flagged},
               {"best_score", v.best_score},
               {"tau", v.threshold},
               {"n_signatures", sigs.size()},
               {"config", cfg}};
      if (v.best_index) out["best_index"] = *v.best_index;
      emit(out);
    } else if (c_channel->parsed()) {
      const wmtk::ImageBuffer x = wmtk::load_image(ch_in);
      const wmtk::TransformSpec spec = wmtk::TransformSpec::parse(ch_spec);
      wmtk::save_image(wmtk::apply_transform(x, spec, ch_seed), ch_out);
      emit(json{{"written", ch_out}, {"transform", spec.name()}, {"seed", ch_seed}, {"config", cfg}});
    } else if (c_metric->parsed()) {
      const wmtk::ImageBuffer a = wmtk::load_image(mt_a);
      const wmtk::ImageBuffer b = wmtk::load_image(mt_b);
      double v;
      if (mt_name == "psnr") v = wmtk::psnr(a, b);
      else if (mt_name == "ssim") v = wmtk::ssim(a, b);
      else throw std::runtime_error("unknown metric " + mt_name);
      json out{{"metric", mt_name}, {"config", cfg}};
      if (std::isinf(v)) out["value"] = fmt_double(v);
      else out["value"] = v;
      emit(out);
    } else if (c_bench->parsed()) {
      const wmtk::CodecKey key = wmtk::load_key(br_key);
      const auto corpus = br_corpus.load(wmtk::mix_seed(br_seed, 0xC0));
      std::vector<wmtk::TransformSpec> specs;
      for (const auto& t : br_transforms) specs.push_back(wmtk::TransformSpec::parse(t));
      wmtk::RobustnessConfig rcfg;
      rcfg.n_keys = br_nkeys;
      rcfg.seed = br_seed;
      rcfg.jobs = br_jobs;
      rcfg.iterative = br_iterative;
      rcfg.lambda_i = br_lambda;
      emit_report(robustness_table(key, corpus, specs, rcfg), br_format, br_out, br_csv, cfg);
    } else if (c_bdet->parsed()) {
      const wmtk::CodecKey key = wmtk::load_key(bd_key);
      wmtk::DetectionConfig dcfg;
      dcfg.target_fprs = bd_fprs;
      dcfg.seed = bd_seed;
      dcfg.n_trials = bd_trials;
      dcfg.jobs = bd_jobs;
      std::vector<wmtk::ImageBuffer> corpus;
      if (bd_bsc > 0.0) {
        dcfg.channel = wmtk::ChannelModel::bsc(bd_bsc);
      } else {
        dcfg.channel =
            wmtk::ChannelModel::image_channel(wmtk::TransformSpec::parse(bd_transform));
        corpus = bd_corpus.load(wmtk::mix_seed(bd_seed, 0xD0));
      }
      emit_report(run_detection_experiment(key, corpus, dcfg), bd_format, bd_out, bd_csv, cfg);
    } else if (c_simid->parsed()) {
      wmtk::IdentificationConfig icfg;
      icfg.n_users = si_users;
      icfg.n_decoys = si_decoys;
      icfg.images_per_user = si_per_user;
      icfg.channel = wmtk::ChannelModel::bsc(si_p);
      icfg.target_fpr = si_fpr;
      icfg.k = si_k;
      icfg.seed = si_seed;
      icfg.jobs = si_jobs;
      emit_report(run_identification_experiment(icfg), si_format, si_out, "", cfg);
    } else if (c_collude->parsed()) {
      wmtk::Rng rng(wmtk::mix_seed(co_seed, 0xC011));
      const wmtk::BitMessage ki =
          co_ki.empty() ? wmtk::BitMessage::random(co_k, rng) : wmtk::BitMessage::from_string(co_ki);
      const wmtk::BitMessage kj =
          co_kj.empty() ? wmtk::BitMessage::random(co_k, rng) : wmtk::BitMessage::from_string(co_kj);
      emit_report(run_collusion_experiment(ki, kj, co_p, co_bits, co_seed), co_format, co_out, "",
                  cfg);
    } else if (c_vfpr->parsed()) {
      if (vf_source == "synthetic") {
        emit_report(
            validate_fpr_empirical(vf_k, vf_taus, vf_trials, wmtk::FprSource::synthetic, vf_seed),
            vf_format, vf_out, "", cfg);
      } else if (vf_source == "extractor") {
        if (vf_key.empty()) throw std::runtime_error("extractor mode needs --key");
        const wmtk::CodecKey key = wmtk::load_key(vf_key);
        const auto corpus = vf_corpus.load(wmtk::mix_seed(vf_seed, 0xE0));
        emit_report(validate_fpr_empirical(key.k, vf_taus, vf_trials, wmtk::FprSource::extractor,
                                           vf_seed, &key, &corpus),
                    vf_format, vf_out, "", cfg);
      } else {
        throw std::runtime_error("unknown --source " + vf_source);
      }
    } else if (c_remove->parsed()) {
      const wmtk::CodecKey key = wmtk::load_key(ar_key);
      const wmtk::ImageBuffer x = wmtk::load_image(ar_in);
      const wmtk::BitMessage m = message_for(key, ar_msg);
      const wmtk::AttackResult res = adversarial_remove(x, key, ar_floor, ar_seed);
      wmtk::save_image(res.image, ar_out);
      const wmtk::BitMessage got = wmtk::extract_ss(res.image, key).second;
      emit(json{{"written", ar_out},
                {"moved", res.moved},
                {"psnr_vs_input", wmtk::psnr(x, res.image)},
                {"bit_accuracy_vs_message",
                 static_cast<double>(match_bits(m, got)) / key.k},
                {"seed", ar_seed},
                {"config", cfg}});
    } else if (c_forge->parsed()) {
      const wmtk::CodecKey key = wmtk::load_key(af_key);
      const wmtk::ImageBuffer x = wmtk::load_image(af_in);
      const wmtk::BitMessage victim = message_for(key, af_victim);
      const wmtk::AttackResult res = adversarial_forge(x, key, victim, af_floor);
      wmtk::save_image(res.image, af_out);
      const wmtk::BitMessage got = wmtk::extract_ss(res.image, key).second;
      const int tau = wmtk::threshold_for_fpr(key.k, 1e-6, 1);
      const wmtk::DetectionVerdict v = wmtk::detect(victim, got, tau);
      emit(json{{"written", af_out},
                {"moved", res.moved},
                {"psnr_vs_input", wmtk::psnr(x, res.image)},
                {"flagged", v.flagged},
                {"score", v.score},
                {"tau", tau},
                {"config", cfg}});
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
