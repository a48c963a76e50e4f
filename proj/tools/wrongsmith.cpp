// wrongsmith: train corruption models, generate synthetic learner errors,
// build labelled data, train and evaluate error detectors, and run the
// Turing-style annotation server.

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "wrongsmith/corpus.hpp"
#include "wrongsmith/dataset.hpp"
#include "wrongsmith/decode.hpp"
#include "wrongsmith/detector.hpp"
#include "wrongsmith/error.hpp"
#include "wrongsmith/eval.hpp"
#include "wrongsmith/seq2seq.hpp"
#include "wrongsmith/turing.hpp"
#include "wrongsmith/turing_http.hpp"

namespace fs = std::filesystem;
using namespace wrongsmith;

namespace {

constexpr int kExitError = 2;
constexpr int kExitInternal = 3;

std::uint64_t default_seed() {
  const char* env = std::getenv("WRONGSMITH_SEED");
  if (env == nullptr || *env == '\0') return 1;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used, 10);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("WRONGSMITH_SEED is not an unsigned integer: ") + env);
  }
}

std::vector<Sentence> sentences_of(const std::vector<ParallelPair>& pairs, bool targets) {
  std::vector<Sentence> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(targets ? p.target : p.source);
  return out;
}

struct CorruptorTrainArgs {
  fs::path parallel, dev, out;
  TrainConfig cfg;
  std::size_t min_count = 1;
};

void corruptor_train(const CorruptorTrainArgs& a) {
  a.cfg.validate();
  const auto train_pairs = read_parallel_tsv(a.parallel);
  const auto dev_pairs = read_parallel_tsv(a.dev);
  if (train_pairs.empty()) throw EmptyInput("no pairs in " + a.parallel.string());

  std::vector<Sentence> corpus = sentences_of(train_pairs, false);
  for (auto& s : sentences_of(train_pairs, true)) corpus.push_back(std::move(s));

  Corruptor model;
  model.vocab = Vocabulary::build(corpus, a.min_count);
  const auto enc_train = model.encode_pairs(train_pairs);
  const auto enc_dev = model.encode_pairs(dev_pairs);
  const Seq2SeqParams init = init_seq2seq(a.cfg.seed, {model.vocab.size(), a.cfg.emb_size, a.cfg.cell_size});
  const TrainResult result = train(init, enc_train, enc_dev, a.cfg, [](const EpochRecord& r) {
    std::cout << "epoch " << r.epoch << " train_loss " << r.train_loss << " dev_loss " << r.dev_loss
              << (r.improved ? " *" : "") << '\n'
              << std::flush;
  });
  model.params = result.best;
  save_corruptor(model, a.out);
  std::cout << "best epoch " << result.best_epoch << " saved to " << a.out.string() << '\n';
}

struct GenerateArgs {
  fs::path model, input, out;
  std::optional<fs::path> scores;
  std::string strategy = "am";
  double tau = 0.05;
  std::size_t beam = 11;
  std::size_t samples = 10;
  std::uint64_t seed = 1;
  bool tau_given = false;
};

void corruptor_generate(const GenerateArgs& a) {
  BuildConfig cfg;
  cfg.decode.strategy = parse_strategy(a.strategy);
  cfg.decode.tau = a.tau;
  cfg.decode.beam_width = a.beam;
  cfg.decode.seed = a.seed;
  cfg.samples_per_source = a.samples;
  cfg.validate();
  if (cfg.decode.strategy == Strategy::kArgmax && a.tau_given) {
    std::cerr << "warning: --tau has no effect with --strategy am\n";
  }
  const Corruptor model = load_corruptor(a.model);
  const auto clean = read_sentences(a.input);
  const auto pairs = corrupt_corpus(model, clean, cfg);
  write_parallel_tsv(pairs, a.out);
  write_scores_tsv(pairs, a.scores.value_or(fs::path(a.out.string() + ".scores.tsv")));
  std::cerr << pairs.size() << " corruptions of " << clean.size() << " sentences\n";
}

struct BuildArgs {
  fs::path pairs, out;
  std::size_t max_errors = 5;
  bool no_dedup = false;
};

void dataset_build(const BuildArgs& a) {
  BuildConfig cfg;
  cfg.max_errors = a.max_errors;
  cfg.dedup = !a.no_dedup;
  const auto pairs = read_parallel_tsv(a.pairs);
  const auto labeled = build_labeled(pairs, cfg);
  write_labeled(labeled, a.out);
  std::cerr << labeled.size() << " of " << pairs.size() << " instances kept\n";
}

struct DetectorTrainArgs {
  fs::path real, dev, out;
  std::optional<fs::path> synthetic, history;
  bool alternate = false;
  bool end_on_synthetic = false;
  DetectorTrainConfig cfg;
};

void detector_train(DetectorTrainArgs a) {
  a.cfg.alternation = a.alternate ? Alternation::kEpoch : Alternation::kNone;
  a.cfg.end_on_real = !a.end_on_synthetic;
  a.cfg.validate();
  if (a.alternate && !a.synthetic) throw ConfigError("--alternate needs --synthetic");
  const auto real = read_labeled(a.real);
  const auto dev = read_labeled(a.dev);
  const auto synthetic = a.synthetic ? read_labeled(*a.synthetic) : std::vector<LabeledSentence>{};

  std::string history;
  const auto result = train_detector(real, synthetic, dev, a.cfg, [&](const DetectorEpochRecord& r) {
    const std::string line = history_json_line(r);
    history += line + '\n';
    std::cout << line << '\n' << std::flush;
  });
  save_detector(result.best, a.out);
  if (a.history) write_text_file(*a.history, history);
  std::cout << "best epoch " << result.best_epoch << " saved to " << a.out.string() << '\n';
}

struct EvalArgs {
  fs::path model, test;
  double beta = 0.5;
  double threshold = 0.5;
  bool json = false;
};

void detector_eval(const EvalArgs& a) {
  const Detector detector = load_detector(a.model);
  const auto gold = read_labeled(a.test);
  const auto metrics = prf(predict_all(detector, gold, a.threshold), gold, a.beta);
  std::cout << (a.json ? metrics_json(metrics) : metrics_human(metrics)) << '\n';
}

struct ServeArgs {
  fs::path real, synthetic, results = "turing_results.json";
  std::optional<fs::path> ui_dir;
  std::size_t n = 50;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::uint64_t seed = 1;
};

void turing_serve(const ServeArgs& a) {
  TuringSession session(read_sentences(a.real), read_sentences(a.synthetic), a.n, a.seed);
  httplib::Server server;
  TuringRoutesOptions options;
  options.ui_dir = a.ui_dir;
  const fs::path results = a.results;
  options.on_close = [results](const DetectionMetrics& m) {
    write_text_file(results, metrics_json(m) + '\n');
    std::cerr << "session closed: " << metrics_human(m) << "; written to " << results.string() << '\n';
  };
  register_turing_routes(server, session, std::move(options));
  std::cerr << "serving " << session.size() << " items on http://" << a.host << ':' << a.port << "/\n";
  if (!server.listen(a.host, a.port)) throw IoError("cannot listen on " + a.host + ":" + std::to_string(a.port));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic learner-error generation and error detection"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  try {
    seed = default_seed();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }

  auto* corruptor = app.add_subcommand("corruptor", "Corruption model (seq2seq)");
  corruptor->require_subcommand(1);

  CorruptorTrainArgs ct;
  ct.cfg.seed = seed;
  auto* ct_cmd = corruptor->add_subcommand("train", "Train on clean<TAB>erroneous pairs");
  ct_cmd->add_option("--parallel", ct.parallel, "Training pairs (TSV)")->required();
  ct_cmd->add_option("--dev", ct.dev, "Development pairs (TSV)")->required();
  ct_cmd->add_option("--out", ct.out, "Model file")->required();
  ct_cmd->add_option("--cell-size", ct.cfg.cell_size)->capture_default_str();
  ct_cmd->add_option("--emb-size", ct.cfg.emb_size)->capture_default_str();
  ct_cmd->add_option("--patience", ct.cfg.patience)->capture_default_str();
  ct_cmd->add_option("--max-epochs", ct.cfg.max_epochs)->capture_default_str();
  ct_cmd->add_option("--lr", ct.cfg.learning_rate)->capture_default_str();
  ct_cmd->add_option("--batch-size", ct.cfg.batch_size)->capture_default_str();
  ct_cmd->add_option("--clip", ct.cfg.clip_norm)->capture_default_str();
  ct_cmd->add_option("--min-count", ct.min_count)->capture_default_str();
  ct_cmd->add_option("--seed", ct.cfg.seed, "Default: $WRONGSMITH_SEED or 1");

  GenerateArgs gen;
  gen.seed = seed;
  auto* gen_cmd = corruptor->add_subcommand("generate", "Corrupt clean sentences");
  gen_cmd->add_option("--model", gen.model)->required();
  gen_cmd->add_option("--input", gen.input, "Clean sentences, one per line")->required();
  gen_cmd->add_option("--out", gen.out, "Output pairs (TSV)")->required();
  gen_cmd->add_option("--scores", gen.scores, "Scores sidecar (default <out>.scores.tsv)");
  gen_cmd->add_option("--strategy", gen.strategy)->check(CLI::IsMember({"am", "ts", "bs"}))->capture_default_str();
  auto* tau_opt = gen_cmd->add_option("--tau", gen.tau)->capture_default_str();
  gen_cmd->add_option("--beam", gen.beam)->capture_default_str();
  gen_cmd->add_option("--samples", gen.samples, "Corruptions per sentence (ts, bs)")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Default: $WRONGSMITH_SEED or 1");

  auto* dataset = app.add_subcommand("dataset", "Labelled data sets");
  dataset->require_subcommand(1);
  BuildArgs build;
  auto* build_cmd = dataset->add_subcommand("build", "Label, deduplicate and filter corrupted pairs");
  build_cmd->add_option("--pairs", build.pairs)->required();
  build_cmd->add_option("--out", build.out)->required();
  build_cmd->add_option("--max-errors", build.max_errors)->capture_default_str();
  build_cmd->add_flag("--no-dedup", build.no_dedup);

  auto* detector = app.add_subcommand("detector", "Token-level error detector");
  detector->require_subcommand(1);
  DetectorTrainArgs dt;
  dt.cfg.seed = seed;
  auto* dt_cmd = detector->add_subcommand("train", "Train a BiLSTM detector");
  dt_cmd->add_option("--real", dt.real)->required();
  dt_cmd->add_option("--dev", dt.dev)->required();
  dt_cmd->add_option("--out", dt.out)->required();
  dt_cmd->add_option("--synthetic", dt.synthetic);
  dt_cmd->add_flag("--alternate", dt.alternate, "Alternate real and synthetic epochs");
  dt_cmd->add_flag("--end-on-synthetic", dt.end_on_synthetic, "With --alternate, open on real instead");
  dt_cmd->add_option("--history", dt.history, "Per-epoch JSON lines");
  dt_cmd->add_option("--cell-size", dt.cfg.cell_size)->capture_default_str();
  dt_cmd->add_option("--emb-size", dt.cfg.emb_size)->capture_default_str();
  dt_cmd->add_option("--patience", dt.cfg.patience)->capture_default_str();
  dt_cmd->add_option("--max-epochs", dt.cfg.max_epochs)->capture_default_str();
  dt_cmd->add_option("--lr", dt.cfg.learning_rate)->capture_default_str();
  dt_cmd->add_option("--batch-size", dt.cfg.batch_size)->capture_default_str();
  dt_cmd->add_option("--min-count", dt.cfg.min_count)->capture_default_str();
  dt_cmd->add_option("--threshold", dt.cfg.threshold)->capture_default_str();
  dt_cmd->add_option("--beta", dt.cfg.beta, "F-beta used for model selection")->capture_default_str();
  dt_cmd->add_option("--seed", dt.cfg.seed, "Default: $WRONGSMITH_SEED or 1");

  EvalArgs ev;
  auto* ev_cmd = detector->add_subcommand("eval", "Token-level P/R/F on a labelled test set");
  ev_cmd->add_option("--model", ev.model)->required();
  ev_cmd->add_option("--test", ev.test)->required();
  ev_cmd->add_option("--beta", ev.beta)->capture_default_str();
  ev_cmd->add_option("--threshold", ev.threshold)->capture_default_str();
  ev_cmd->add_flag("--json", ev.json);

  auto* turing = app.add_subcommand("turing", "Turing-style human evaluation");
  turing->require_subcommand(1);
  ServeArgs sv;
  sv.seed = seed;
  auto* sv_cmd = turing->add_subcommand("serve", "Serve the annotation session");
  sv_cmd->add_option("--real", sv.real)->required();
  sv_cmd->add_option("--synthetic", sv.synthetic)->required();
  sv_cmd->add_option("--n", sv.n, "Items drawn from each file")->capture_default_str();
  sv_cmd->add_option("--port", sv.port)->capture_default_str();
  sv_cmd->add_option("--host", sv.host)->capture_default_str();
  sv_cmd->add_option("--results", sv.results, "Metrics JSON written on close")->capture_default_str();
  sv_cmd->add_option("--ui-dir", sv.ui_dir, "Built annotation UI assets");
  sv_cmd->add_option("--seed", sv.seed, "Default: $WRONGSMITH_SEED or 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*ct_cmd) corruptor_train(ct);
    else if (*gen_cmd) {
      gen.tau_given = tau_opt->count() > 0;
      corruptor_generate(gen);
    } else if (*build_cmd) dataset_build(build);
    else if (*dt_cmd) detector_train(dt);
    else if (*ev_cmd) detector_eval(ev);
    else if (*sv_cmd) turing_serve(sv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
