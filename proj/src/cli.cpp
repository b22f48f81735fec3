#include "dyadic/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "dyadic/checkpoint.hpp"
#include "dyadic/corpus_io.hpp"
#include "dyadic/disentangle.hpp"
#include "dyadic/eval.hpp"
#include "dyadic/log_ingest.hpp"
#include "dyadic/models.hpp"
#include "dyadic/synthetic.hpp"
#include "dyadic/triples.hpp"

namespace dyadic {

namespace {

struct ExtractArgs {
  std::string logs, out, wordlist;
  DisentangleConfig cfg;
  ParseOptions parse;
};

struct StatsArgs {
  std::string corpus, histogram, report;
};

struct TriplesArgs {
  std::string corpus, train_out, test_out, valid_out;
  double test_fraction = 0.02;
  double valid_fraction = 0.05;
  std::size_t negatives = 1;
  int max_context = 20;
  std::uint64_t seed = 1;
  bool preprocess = false;
};

struct NetArgs {
  std::size_t hidden = 0;  // 0: 50 for rnn, 200 for lstm
  TrainConfig cfg;
  std::string embeddings;
};

struct TrainArgs {
  std::string model = "lstm";
  std::string train, out, valid, log;
  NetArgs net;
};

struct ModelSource {
  std::string model_file;
  std::string model = "tfidf";
  std::string train;
};

struct EvaluateArgs {
  ModelSource source;
  std::string test, report;
  std::size_t negatives = 0;  // 0: all in file
  std::uint64_t seed = 0;
};

struct RankArgs {
  ModelSource source;
  std::string context, candidates;
};

struct CurveArgs {
  std::string model = "lstm";
  std::string train, test, out;
  std::vector<double> fractions{0.25, 0.5, 1.0};
  std::size_t negatives = 0;
  NetArgs net;
};

struct SynthArgs {
  std::string train_out, test_out;
  KeywordTaskConfig cfg;
};

void add_net_options(CLI::App* cmd, NetArgs& a) {
  cmd->add_option("--hidden", a.hidden, "Hidden units (0 = 50 for rnn, 200 for lstm)");
  cmd->add_option("--embed-dim", a.cfg.embed_dim, "Word embedding dimension");
  cmd->add_option("--lr", a.cfg.lr, "Adam learning rate");
  cmd->add_option("--batch", a.cfg.batch_size, "Mini-batch size");
  cmd->add_option("--epochs", a.cfg.epochs, "Training epochs");
  cmd->add_option("--clip", a.cfg.clip, "Global gradient-norm clip threshold");
  cmd->add_option("--lambda", a.cfg.lambda, "L2 weight on M and b");
  cmd->add_option("--seed", a.cfg.seed, "Random seed");
  cmd->add_option("--max-context-tokens", a.cfg.max_context_tokens,
                  "Context truncation (keeps the last tokens)");
  cmd->add_option("--max-response-tokens", a.cfg.max_response_tokens,
                  "Response truncation (keeps the first tokens)");
  cmd->add_option("--min-count", a.cfg.min_count, "Minimum token frequency for the vocabulary");
  cmd->add_option("--embeddings", a.embeddings, "Pretrained word vectors (token v1 ... vd)");
}

TrainConfig net_config(const NetArgs& a, ModelKind kind) {
  TrainConfig cfg = a.cfg;
  cfg.cell = kind == ModelKind::rnn ? CellType::rnn : CellType::lstm;
  cfg.hidden = a.hidden ? a.hidden : TrainConfig::defaults_for(cfg.cell).hidden;
  cfg.validate();
  return cfg;
}

void add_model_source(CLI::App* cmd, ModelSource& s) {
  cmd->add_option("--model-file", s.model_file, "Model written by `train`");
  cmd->add_option("--model", s.model, "Fit a tfidf model on the fly (with --train)")
      ->check(CLI::IsMember({"tfidf", "rnn", "lstm"}));
  cmd->add_option("--train", s.train, "Training triples for an on-the-fly tfidf model");
}

Model resolve_model(const ModelSource& s) {
  if (!s.model_file.empty()) return load_model(s.model_file);
  if (parse_model_kind(s.model) != ModelKind::tfidf)
    throw ValidationError("--model " + s.model + " needs --model-file (run `train` first)");
  if (s.train.empty()) throw ValidationError("--model tfidf without --model-file needs --train");
  return train_tfidf(read_train_csv(s.train));
}

void check_parent_writable(const std::string& path) {
  if (path.empty()) return;
  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent))
    throw IoError("output directory does not exist: " + parent.string());
}

int run_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
  if (a.cfg.window_mins < 0 || a.cfg.prev_days < 0)
    throw ValidationError("window and prev-days must be >= 0");
  if (!(a.cfg.filter.dominance_frac > 0.0 && a.cfg.filter.dominance_frac <= 1.0))
    throw ValidationError("dominance fraction must lie in (0, 1]");
  check_parent_writable(a.out);
  const WordSet common = a.wordlist.empty() ? WordSet::default_common_words()
                                            : WordSet::load(a.wordlist);
  std::vector<std::string> warnings;
  const auto entries = scan_log_tree(a.logs, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";

  DisentangleResult all;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    std::vector<ChannelDay> days;
    while (j < entries.size() && entries[j].channel == entries[i].channel) {
      days.push_back(read_channel_day(entries[j], a.parse));
      skipped += days.back().skipped;
      ++j;
    }
    DisentangleResult r = disentangle_channel(days, common, a.cfg);
    all.tally += r.tally;
    for (auto& d : r.dialogues) all.dialogues.push_back(std::move(d));
    i = j;
  }
  write_corpus(a.out, all.dialogues);

  std::size_t turns = 0;
  for (const auto& d : all.dialogues) turns += d.turns.size();
  const auto& t = all.tally;
  out << "day files           " << t.days << "\n"
      << "messages            " << t.messages << "\n"
      << "skipped lines       " << skipped << "\n"
      << "candidates          " << t.candidates << "\n"
      << "dialogues           " << all.dialogues.size() << "\n"
      << "turns               " << turns << "\n"
      << "rejected min_turns  " << t.rejected_min_turns << "\n"
      << "rejected dominance  " << t.rejected_dominance << "\n";
  return 0;
}

int run_stats(const StatsArgs& a, std::ostream& out) {
  const auto stats = corpus_stats(read_corpus(a.corpus));
  const std::string text = format_stats_text(stats);
  out << text;
  if (!a.histogram.empty()) write_file_atomic(a.histogram, format_histogram_csv(stats));
  if (!a.report.empty()) write_file_atomic(a.report, text);
  return 0;
}

int run_triples(const TriplesArgs& a, std::ostream& out) {
  SplitConfig cfg{a.test_fraction, a.seed, a.negatives, a.max_context};
  cfg.validate();
  if (!a.valid_out.empty() && !(a.valid_fraction > 0.0 && a.valid_fraction < 1.0))
    throw ValidationError("validation fraction must lie strictly between 0 and 1");
  check_parent_writable(a.train_out);
  check_parent_writable(a.test_out);
  check_parent_writable(a.valid_out);

  std::vector<Dialogue> dialogues = read_corpus(a.corpus);
  if (a.preprocess) {
    UsernameRoster roster;
    for (const auto& d : dialogues)
      for (const auto& t : d.turns) roster.add(t.sender);
    for (auto& d : dialogues)
      for (auto& t : d.turns) t.text = join_tokens(preprocess(t.text, roster));
  }

  CorpusSplit split = split_corpus(dialogues, cfg.test_fraction, cfg.seed);
  std::vector<Dialogue> valid;
  if (!a.valid_out.empty()) {
    CorpusSplit inner = split_corpus(split.train, a.valid_fraction, derive_seed(cfg.seed, 3));
    split.train = std::move(inner.train);
    valid = std::move(inner.test);
  }

  Rng test_rng(derive_seed(cfg.seed, 10));
  const auto test = make_test_records(split.test, cfg, test_rng);
  Rng train_rng(derive_seed(cfg.seed, 11));
  const auto train = make_training_triples(split.train, train_rng);
  write_train_csv(a.train_out, train);
  write_test_csv(a.test_out, test);
  out << "train dialogues  " << split.train.size() << "  triples " << train.size() << "\n"
      << "test dialogues   " << split.test.size() << "  records " << test.size() << "\n";
  if (!a.valid_out.empty()) {
    Rng valid_rng(derive_seed(cfg.seed, 12));
    const auto val = make_test_records(valid, cfg, valid_rng);
    write_test_csv(a.valid_out, val);
    out << "valid dialogues  " << valid.size() << "  records " << val.size() << "\n";
  }
  return 0;
}

int run_train(const TrainArgs& a, std::ostream& out) {
  const ModelKind kind = parse_model_kind(a.model);
  check_parent_writable(a.out);
  const auto triples = read_train_csv(a.train);
  if (kind == ModelKind::tfidf) {
    TfidfRanker model = train_tfidf(triples);
    save_model(a.out, model);
    out << "tfidf: " << model.idf().size() << " tokens over " << model.idf().documents()
        << " contexts\n";
    return 0;
  }
  const TrainConfig cfg = net_config(a.net, kind);
  std::vector<TestRecord> valid;
  if (!a.valid.empty()) valid = read_test_csv(a.valid);
  DualEncoderOptions opts;
  if (!a.net.embeddings.empty()) opts.embeddings = a.net.embeddings;
  opts.validation = valid;
  opts.validation_seed = cfg.seed;
  DualEncoderTraining trained = train_dual_encoder(triples, cfg, opts);
  save_model(a.out, trained.model);
  const std::string log = format_training_log(trained.history);
  if (!a.log.empty()) write_file_atomic(a.log, log);
  out << log;
  return 0;
}

int run_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const Model model = resolve_model(a.source);
  const auto records = read_test_csv(a.test);
  EvalOptions opts;
  if (a.negatives) opts.negatives = a.negatives;
  opts.seed = a.seed;
  Ranker ranker = [&](std::string_view c, std::span<const std::string> cands) {
    return rank_with(model, c, cands);
  };
  const RecallReport report = evaluate_ranker(ranker, records, opts);
  out << format_report_text(report);
  if (!a.report.empty()) write_file_atomic(a.report, format_report_csv(report));
  return 0;
}

int run_rank(const RankArgs& a, std::ostream& out) {
  const Model model = resolve_model(a.source);
  std::vector<std::string> candidates;
  std::istringstream in(read_file(a.candidates));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) candidates.push_back(line);
  }
  if (candidates.empty()) throw ValidationError("candidate file is empty");
  const auto ranking = rank_with(model, a.context, candidates);
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    char score[32];
    std::snprintf(score, sizeof(score), "%.6f", ranking[i].score);
    out << (i + 1) << '\t' << score << '\t' << candidates[ranking[i].index] << '\n';
  }
  return 0;
}

int run_curve(const CurveArgs& a, std::ostream& out) {
  const ModelKind kind = parse_model_kind(a.model);
  check_parent_writable(a.out);
  const auto train = read_train_csv(a.train);
  const auto test = read_test_csv(a.test);
  std::optional<TrainConfig> cfg;
  if (kind != ModelKind::tfidf) cfg = net_config(a.net, kind);
  EvalOptions eo;
  eo.ks = {1};
  if (a.negatives) eo.negatives = a.negatives;
  eo.seed = a.net.cfg.seed;

  CurveTrainer trainer = [&](std::span<const Triple> subset, std::span<const TestRecord> recs) {
    Model model = cfg ? Model(train_dual_encoder(subset, *cfg).model) : Model(train_tfidf(subset));
    Ranker ranker = [&](std::string_view c, std::span<const std::string> cands) {
      return rank_with(model, c, cands);
    };
    return evaluate_ranker(ranker, recs, eo).at(1);
  };
  const auto points = learning_curve(train, test, a.fractions, trainer, a.net.cfg.seed);
  const std::string csv = format_curve_csv(points);
  if (!a.out.empty()) write_file_atomic(a.out, csv);
  out << csv;
  return 0;
}

int run_synth(const SynthArgs& a, std::ostream& out) {
  check_parent_writable(a.train_out);
  check_parent_writable(a.test_out);
  const KeywordTask task = make_keyword_task(a.cfg);
  write_train_csv(a.train_out, task.train);
  write_test_csv(a.test_out, task.test);
  out << "train triples " << task.train.size() << "\ntest records  " << task.test.size() << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dyadic dialogue corpus toolkit: extraction, triples, rankers, Recall@k", "dyadic"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", "dyadic 1.0");

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Disentangle chat logs into a dyadic corpus TSV");
  extract->add_option("--logs", ex.logs, "Log root (YYYY/MM/DD/#channel.txt)")->required();
  extract->add_option("--out", ex.out, "Corpus TSV to write")->required();
  extract->add_option("--wordlist", ex.wordlist, "Common-word list (default: built-in)");
  extract->add_option("--window-mins", ex.cfg.window_mins,
                      "Max minutes between initial question and first response");
  extract->add_option("--min-turns", ex.cfg.filter.min_turns, "Minimum turns per dialogue");
  extract->add_option("--dominance-len", ex.cfg.filter.dominance_len,
                      "Dominance rule applies above this many utterances");
  extract->add_option("--dominance-frac", ex.cfg.filter.dominance_frac,
                      "Reject when one speaker exceeds this share of utterances");
  extract->add_option("--prev-days", ex.cfg.prev_days, "Previous days included in the roster");
  extract->add_flag("--include-actions", ex.parse.include_actions, "Treat `* nick ...` lines as messages");
  extract->add_flag("--strict", ex.parse.strict, "Abort on malformed timestamps");
  extract->add_flag("--match-last-token", ex.cfg.recipient.match_last_token,
                    "Also detect name mentions at the end of a message");

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "Corpus statistics and turn histogram");
  stats->add_option("--corpus", st.corpus, "Corpus TSV")->required();
  stats->add_option("--histogram", st.histogram, "Write turns,count CSV");
  stats->add_option("--report", st.report, "Write the text report to a file");

  TriplesArgs tr;
  auto* triples = app.add_subcommand("triples", "Split the corpus and write train/test CSVs");
  triples->add_option("--corpus", tr.corpus, "Corpus TSV")->required();
  triples->add_option("--train-out", tr.train_out, "Train CSV (context,response,flag)")->required();
  triples->add_option("--test-out", tr.test_out, "Test CSV (context,true_response,distractor_*)")
      ->required();
  triples->add_option("--valid-out", tr.valid_out, "Optional validation CSV (test format)");
  triples->add_option("--test-fraction", tr.test_fraction, "Share of dialogues held out for test");
  triples->add_option("--valid-fraction", tr.valid_fraction,
                      "Share of training dialogues held out for validation");
  triples->add_option("--negatives", tr.negatives, "Distractors per test record (1 or 9)");
  triples->add_option("--max-context", tr.max_context, "Maximum desired context size C");
  triples->add_option("--seed", tr.seed, "Random seed");
  triples->add_flag("--preprocess", tr.preprocess, "Write tokenized, entity-tagged text");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a ranker and write its model file");
  train->add_option("--model", ta.model, "tfidf, rnn or lstm")
      ->check(CLI::IsMember({"tfidf", "rnn", "lstm"}));
  train->add_option("--train", ta.train, "Train CSV")->required();
  train->add_option("--out", ta.out, "Model file to write")->required();
  train->add_option("--valid", ta.valid, "Validation CSV (test format) for per-epoch R@1");
  train->add_option("--log", ta.log, "Write epoch,loss[,val_recall_at_1] CSV");
  add_net_options(train, ta.net);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Recall@k of a ranker on a test CSV");
  add_model_source(evaluate, ev.source);
  evaluate->add_option("--test", ev.test, "Test CSV")->required();
  evaluate->add_option("--negatives", ev.negatives,
                       "Use only the first n distractors (0 = all in file)");
  evaluate->add_option("--seed", ev.seed, "Seed for per-record candidate shuffling");
  evaluate->add_option("--report", ev.report, "Write setting,k,recall,n_records CSV");

  RankArgs ra;
  auto* rank = app.add_subcommand("rank", "Rank candidate responses for one context");
  add_model_source(rank, ra.source);
  rank->add_option("--context", ra.context, "Context text (utterances joined by ' __EOS__ ')")
      ->required();
  rank->add_option("--candidates", ra.candidates, "File with one candidate per line")->required();

  CurveArgs cu;
  auto* curve = app.add_subcommand("curve", "R@1 against training-set size");
  curve->add_option("--model", cu.model, "tfidf, rnn or lstm")
      ->check(CLI::IsMember({"tfidf", "rnn", "lstm"}));
  curve->add_option("--train", cu.train, "Train CSV")->required();
  curve->add_option("--test", cu.test, "Test CSV")->required();
  curve->add_option("--out", cu.out, "Write fraction,train_size,recall_at_1 CSV");
  curve->add_option("--fractions", cu.fractions, "Training-set fractions")->delimiter(',');
  curve->add_option("--negatives", cu.negatives, "Use only the first n distractors (0 = all)");
  add_net_options(curve, cu.net);

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Generate the synthetic keyword-copy task");
  synth->add_option("--train-out", sy.train_out, "Train CSV")->required();
  synth->add_option("--test-out", sy.test_out, "Test CSV")->required();
  synth->add_option("--negatives", sy.cfg.negatives, "Distractors per test record");
  synth->add_option("--train-positives", sy.cfg.train_positives, "Positive training triples");
  synth->add_option("--test-records", sy.cfg.test_records, "Test records");
  synth->add_option("--keywords", sy.cfg.keywords, "Keyword inventory size");
  synth->add_option("--context-fillers", sy.cfg.context_fillers, "Context filler inventory size");
  synth->add_option("--response-fillers", sy.cfg.response_fillers,
                    "Response filler inventory size");
  synth->add_option("--seed", sy.cfg.seed, "Random seed");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*extract) return run_extract(ex, out, err);
    if (*stats) return run_stats(st, out);
    if (*triples) return run_triples(tr, out);
    if (*train) return run_train(ta, out);
    if (*evaluate) return run_evaluate(ev, out);
    if (*rank) return run_rank(ra, out);
    if (*curve) return run_curve(cu, out);
    if (*synth) return run_synth(sy, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace dyadic
