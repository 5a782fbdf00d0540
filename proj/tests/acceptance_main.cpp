// Acceptance gate: one pass/fail/skip line per criterion. Criteria pinned
// to the official shared-task files report SKIP when those files are not
// installed under data/official/; everything they exercise still runs
// against the bundled mini corpus as a dry run.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "covtweet/classical.hpp"
#include "covtweet/corpus.hpp"
#include "covtweet/encoder.hpp"
#include "covtweet/features.hpp"
#include "covtweet/harness.hpp"
#include "covtweet/metrics.hpp"
#include "covtweet/preprocess.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace covtweet;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Result {
  Outcome outcome;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const Result& r) {
  const char* tag = r.outcome == Outcome::Pass
                        ? "PASS"
                        : (r.outcome == Outcome::Skip ? "SKIP" : "FAIL");
  if (r.outcome == Outcome::Fail) ++failures;
  std::printf("[%s] %s%s%s\n", tag, name.c_str(),
              r.detail.empty() ? "" : " - ", r.detail.c_str());
  std::fflush(stdout);
}

void run(const std::string& name, const std::function<Result()>& fn) {
  try {
    report(name, fn());
  } catch (const std::exception& e) {
    report(name, {Outcome::Fail, std::string("exception: ") + e.what()});
  }
}

double seconds_since(
    const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct DataPaths {
  fs::path train;
  fs::path valid;
  bool official = false;
};

DataPaths locate_data() {
  DataPaths p;
  const fs::path official_train = testutil::data_dir() / "official" /
                                  "train.tsv";
  const fs::path official_valid = testutil::data_dir() / "official" /
                                  "valid.tsv";
  if (fs::exists(official_train) && fs::exists(official_valid)) {
    p.train = official_train;
    p.valid = official_valid;
    p.official = true;
  } else {
    p.train = testutil::mini_train_tsv();
    p.valid = testutil::mini_valid_tsv();
  }
  return p;
}

harness::ExperimentConfig base_config(const DataPaths& data) {
  harness::ExperimentConfig cfg;
  cfg.train_tsv = data.train;
  cfg.valid_tsv = data.valid;
  cfg.emoji_tsv = testutil::emoji_tsv();
  cfg.contractions_tsv = testutil::contractions_tsv();
  return cfg;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// ------------------------------------------------------- criterion bodies --

// Table 1: exact class counts, word stats within +-1 (max/min) and +-0.5
// (avg), under 10 s.
Result dataset_statistics(const DataPaths& data) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = harness::cmd_stats(base_config(data));
  const double secs = seconds_since(t0);

  if (!data.official) {
    return {Outcome::Skip,
            fmt("official data absent; mini dry run: counts %lld/%lld and "
                "%lld/%lld, train avg %.3f -> %.3f, %.1fs",
                static_cast<long long>(report.train.informative),
                static_cast<long long>(report.train.uninformative),
                static_cast<long long>(report.validation.informative),
                static_cast<long long>(report.validation.uninformative),
                report.train.before.wc_avg, report.train.after.wc_avg,
                secs)};
  }

  bool ok = report.train.informative == 3303 &&
            report.train.uninformative == 3697 &&
            report.validation.informative == 472 &&
            report.validation.uninformative == 528;
  const auto near = [](std::int64_t got, std::int64_t want) {
    return std::llabs(got - want) <= 1;
  };
  ok = ok && near(report.train.before.wc_max, 76) &&
       near(report.train.before.wc_min, 8) &&
       std::abs(report.train.before.wc_avg - 35.87) <= 0.5 &&
       near(report.train.after.wc_max, 217) &&
       near(report.train.after.wc_min, 7) &&
       std::abs(report.train.after.wc_avg - 36.301) <= 0.5 &&
       near(report.validation.before.wc_max, 62) &&
       near(report.validation.before.wc_min, 11) &&
       std::abs(report.validation.before.wc_avg - 37.052) <= 0.5 &&
       near(report.validation.after.wc_max, 69) &&
       near(report.validation.after.wc_min, 10) &&
       std::abs(report.validation.after.wc_avg - 37.215) <= 0.5;
  ok = ok && secs < 10.0;
  return {ok ? Outcome::Pass : Outcome::Fail,
          fmt("counts %lld/%lld %lld/%lld, %.1fs",
              static_cast<long long>(report.train.informative),
              static_cast<long long>(report.train.uninformative),
              static_cast<long long>(report.validation.informative),
              static_cast<long long>(report.validation.uninformative),
              secs)};
}

// Table 2: ten classical cells within tolerance plus the two qualitative
// orderings, under 15 minutes. The reproduce command enforces exactly this
// and returns kExitTolerance on a miss.
Result table2_reproduction(const DataPaths& data, const fs::path& out_dir,
                           int exit_code, double secs) {
  const auto table = nlohmann::json::parse(slurp(out_dir / "table.json"));
  std::string cells;
  for (const auto& cell : table.at("cells")) {
    if (cell.contains("f1")) {
      cells += fmt("%s+%s %.5f ", cell.at("model").get<std::string>().c_str(),
                   cell.at("features").get<std::string>().c_str(),
                   cell.at("f1").get<double>());
    }
  }
  if (!data.official) {
    return {Outcome::Skip,
            fmt("official data absent; mini dry run (no tolerances): %s%.0fs",
                cells.c_str(), secs)};
  }
  const bool ok = exit_code == harness::kExitOk && secs < 900.0;
  return {ok ? Outcome::Pass : Outcome::Fail,
          fmt("exit %d, %s%.0fs", exit_code, cells.c_str(), secs)};
}

// Toy-encoder substitute for Table 3: F1 >= 0.65 on the official validation
// set with the fixed hyperparameters, under 20 minutes.
Result encoder_f1_target(const DataPaths& data, double f1, double secs) {
  if (!data.official) {
    return {Outcome::Skip,
            fmt("official data absent; mini dry run: validation f1 %.5f, "
                "%.0fs",
                f1, secs)};
  }
  const bool ok = f1 >= 0.65 && secs < 1200.0;
  return {ok ? Outcome::Pass : Outcome::Fail,
          fmt("validation f1 %.5f, %.0fs", f1, secs)};
}

}  // namespace

int main() {
  const DataPaths data = locate_data();
  std::printf("data: %s (%s)\n", data.train.parent_path().c_str(),
              data.official ? "official" : "bundled mini corpus");

  // ---- criterion 1: dataset statistics
  run("dataset-statistics", [&] { return dataset_statistics(data); });

  // ---- criteria 2 and 7 share two full reproduce runs
  const fs::path repro_a = fs::temp_directory_path() / "covtweet_repro_a";
  const fs::path repro_b = fs::temp_directory_path() / "covtweet_repro_b";
  int exit_a = -1;
  double repro_secs = 0.0;
  run("table2-reproduction", [&]() -> Result {
    fs::remove_all(repro_a);
    auto cfg = base_config(data);
    cfg.seed = 0;
    cfg.out_dir = repro_a;
    const auto t0 = std::chrono::steady_clock::now();
    exit_a = harness::cmd_reproduce(cfg);
    repro_secs = seconds_since(t0);
    return table2_reproduction(data, repro_a, exit_a, repro_secs);
  });

  // ---- criterion 3: toy encoder against the Table 3 substitute
  const auto lex = preprocess::Lexicons::load(testutil::emoji_tsv(),
                                              testutil::contractions_tsv());
  const auto clean_dataset = [&lex](const corpus::Dataset& d) {
    corpus::Dataset out;
    out.name = d.name;
    for (const auto& t : d.tweets) {
      auto c = t;
      c.text = preprocess::clean(t.text, lex).cleaned;
      if (c.text.empty()) c.text = " ";
      out.tweets.push_back(std::move(c));
    }
    return out;
  };
  struct EncoderRun {
    double valid_f1 = -1.0;
    encoder::TrainReport report;
  };
  const auto train_encoder_seeded = [&](std::uint64_t seed, double* secs) {
    const auto train_raw = corpus::load_tsv(data.train);
    const auto valid_raw = corpus::load_tsv(data.valid);
    const auto train = clean_dataset(train_raw);
    const auto valid = clean_dataset(valid_raw);
    const auto [fit_part, dev_part] = corpus::split_train_dev(train, seed);
    std::vector<std::string> texts;
    for (const auto& t : fit_part.tweets) texts.push_back(t.text);
    const auto t0 = std::chrono::steady_clock::now();
    const auto vocab = encoder::bpe_train(texts, 8000);
    encoder::EncoderConfig cfg;
    cfg.seed = seed;
    cfg.vocab_size = vocab.size();
    auto [params, report] =
        encoder::train_encoder(fit_part, dev_part, vocab, cfg);
    if (secs != nullptr) *secs = seconds_since(t0);
    const auto preds = encoder::encoder_predict(valid, vocab, params, cfg);
    std::vector<corpus::Label> golds;
    for (const auto& t : valid.tweets) golds.push_back(*t.label);
    return EncoderRun{metrics::evaluate(preds, golds).f1,
                      std::move(report)};
  };

  double encoder_secs = 0.0;
  EncoderRun run0;
  run("encoder-f1-target", [&]() -> Result {
    run0 = train_encoder_seeded(0, &encoder_secs);
    return encoder_f1_target(data, run0.valid_f1, encoder_secs);
  });

  run("encoder-beats-empty-baseline", [&]() -> Result {
    // all-UNINFORMATIVE predictions score F1 = 0; every seeded run must
    // land strictly above, and epoch 1 must already descend from ln 2
    std::string detail;
    bool ok = true;
    for (const std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
      const EncoderRun r = seed == 0 && run0.valid_f1 >= 0.0
                               ? run0
                               : train_encoder_seeded(seed, nullptr);
      ok = ok && r.valid_f1 > 0.0 && !r.report.epochs.empty() &&
           r.report.epochs.front().train_loss < r.report.initial_loss;
      detail += fmt("seed %llu f1 %.5f epoch1 %.6f<%.6f; ",
                    static_cast<unsigned long long>(seed), r.valid_f1,
                    r.report.epochs.empty()
                        ? 0.0
                        : r.report.epochs.front().train_loss,
                    r.report.initial_loss);
    }
    return {ok ? Outcome::Pass : Outcome::Fail, detail};
  });

  // ---- criterion 4: oracle equivalence suites
  run("tfidf-oracle-equivalence", [&]() -> Result {
    auto eng = rng::make_engine(1001);
    int checked = 0;
    double worst = 0.0;
    while (checked < 100) {
      const auto corpus = oracles::random_micro_corpus(eng);
      bool all_empty = true;
      for (const auto& dterms : corpus.doc_terms) {
        all_empty = all_empty && dterms.empty();
      }
      if (all_empty) continue;
      ++checked;
      const auto model = features::tfidf_fit(corpus.docs);
      for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
        const auto got = features::tfidf_transform(corpus.docs[d], model);
        const auto expected = oracles::tfidf_oracle_weights(corpus, d);
        if (got.nnz() != expected.size()) {
          return {Outcome::Fail, "support mismatch"};
        }
        for (const auto& [term, weight] : expected) {
          const auto idx = model.vocab.term_to_index.at(term);
          worst = std::max(worst, std::abs(got.at(idx) - weight));
        }
      }
    }
    return {worst < 1e-12 ? Outcome::Pass : Outcome::Fail,
            fmt("100 corpora, worst |delta| %.2e", worst)};
  });

  run("nb-oracle-equivalence", [&]() -> Result {
    auto eng = rng::make_engine(1003);
    double worst = 0.0;
    for (int round = 0; round < 100; ++round) {
      const auto set = oracles::random_nb_toy_set(eng);
      std::vector<features::SparseVector> x;
      for (const auto& row : set.counts) {
        x.push_back(oracles::dense_to_sparse(row));
      }
      const auto params = classical::nb_fit(x, set.labels, set.alpha);
      for (std::size_t d = 0; d < x.size(); ++d) {
        const auto post = classical::nb_log_posterior(x[d], params);
        const double expected = oracles::nb_oracle_posterior(set, d);
        worst = std::max(worst, std::abs(std::exp(post[0]) - expected));
      }
    }
    return {worst < 1e-12 ? Outcome::Pass : Outcome::Fail,
            fmt("100 toy sets, worst |delta| %.2e", worst)};
  });

  // ---- criterion 5: gradient suites
  run("mlp-gradient-check", [&]() -> Result {
    auto eng = rng::make_engine(1005);
    std::vector<features::SparseVector> x;
    std::vector<corpus::Label> y;
    for (int i = 0; i < 10; ++i) {
      std::vector<double> row(4, 0.0);
      for (auto& v : row) {
        if (rng::below(eng, 2) == 0) {
          v = static_cast<double>(1 + rng::below(eng, 3));
        }
      }
      x.push_back(oracles::dense_to_sparse(row));
      y.push_back(i % 2 == 0 ? corpus::Label::Informative
                             : corpus::Label::Uninformative);
    }
    const auto obj = classical::mlp_objective(x, y, 1e-3, 4);
    double worst = 0.0;
    for (int point = 0; point < 10; ++point) {
      Eigen::VectorXd flat(obj.dim);
      for (Eigen::Index i = 0; i < obj.dim; ++i) {
        flat[i] = rng::normal(eng, 0.0, 0.5);
      }
      worst = std::max(worst, testutil::gradient_check(obj, flat));
    }
    return {worst < 1e-4 ? Outcome::Pass : Outcome::Fail,
            fmt("10 points, worst relative error %.2e", worst)};
  });

  run("encoder-gradient-check", [&]() -> Result {
    encoder::EncoderConfig cfg;
    cfg.d_model = 8;
    cfg.n_heads = 1;
    cfg.n_layers = 1;
    cfg.d_ffn = 12;
    cfg.dropout = 0.0;
    cfg.vocab_size = 9;
    const auto manual = [](std::vector<std::int32_t> real_ids) {
      encoder::TokenizedInput input;
      input.ids.assign(100, 0);
      input.mask.assign(100, 0);
      for (std::size_t i = 0; i < real_ids.size(); ++i) {
        input.ids[i] = real_ids[i];
        input.mask[i] = 1;
      }
      return input;
    };
    const std::vector<encoder::TokenizedInput> batch = {
        manual({1, 4, 6, 7, 2}), manual({1, 5, 2})};
    const std::vector<double> targets = {1.0, 0.0};

    encoder::EncoderParams probe(cfg);
    numopt::Objective obj;
    obj.dim = probe.flat.size();
    obj.eval = [&batch, &targets, cfg](const Eigen::VectorXd& flat,
                                       Eigen::VectorXd& grad) {
      encoder::EncoderParams p(cfg);
      p.flat = flat;
      encoder::EncoderParams g(cfg);
      const double loss = encoder::encoder_loss_and_gradient(
          batch, targets, p, cfg, nullptr, g);
      grad = g.flat;
      return loss;
    };
    auto eng = rng::make_engine(1007);
    double worst = 0.0;
    for (int point = 0; point < 10; ++point) {
      auto params = encoder::EncoderParams::random_init(cfg, eng());
      Eigen::VectorXd flat = params.flat;
      for (Eigen::Index i = 0; i < flat.size(); ++i) {
        flat[i] += rng::normal(eng, 0.0, 0.05);
      }
      worst = std::max(worst, testutil::gradient_check(obj, flat, 1e-5));
    }
    return {worst < 1e-3 ? Outcome::Pass : Outcome::Fail,
            fmt("10 points, worst relative error %.2e", worst)};
  });

  // ---- criterion 6: mask/encoding suite
  run("mask-encoding-suite", [&]() -> Result {
    const auto train = clean_dataset(corpus::load_tsv(data.train));
    std::vector<std::string> texts;
    for (const auto& t : train.tweets) texts.push_back(t.text);
    const auto vocab = encoder::bpe_train(texts, 8000);

    encoder::EncoderConfig cfg;
    cfg.vocab_size = vocab.size();
    const auto params = encoder::EncoderParams::random_init(cfg, 0);

    auto eng = rng::make_engine(1009);
    std::vector<std::string> words;
    for (const auto& text : texts) {
      std::istringstream in(text);
      std::string w;
      while (in >> w) words.push_back(w);
    }

    double worst_pad_delta = 0.0;
    for (int round = 0; round < 1000; ++round) {
      std::string text;
      const auto n = rng::below(eng, 180);
      for (std::uint64_t i = 0; i < n; ++i) {
        text += words[rng::below(eng, words.size())];
        text += ' ';
      }
      const auto input = encoder::encode(text, vocab);
      if (input.ids.size() != 100 || input.mask.size() != 100 ||
          input.ids[0] != encoder::SubwordVocab::kCls) {
        return {Outcome::Fail, "layout violation"};
      }
      int seps = 0;
      for (int i = 0; i < 100; ++i) {
        if ((input.mask[i] == 1) != (input.ids[i] != 0)) {
          return {Outcome::Fail, "mask bijection violation"};
        }
        if (input.ids[i] == encoder::SubwordVocab::kSep) ++seps;
      }
      if (seps != 1) return {Outcome::Fail, "SEP count violation"};

      const auto before = encoder::encoder_forward({input}, params, cfg);
      auto mutated = input;
      bool any_pad = false;
      for (int i = 0; i < 100; ++i) {
        if (mutated.mask[i] == 0) {
          any_pad = true;
          mutated.ids[i] = static_cast<std::int32_t>(
              rng::below(eng, static_cast<std::uint64_t>(cfg.vocab_size)));
        }
      }
      if (any_pad) {
        const auto after = encoder::encoder_forward({mutated}, params, cfg);
        worst_pad_delta =
            std::max(worst_pad_delta, std::abs(after[0] - before[0]));
      }
    }
    return {worst_pad_delta < 1e-6 ? Outcome::Pass : Outcome::Fail,
            fmt("1000 texts, worst pad-mutation |delta| %.2e",
                worst_pad_delta)};
  });

  // ---- criterion 7: reproduce determinism
  run("reproduce-determinism", [&]() -> Result {
    fs::remove_all(repro_b);
    auto cfg = base_config(data);
    cfg.seed = 0;
    cfg.out_dir = repro_b;
    const int exit_b = harness::cmd_reproduce(cfg);
    const bool same_json =
        slurp(repro_a / "table.json") == slurp(repro_b / "table.json");
    const bool same_txt =
        slurp(repro_a / "table.txt") == slurp(repro_b / "table.txt");
    const bool ok = same_json && same_txt && exit_b == exit_a;
    return {ok ? Outcome::Pass : Outcome::Fail,
            fmt("json identical: %s, table identical: %s",
                same_json ? "yes" : "no", same_txt ? "yes" : "no")};
  });

  std::printf("%s\n", failures == 0 ? "acceptance: all runnable criteria"
                                      " passed"
                                    : "acceptance: FAILURES present");
  return failures == 0 ? 0 : 1;
}
