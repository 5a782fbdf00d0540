#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "covtweet/errors.hpp"
#include "covtweet/harness.hpp"

namespace {

using covtweet::harness::ExperimentConfig;

// Bad command-line input (as opposed to bad data files).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string timestamp_dir() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", std::localtime(&t));
  return std::string("runs/") + buf;
}

struct CommonFlags {
  std::string config_path;
  std::string train_tsv, valid_tsv, emoji_tsv, contractions_tsv;
  std::string out_dir;
  std::string model = "logreg";
  std::string features = "bow";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool model_set = false;
  bool features_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_model) {
  cmd->add_option("--config", flags.config_path,
                  "JSON config file; flags override its fields");
  cmd->add_option("--train", flags.train_tsv, "training TSV");
  cmd->add_option("--valid", flags.valid_tsv, "validation TSV");
  cmd->add_option("--emoji-lexicon", flags.emoji_tsv, "emoji TSV");
  cmd->add_option("--contraction-lexicon", flags.contractions_tsv,
                  "contractions TSV");
  cmd->add_option("--out", flags.out_dir,
                  "artifact directory (default runs/<timestamp>)");
  cmd->add_option("--seed", flags.seed, "master random seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  if (with_model) {
    cmd->add_option("--model", flags.model,
                    "logreg|svm|nb|forest|mlp|encoder")
        ->each([&flags](const std::string&) { flags.model_set = true; });
    cmd->add_option("--features", flags.features, "bow|tfidf|subword")
        ->each([&flags](const std::string&) { flags.features_set = true; });
  }
}

ExperimentConfig build_config(const CommonFlags& flags) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) {
      throw UsageError("cannot open config file: " + flags.config_path);
    }
    cfg = ExperimentConfig::from_json(nlohmann::json::parse(in));
  }
  if (!flags.train_tsv.empty()) cfg.train_tsv = flags.train_tsv;
  if (!flags.valid_tsv.empty()) cfg.valid_tsv = flags.valid_tsv;
  if (!flags.emoji_tsv.empty()) cfg.emoji_tsv = flags.emoji_tsv;
  if (!flags.contractions_tsv.empty()) {
    cfg.contractions_tsv = flags.contractions_tsv;
  }
  if (flags.seed_set) cfg.seed = flags.seed;
  if (flags.model_set || flags.config_path.empty()) {
    cfg.model = covtweet::harness::parse_model(flags.model);
  }
  if (flags.features_set || flags.config_path.empty()) {
    cfg.features = covtweet::harness::parse_features(flags.features);
  }
  cfg.out_dir = flags.out_dir.empty() ? timestamp_dir() : flags.out_dir;
  covtweet::harness::resolve_default_paths(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covtweet: informative COVID-19 tweet classification"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string pre_input, pre_output;
  std::string eval_model_dir, eval_data;

  auto* stats = app.add_subcommand(
      "stats", "dataset statistics before/after preprocessing");
  add_common(stats, flags, /*with_model=*/false);

  auto* prep = app.add_subcommand("preprocess", "write a cleaned TSV copy");
  add_common(prep, flags, /*with_model=*/false);
  prep->add_option("input", pre_input, "input TSV")->required();
  prep->add_option("output", pre_output, "output TSV")->required();

  auto* train = app.add_subcommand(
      "train", "fit a model, evaluate on the validation file");
  add_common(train, flags, /*with_model=*/true);

  auto* eval = app.add_subcommand("eval",
                                  "score a saved model on a dataset");
  add_common(eval, flags, /*with_model=*/false);
  eval->add_option("model_dir", eval_model_dir, "artifact directory")
      ->required();
  eval->add_option("data", eval_data, "TSV to score")->required();

  auto* repro = app.add_subcommand(
      "reproduce", "run every classical cell plus the toy encoder");
  add_common(repro, flags, /*with_model=*/true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : covtweet::harness::kExitUsage;
  }

  try {
    if (stats->parsed()) {
      const auto cfg = build_config(flags);
      const auto report = covtweet::harness::cmd_stats(cfg);
      std::cout << report.format_table();
      std::cout << report.to_json().dump(2) << "\n";
      return covtweet::harness::kExitOk;
    }
    if (prep->parsed()) {
      const auto cfg = build_config(flags);
      covtweet::harness::cmd_preprocess(cfg, pre_input, pre_output);
      return covtweet::harness::kExitOk;
    }
    if (train->parsed()) {
      const auto cfg = build_config(flags);
      const auto t0 = std::chrono::steady_clock::now();
      const auto report = covtweet::harness::cmd_train_eval(cfg);
      const auto secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
      std::cout << covtweet::metrics::format_table(report);
      std::cerr << "artifacts: " << cfg.out_dir.string() << " ("
                << std::fixed << secs << "s)\n";
      return covtweet::harness::kExitOk;
    }
    if (eval->parsed()) {
      const auto report = covtweet::harness::cmd_eval(
          eval_model_dir, eval_data,
          flags.out_dir.empty() ? timestamp_dir() : flags.out_dir);
      std::cout << covtweet::metrics::format_table(report);
      return covtweet::harness::kExitOk;
    }
    if (repro->parsed()) {
      const auto cfg = build_config(flags);
      return covtweet::harness::cmd_reproduce(cfg);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return covtweet::harness::kExitUsage;
  } catch (const covtweet::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return covtweet::harness::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return covtweet::harness::kExitData;
  }
  return covtweet::harness::kExitUsage;
}
