#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "covtweet/corpus.hpp"
#include "covtweet/encoder.hpp"
#include "covtweet/metrics.hpp"

namespace covtweet::harness {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTolerance = 3;

enum class ModelKind { Logreg, Svm, NaiveBayes, Forest, Mlp, Encoder };
enum class FeatureKind { Bow, Tfidf, Subword };

ModelKind parse_model(std::string_view name);
FeatureKind parse_features(std::string_view name);
std::string_view model_name(ModelKind m);
std::string_view feature_name(FeatureKind f);

struct ExperimentConfig {
  std::filesystem::path train_tsv;
  std::filesystem::path valid_tsv;
  std::filesystem::path emoji_tsv;
  std::filesystem::path contractions_tsv;
  std::filesystem::path out_dir;
  ModelKind model = ModelKind::Logreg;
  FeatureKind features = FeatureKind::Bow;
  std::uint64_t seed = 0;

  // hyperparameters; defaults follow the reference toolkit conventions
  double linear_c = 1.0;
  double nb_alpha = 1.0;
  int n_trees = 100;
  int max_depth = 8;
  double mlp_alpha = 1e-5;
  std::int32_t bpe_vocab_size = 8000;
  encoder::EncoderConfig enc;

  // encoder requires subword features; classical models bow/tfidf
  void validate() const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

// Fills empty paths from COVTWEET_DATA_DIR (default "data"): official
// files when present, the bundled mini corpus otherwise.
void resolve_default_paths(ExperimentConfig& cfg);

struct SplitStats {
  std::int64_t n = 0;
  std::int64_t informative = 0;
  std::int64_t uninformative = 0;
  corpus::CorpusStats before;
  corpus::CorpusStats after;
};

struct StatsReport {
  SplitStats train;
  SplitStats validation;

  nlohmann::json to_json() const;
  std::string format_table() const;
};

// Class counts plus word-count stats before/after cleaning for both files.
StatsReport cmd_stats(const ExperimentConfig& cfg);

// Cleaned copy of a TSV, same three columns.
void cmd_preprocess(const ExperimentConfig& cfg,
                    const std::filesystem::path& input_tsv,
                    const std::filesystem::path& output_tsv);

// Fits the configured model on the training file, evaluates on the
// validation file, writes model + report artifacts under cfg.out_dir.
metrics::EvalReport cmd_train_eval(const ExperimentConfig& cfg);

// Evaluates a saved model directory against a TSV; writes predictions and,
// when the data is labeled, an evaluation report.
metrics::EvalReport cmd_eval(const std::filesystem::path& model_dir,
                             const std::filesystem::path& data_tsv,
                             const std::filesystem::path& out_dir);

// All ten classical cells plus the from-scratch encoder row; writes
// table.json and table.txt under cfg.out_dir. Returns kExitOk, or
// kExitTolerance when official data is detected and a cell misses its
// tolerance or a required ordering fails.
int cmd_reproduce(const ExperimentConfig& cfg);

// Table 1 detection: exact official sizes and class counts.
bool looks_like_official(const corpus::Dataset& train,
                         const corpus::Dataset& valid);

}  // namespace covtweet::harness
