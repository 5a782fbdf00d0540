#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "covtweet/corpus.hpp"
#include "covtweet/rng.hpp"

namespace covtweet::encoder {

// §-fixed sequence length: every encoded input is exactly this long.
constexpr std::int32_t kMaxLen = 100;

// ------------------------------------------------------------- tokenizer --

// Byte-pair vocabulary. PAD must stay id 0: the attention-mask rule keys on
// token id 0. Special names contain uppercase letters, which cleaned text
// never does, so merges cannot collide with them.
struct SubwordVocab {
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kCls = 1;
  static constexpr std::int32_t kSep = 2;
  static constexpr std::int32_t kUnk = 3;

  std::vector<std::pair<std::string, std::string>> merges;
  std::vector<std::string> id_to_token;
  std::unordered_map<std::string, std::int32_t> token_to_id;
  // (left_id << 32 | right_id) -> merge rank; merged token id = rank offset
  std::unordered_map<std::uint64_t, std::int32_t> pair_rank;
  std::int32_t first_merge_id = 0;

  std::int32_t size() const {
    return static_cast<std::int32_t>(id_to_token.size());
  }

  // Subword ids of one whitespace-free word, appended to out.
  void append_word_ids(std::string_view word,
                       std::vector<std::int32_t>& out) const;
};

// Learns merges over the whitespace words of a cleaned corpus until the
// vocabulary (specials + characters + merges) reaches vocab_size or no
// adjacent pair is left. Ties on pair count break lexicographically.
SubwordVocab bpe_train(const std::vector<std::string>& corpus,
                       std::int32_t vocab_size);

void save_vocab(const std::filesystem::path& path, const SubwordVocab& v);
SubwordVocab load_vocab(const std::filesystem::path& path);

// [CLS] + subwords + [SEP], subwords truncated from the right so the total
// never exceeds kMaxLen, padded with 0. mask[i] = 1 iff ids[i] != 0.
struct TokenizedInput {
  std::vector<std::int32_t> ids;   // length exactly kMaxLen
  std::vector<std::int8_t> mask;   // parallel

  // Number of real positions per the mask; the encoder consults the mask,
  // never the padded ids themselves.
  std::int32_t length() const;
};

TokenizedInput encode(std::string_view text, const SubwordVocab& vocab);

// --------------------------------------------------------------- encoder --

struct EncoderConfig {
  Eigen::Index d_model = 128;
  Eigen::Index n_heads = 4;
  Eigen::Index n_layers = 2;
  Eigen::Index d_ffn = 256;
  double dropout = 0.1;
  Eigen::Index max_len = kMaxLen;  // §5.2
  int batch_size = 32;             // §5.2
  double learning_rate = 2e-5;     // §5.2
  double adam_epsilon = 1e-8;      // §5.2
  int epochs = 4;                  // §5.2
  std::uint64_t seed = 0;
  Eigen::Index vocab_size = 0;  // set from the trained SubwordVocab

  // Enforces divisibility and the fixed training constants above.
  void validate() const;
};

// All parameters in one flat vector with named matrix/vector views; the
// flat form feeds the optimizer, checkpoints and finite-difference checks.
class EncoderParams {
 public:
  using MapM = Eigen::Map<Eigen::MatrixXd>;
  using CMapM = Eigen::Map<const Eigen::MatrixXd>;
  using MapV = Eigen::Map<Eigen::VectorXd>;
  using CMapV = Eigen::Map<const Eigen::VectorXd>;

  explicit EncoderParams(const EncoderConfig& cfg);  // zero-filled
  static EncoderParams random_init(const EncoderConfig& cfg,
                                   std::uint64_t seed);

  const EncoderConfig& config() const { return cfg_; }

  MapM token_embedding();          // V x d
  CMapM token_embedding() const;
  MapM pos_embedding();            // max_len x d
  CMapM pos_embedding() const;

  MapM wq(int layer);  CMapM wq(int layer) const;   // d x d
  MapM wk(int layer);  CMapM wk(int layer) const;
  MapM wv(int layer);  CMapM wv(int layer) const;
  MapM wo(int layer);  CMapM wo(int layer) const;
  MapV bq(int layer);  CMapV bq(int layer) const;
  MapV bk(int layer);  CMapV bk(int layer) const;
  MapV bv(int layer);  CMapV bv(int layer) const;
  MapV bo(int layer);  CMapV bo(int layer) const;
  MapV ln1_gain(int layer);  CMapV ln1_gain(int layer) const;
  MapV ln1_bias(int layer);  CMapV ln1_bias(int layer) const;
  MapM ffn_w1(int layer);    CMapM ffn_w1(int layer) const;  // d x dff
  MapV ffn_b1(int layer);    CMapV ffn_b1(int layer) const;
  MapM ffn_w2(int layer);    CMapM ffn_w2(int layer) const;  // dff x d
  MapV ffn_b2(int layer);    CMapV ffn_b2(int layer) const;
  MapV ln2_gain(int layer);  CMapV ln2_gain(int layer) const;
  MapV ln2_bias(int layer);  CMapV ln2_bias(int layer) const;
  MapV head_w();             CMapV head_w() const;  // d
  double& head_b();
  double head_b() const;

  Eigen::VectorXd flat;

 private:
  Eigen::Index layer_offset(int layer) const;
  EncoderConfig cfg_;
};

// Per-head attention probability rows for inspection in tests.
struct ForwardTrace {
  std::vector<std::int32_t> lengths;
  // [example][layer][head], each length x length
  std::vector<std::vector<std::vector<Eigen::MatrixXd>>> attention;
};

// Logits, one per input; evaluation mode (no dropout). Only the non-pad
// prefix of each input enters the computation, so logits cannot depend on
// padded ids. Throws NumericError for ids outside the embedding table.
Eigen::VectorXd encoder_forward(const std::vector<TokenizedInput>& batch,
                                const EncoderParams& params,
                                const EncoderConfig& cfg,
                                ForwardTrace* trace = nullptr);

// Mean binary cross-entropy over the batch; fills grad (same layout).
// dropout_rng == nullptr disables dropout.
double encoder_loss_and_gradient(const std::vector<TokenizedInput>& batch,
                                 const std::vector<double>& targets,
                                 const EncoderParams& params,
                                 const EncoderConfig& cfg,
                                 rng::Engine* dropout_rng,
                                 EncoderParams& grad);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_f1 = 0.0;
};

struct TrainReport {
  double initial_loss = 0.0;
  std::vector<EpochStats> epochs;
};

// Adam training with the §5.2 constants; batch order, init and dropout all
// derive from cfg.seed. Dataset texts must already be cleaned and labeled.
std::pair<EncoderParams, TrainReport> train_encoder(
    const corpus::Dataset& train, const corpus::Dataset& dev,
    const SubwordVocab& vocab, const EncoderConfig& cfg);

// logit > 0 -> INFORMATIVE; an exact 0 falls to UNINFORMATIVE.
std::vector<corpus::Label> encoder_predict(const corpus::Dataset& d,
                                           const SubwordVocab& vocab,
                                           const EncoderParams& params,
                                           const EncoderConfig& cfg);

// Binary checkpoint: magic line, JSON config header, raw doubles.
void save_checkpoint(const std::filesystem::path& path,
                     const EncoderParams& params);
EncoderParams load_checkpoint(const std::filesystem::path& path);

}  // namespace covtweet::encoder
