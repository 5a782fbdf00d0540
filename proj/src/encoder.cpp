#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "covtweet/encoder.hpp"
#include "covtweet/errors.hpp"
#include "covtweet/metrics.hpp"
#include "covtweet/numopt.hpp"

namespace covtweet::encoder {

namespace {

constexpr double kLnEpsilon = 1e-5;

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                  : std::exp(z) / (1.0 + std::exp(z));
}

double bce_from_logit(double z, double y) {
  const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z))
                                  : std::log1p(std::exp(z));
  return softplus - y * z;
}

}  // namespace

void EncoderConfig::validate() const {
  if (d_model <= 0 || n_heads <= 0 || n_layers <= 0 || d_ffn <= 0) {
    throw NumericError("EncoderConfig: dimensions must be positive");
  }
  if (d_model % n_heads != 0) {
    throw NumericError("EncoderConfig: d_model " + std::to_string(d_model) +
                       " not divisible by n_heads " +
                       std::to_string(n_heads));
  }
  if (vocab_size < 5) {
    throw NumericError("EncoderConfig: vocab_size must cover the specials");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw NumericError("EncoderConfig: dropout must lie in [0, 1)");
  }
  if (max_len != kMaxLen || batch_size != 32 || learning_rate != 2e-5 ||
      adam_epsilon != 1e-8 || epochs != 4) {
    throw NumericError(
        "EncoderConfig: fixed training constants were overridden "
        "(max_len 100, batch 32, lr 2e-5, eps 1e-8, epochs 4)");
  }
}

// ------------------------------------------------------------ parameters --

namespace {

Eigen::Index per_layer_size(const EncoderConfig& c) {
  return 4 * c.d_model * c.d_model + 4 * c.d_model  // attention
         + 2 * c.d_model                            // ln1
         + c.d_model * c.d_ffn + c.d_ffn            // ffn in
         + c.d_ffn * c.d_model + c.d_model          // ffn out
         + 2 * c.d_model;                           // ln2
}

Eigen::Index total_size(const EncoderConfig& c) {
  return c.vocab_size * c.d_model + c.max_len * c.d_model +
         c.n_layers * per_layer_size(c) + c.d_model + 1;
}

void check_params_match(const EncoderParams& params,
                        const EncoderConfig& cfg) {
  if (params.flat.size() != total_size(cfg)) {
    throw NumericError(
        "encoder: parameter vector has " +
        std::to_string(params.flat.size()) + " entries, config expects " +
        std::to_string(total_size(cfg)) +
        " (was vocab_size set on the config?)");
  }
}

}  // namespace

EncoderParams::EncoderParams(const EncoderConfig& cfg)
    : flat(Eigen::VectorXd::Zero(total_size(cfg))), cfg_(cfg) {}

Eigen::Index EncoderParams::layer_offset(int layer) const {
  return cfg_.vocab_size * cfg_.d_model + cfg_.max_len * cfg_.d_model +
         layer * per_layer_size(cfg_);
}

// Offsets inside one layer block, in declaration order.
#define COVTWEET_LAYER_OFFSETS(d, dff)                                      \
  const Eigen::Index o_wq = 0, o_wk = o_wq + (d) * (d),                     \
                     o_wv = o_wk + (d) * (d), o_wo = o_wv + (d) * (d),      \
                     o_bq = o_wo + (d) * (d), o_bk = o_bq + (d),            \
                     o_bv = o_bk + (d), o_bo = o_bv + (d),                  \
                     o_ln1g = o_bo + (d), o_ln1b = o_ln1g + (d),            \
                     o_w1 = o_ln1b + (d), o_b1 = o_w1 + (d) * (dff),        \
                     o_w2 = o_b1 + (dff), o_b2 = o_w2 + (dff) * (d),        \
                     o_ln2g = o_b2 + (d), o_ln2b = o_ln2g + (d)

#define COVTWEET_PARAM_ACCESSORS(NAME, OFFSET, ROWS, COLS)                  \
  EncoderParams::MapM EncoderParams::NAME(int layer) {                      \
    COVTWEET_LAYER_OFFSETS(cfg_.d_model, cfg_.d_ffn);                       \
    return {flat.data() + layer_offset(layer) + (OFFSET), (ROWS), (COLS)};  \
  }                                                                         \
  EncoderParams::CMapM EncoderParams::NAME(int layer) const {               \
    COVTWEET_LAYER_OFFSETS(cfg_.d_model, cfg_.d_ffn);                       \
    return {flat.data() + layer_offset(layer) + (OFFSET), (ROWS), (COLS)};  \
  }

#define COVTWEET_PARAM_VEC_ACCESSORS(NAME, OFFSET, SIZE)                    \
  EncoderParams::MapV EncoderParams::NAME(int layer) {                      \
    COVTWEET_LAYER_OFFSETS(cfg_.d_model, cfg_.d_ffn);                       \
    return {flat.data() + layer_offset(layer) + (OFFSET), (SIZE)};          \
  }                                                                         \
  EncoderParams::CMapV EncoderParams::NAME(int layer) const {               \
    COVTWEET_LAYER_OFFSETS(cfg_.d_model, cfg_.d_ffn);                       \
    return {flat.data() + layer_offset(layer) + (OFFSET), (SIZE)};          \
  }

COVTWEET_PARAM_ACCESSORS(wq, o_wq, cfg_.d_model, cfg_.d_model)
COVTWEET_PARAM_ACCESSORS(wk, o_wk, cfg_.d_model, cfg_.d_model)
COVTWEET_PARAM_ACCESSORS(wv, o_wv, cfg_.d_model, cfg_.d_model)
COVTWEET_PARAM_ACCESSORS(wo, o_wo, cfg_.d_model, cfg_.d_model)
COVTWEET_PARAM_VEC_ACCESSORS(bq, o_bq, cfg_.d_model)
COVTWEET_PARAM_VEC_ACCESSORS(bk, o_bk, cfg_.d_model)
COVTWEET_PARAM_VEC_ACCESSORS(bv, o_bv, cfg_.d_model)
COVTWEET_PARAM_VEC_ACCESSORS(bo, o_bo, cfg_.d_model)
COVTWEET_PARAM_VEC_ACCESSORS(ln1_gain, o_ln1g, cfg_.d_model)
COVTWEET_PARAM_VEC_ACCESSORS(ln1_bias, o_ln1b, cfg_.d_model)
COVTWEET_PARAM_ACCESSORS(ffn_w1, o_w1, cfg_.d_model, cfg_.d_ffn)
COVTWEET_PARAM_VEC_ACCESSORS(ffn_b1, o_b1, cfg_.d_ffn)
COVTWEET_PARAM_ACCESSORS(ffn_w2, o_w2, cfg_.d_ffn, cfg_.d_model)
COVTWEET_PARAM_VEC_ACCESSORS(ffn_b2, o_b2, cfg_.d_model)
COVTWEET_PARAM_VEC_ACCESSORS(ln2_gain, o_ln2g, cfg_.d_model)
COVTWEET_PARAM_VEC_ACCESSORS(ln2_bias, o_ln2b, cfg_.d_model)

#undef COVTWEET_PARAM_ACCESSORS
#undef COVTWEET_PARAM_VEC_ACCESSORS

EncoderParams::MapM EncoderParams::token_embedding() {
  return {flat.data(), cfg_.vocab_size, cfg_.d_model};
}
EncoderParams::CMapM EncoderParams::token_embedding() const {
  return {flat.data(), cfg_.vocab_size, cfg_.d_model};
}
EncoderParams::MapM EncoderParams::pos_embedding() {
  return {flat.data() + cfg_.vocab_size * cfg_.d_model, cfg_.max_len,
          cfg_.d_model};
}
EncoderParams::CMapM EncoderParams::pos_embedding() const {
  return {flat.data() + cfg_.vocab_size * cfg_.d_model, cfg_.max_len,
          cfg_.d_model};
}
EncoderParams::MapV EncoderParams::head_w() {
  return {flat.data() + layer_offset(static_cast<int>(cfg_.n_layers)),
          cfg_.d_model};
}
EncoderParams::CMapV EncoderParams::head_w() const {
  return {flat.data() + layer_offset(static_cast<int>(cfg_.n_layers)),
          cfg_.d_model};
}
double& EncoderParams::head_b() {
  return flat[layer_offset(static_cast<int>(cfg_.n_layers)) + cfg_.d_model];
}
double EncoderParams::head_b() const {
  return flat[layer_offset(static_cast<int>(cfg_.n_layers)) + cfg_.d_model];
}

EncoderParams EncoderParams::random_init(const EncoderConfig& cfg,
                                         std::uint64_t seed) {
  EncoderParams p(cfg);
  auto eng = rng::make_engine(seed, /*stream=*/1);
  const auto glorot = [&eng](MapM m, double fan_in, double fan_out) {
    const double stddev = std::sqrt(2.0 / (fan_in + fan_out));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        m(r, c) = rng::normal(eng, 0.0, stddev);
      }
    }
  };
  const auto d = static_cast<double>(cfg.d_model);
  const auto dff = static_cast<double>(cfg.d_ffn);

  // small-scale embeddings; Glorot projections; identity layer norms;
  // zero biases and a zero head so every initial logit is exactly 0
  auto tok = p.token_embedding();
  auto pos = p.pos_embedding();
  for (Eigen::Index c = 0; c < tok.cols(); ++c) {
    for (Eigen::Index r = 0; r < tok.rows(); ++r) {
      tok(r, c) = rng::normal(eng, 0.0, 0.02);
    }
  }
  for (Eigen::Index c = 0; c < pos.cols(); ++c) {
    for (Eigen::Index r = 0; r < pos.rows(); ++r) {
      pos(r, c) = rng::normal(eng, 0.0, 0.02);
    }
  }
  for (int l = 0; l < cfg.n_layers; ++l) {
    glorot(p.wq(l), d, d);
    glorot(p.wk(l), d, d);
    glorot(p.wv(l), d, d);
    glorot(p.wo(l), d, d);
    glorot(p.ffn_w1(l), d, dff);
    glorot(p.ffn_w2(l), dff, d);
    p.ln1_gain(l).setOnes();
    p.ln2_gain(l).setOnes();
  }
  return p;
}

// ----------------------------------------------------- forward / backward --

namespace {

struct LnTape {
  Eigen::MatrixXd x_hat;     // L x d
  Eigen::VectorXd inv_std;   // L
};

// y = gain .* x_hat + bias, rowwise.
Eigen::MatrixXd layer_norm(const Eigen::MatrixXd& x,
                           Eigen::Map<const Eigen::VectorXd> gain,
                           Eigen::Map<const Eigen::VectorXd> bias,
                           LnTape& tape) {
  const Eigen::Index rows = x.rows();
  const Eigen::Index d = x.cols();
  tape.x_hat.resize(rows, d);
  tape.inv_std.resize(rows);
  Eigen::MatrixXd y(rows, d);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mean = x.row(r).mean();
    const double var = (x.row(r).array() - mean).square().mean();
    const double inv = 1.0 / std::sqrt(var + kLnEpsilon);
    tape.inv_std[r] = inv;
    tape.x_hat.row(r) = (x.row(r).array() - mean) * inv;
    y.row(r) = tape.x_hat.row(r).cwiseProduct(gain.transpose()) +
               bias.transpose();
  }
  return y;
}

// Returns dx; accumulates dgain/dbias.
Eigen::MatrixXd layer_norm_backward(const Eigen::MatrixXd& dy,
                                    const LnTape& tape,
                                    Eigen::Map<const Eigen::VectorXd> gain,
                                    Eigen::Map<Eigen::VectorXd> dgain,
                                    Eigen::Map<Eigen::VectorXd> dbias) {
  const Eigen::Index rows = dy.rows();
  const Eigen::Index d = dy.cols();
  Eigen::MatrixXd dx(rows, d);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::RowVectorXd dxhat =
        dy.row(r).cwiseProduct(gain.transpose());
    const double mean_dxhat = dxhat.mean();
    const double mean_dxhat_xhat =
        dxhat.cwiseProduct(tape.x_hat.row(r)).mean();
    dx.row(r) = tape.inv_std[r] *
                (dxhat.array() - mean_dxhat -
                 tape.x_hat.row(r).array() * mean_dxhat_xhat);
    dgain += dy.row(r).cwiseProduct(tape.x_hat.row(r)).transpose();
    dbias += dy.row(r).transpose();
  }
  return dx;
}

struct LayerTape {
  Eigen::MatrixXd h_in;      // L x d, layer input
  Eigen::MatrixXd q, k, v;   // L x d
  std::vector<Eigen::MatrixXd> attn;  // per head, L x L probabilities
  Eigen::MatrixXd context;   // L x d, concatenated head outputs
  Eigen::MatrixXd attn_out;  // L x d, after wo + bias (pre-dropout)
  Eigen::MatrixXd drop1;     // dropout scaling applied to attn_out
  LnTape ln1;
  Eigen::MatrixXd h_mid;     // L x d, after first layer norm
  Eigen::MatrixXd z1;        // L x dff
  Eigen::MatrixXd a1;        // L x dff
  Eigen::MatrixXd ffn_out;   // L x d (pre-dropout)
  Eigen::MatrixXd drop2;
  LnTape ln2;
  Eigen::MatrixXd h_out;     // L x d
};

struct ExampleTape {
  std::int32_t length = 0;
  std::vector<std::int32_t> ids;  // non-pad prefix
  Eigen::MatrixXd embedded;       // L x d (pre-dropout sum)
  Eigen::MatrixXd drop0;
  Eigen::MatrixXd h0;             // after embedding dropout
  std::vector<LayerTape> layers;
};

// Inverted-dropout scaling matrix: entries are 0 or 1/(1-p).
Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double p,
                             rng::Engine* eng) {
  if (eng == nullptr || p <= 0.0) {
    return Eigen::MatrixXd::Ones(rows, cols);
  }
  const double keep = 1.0 - p;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = rng::uniform01(*eng) < keep ? 1.0 / keep : 0.0;
    }
  }
  return m;
}

double forward_example(const TokenizedInput& input,
                       const EncoderParams& params, const EncoderConfig& cfg,
                       rng::Engine* dropout_rng, ExampleTape* tape,
                       std::vector<std::vector<Eigen::MatrixXd>>* attn_trace) {
  const std::int32_t len = input.length();
  const Eigen::Index d = cfg.d_model;
  const Eigen::Index dh = d / cfg.n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  const auto tok = params.token_embedding();
  const auto pos = params.pos_embedding();

  Eigen::MatrixXd h(len, d);
  std::vector<std::int32_t> ids(static_cast<std::size_t>(len));
  for (std::int32_t i = 0; i < len; ++i) {
    const std::int32_t id = input.ids[static_cast<std::size_t>(i)];
    if (id < 0 || id >= cfg.vocab_size) {
      throw NumericError("encoder_forward: token id " + std::to_string(id) +
                         " outside vocabulary of size " +
                         std::to_string(cfg.vocab_size));
    }
    ids[static_cast<std::size_t>(i)] = id;
    h.row(i) = tok.row(id) + pos.row(i);
  }

  Eigen::MatrixXd drop0 = dropout_mask(len, d, cfg.dropout, dropout_rng);
  if (tape != nullptr) {
    tape->length = len;
    tape->ids = ids;
    tape->embedded = h;
    tape->drop0 = drop0;
    tape->layers.resize(static_cast<std::size_t>(cfg.n_layers));
  }
  h = h.cwiseProduct(drop0);
  if (tape != nullptr) tape->h0 = h;

  if (attn_trace != nullptr) {
    attn_trace->resize(static_cast<std::size_t>(cfg.n_layers));
  }

  for (int l = 0; l < cfg.n_layers; ++l) {
    LayerTape local;
    LayerTape& lt = tape != nullptr
                        ? tape->layers[static_cast<std::size_t>(l)]
                        : local;
    lt.h_in = h;

    lt.q = (h * params.wq(l)).rowwise() + params.bq(l).transpose();
    lt.k = (h * params.wk(l)).rowwise() + params.bk(l).transpose();
    lt.v = (h * params.wv(l)).rowwise() + params.bv(l).transpose();

    lt.context.resize(len, d);
    lt.attn.resize(static_cast<std::size_t>(cfg.n_heads));
    for (int head = 0; head < cfg.n_heads; ++head) {
      const auto qh = lt.q.middleCols(head * dh, dh);
      const auto kh = lt.k.middleCols(head * dh, dh);
      const auto vh = lt.v.middleCols(head * dh, dh);
      Eigen::MatrixXd scores = scale * (qh * kh.transpose());
      // rowwise softmax; every key position here is a real token
      Eigen::MatrixXd& probs = lt.attn[static_cast<std::size_t>(head)];
      probs.resize(len, len);
      for (Eigen::Index r = 0; r < len; ++r) {
        const double hi = scores.row(r).maxCoeff();
        probs.row(r) = (scores.row(r).array() - hi).exp();
        probs.row(r) /= probs.row(r).sum();
      }
      lt.context.middleCols(head * dh, dh) = probs * vh;
      if (attn_trace != nullptr) {
        (*attn_trace)[static_cast<std::size_t>(l)].push_back(probs);
      }
    }

    lt.attn_out =
        (lt.context * params.wo(l)).rowwise() + params.bo(l).transpose();
    lt.drop1 = dropout_mask(len, d, cfg.dropout, dropout_rng);
    const Eigen::MatrixXd sum1 = h + lt.attn_out.cwiseProduct(lt.drop1);
    lt.h_mid = layer_norm(sum1, params.ln1_gain(l), params.ln1_bias(l),
                          lt.ln1);

    lt.z1 = (lt.h_mid * params.ffn_w1(l)).rowwise() +
            params.ffn_b1(l).transpose();
    lt.a1 = lt.z1.cwiseMax(0.0);
    lt.ffn_out =
        (lt.a1 * params.ffn_w2(l)).rowwise() + params.ffn_b2(l).transpose();
    lt.drop2 = dropout_mask(len, d, cfg.dropout, dropout_rng);
    const Eigen::MatrixXd sum2 = lt.h_mid + lt.ffn_out.cwiseProduct(lt.drop2);
    lt.h_out = layer_norm(sum2, params.ln2_gain(l), params.ln2_bias(l),
                          lt.ln2);
    h = lt.h_out;
  }

  return h.row(0).dot(params.head_w()) + params.head_b();
}

void backward_example(const ExampleTape& tape, double dlogit,
                      const EncoderParams& params, const EncoderConfig& cfg,
                      EncoderParams& grad) {
  const Eigen::Index d = cfg.d_model;
  const Eigen::Index dh = d / cfg.n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const std::int32_t len = tape.length;

  const Eigen::MatrixXd& h_final =
      tape.layers[static_cast<std::size_t>(cfg.n_layers - 1)].h_out;
  grad.head_w() += dlogit * h_final.row(0).transpose();
  grad.head_b() += dlogit;

  Eigen::MatrixXd dh_out = Eigen::MatrixXd::Zero(len, d);
  dh_out.row(0) = dlogit * params.head_w().transpose();

  for (int l = static_cast<int>(cfg.n_layers) - 1; l >= 0; --l) {
    const LayerTape& lt = tape.layers[static_cast<std::size_t>(l)];

    // second sublayer: h_out = LN2(h_mid + drop2 .* ffn_out)
    Eigen::MatrixXd dsum2 = layer_norm_backward(
        dh_out, lt.ln2, params.ln2_gain(l), grad.ln2_gain(l),
        grad.ln2_bias(l));
    Eigen::MatrixXd dh_mid = dsum2;
    const Eigen::MatrixXd dffn = dsum2.cwiseProduct(lt.drop2);
    grad.ffn_w2(l) += lt.a1.transpose() * dffn;
    grad.ffn_b2(l) += dffn.colwise().sum().transpose();
    Eigen::MatrixXd da1 = dffn * params.ffn_w2(l).transpose();
    const Eigen::MatrixXd dz1 =
        (lt.z1.array() > 0.0).select(da1, 0.0);
    grad.ffn_w1(l) += lt.h_mid.transpose() * dz1;
    grad.ffn_b1(l) += dz1.colwise().sum().transpose();
    dh_mid += dz1 * params.ffn_w1(l).transpose();

    // first sublayer: h_mid = LN1(h_in + drop1 .* attn_out)
    Eigen::MatrixXd dsum1 = layer_norm_backward(
        dh_mid, lt.ln1, params.ln1_gain(l), grad.ln1_gain(l),
        grad.ln1_bias(l));
    Eigen::MatrixXd dh_in = dsum1;
    const Eigen::MatrixXd dattn_out = dsum1.cwiseProduct(lt.drop1);
    grad.wo(l) += lt.context.transpose() * dattn_out;
    grad.bo(l) += dattn_out.colwise().sum().transpose();
    const Eigen::MatrixXd dcontext = dattn_out * params.wo(l).transpose();

    Eigen::MatrixXd dq(len, d);
    Eigen::MatrixXd dk(len, d);
    Eigen::MatrixXd dv(len, d);
    for (int head = 0; head < cfg.n_heads; ++head) {
      const auto qh = lt.q.middleCols(head * dh, dh);
      const auto kh = lt.k.middleCols(head * dh, dh);
      const auto vh = lt.v.middleCols(head * dh, dh);
      const Eigen::MatrixXd& probs = lt.attn[static_cast<std::size_t>(head)];
      const auto dch = dcontext.middleCols(head * dh, dh);

      const Eigen::MatrixXd dprobs = dch * vh.transpose();
      dv.middleCols(head * dh, dh) = probs.transpose() * dch;
      // softmax backward, rowwise
      Eigen::MatrixXd dscores(len, len);
      for (Eigen::Index r = 0; r < len; ++r) {
        const double dot = dprobs.row(r).dot(probs.row(r));
        dscores.row(r) =
            probs.row(r).array() * (dprobs.row(r).array() - dot);
      }
      dscores *= scale;
      dq.middleCols(head * dh, dh) = dscores * kh;
      dk.middleCols(head * dh, dh) = dscores.transpose() * qh;
    }

    grad.wq(l) += lt.h_in.transpose() * dq;
    grad.bq(l) += dq.colwise().sum().transpose();
    grad.wk(l) += lt.h_in.transpose() * dk;
    grad.bk(l) += dk.colwise().sum().transpose();
    grad.wv(l) += lt.h_in.transpose() * dv;
    grad.bv(l) += dv.colwise().sum().transpose();
    dh_in += dq * params.wq(l).transpose() + dk * params.wk(l).transpose() +
             dv * params.wv(l).transpose();

    dh_out = std::move(dh_in);
  }

  // embeddings: h0 = drop0 .* (token_emb[ids] + pos_emb[0..len))
  const Eigen::MatrixXd dembed = dh_out.cwiseProduct(tape.drop0);
  auto dtok = grad.token_embedding();
  auto dpos = grad.pos_embedding();
  for (std::int32_t i = 0; i < len; ++i) {
    dtok.row(tape.ids[static_cast<std::size_t>(i)]) += dembed.row(i);
    dpos.row(i) += dembed.row(i);
  }
}

}  // namespace

Eigen::VectorXd encoder_forward(const std::vector<TokenizedInput>& batch,
                                const EncoderParams& params,
                                const EncoderConfig& cfg,
                                ForwardTrace* trace) {
  check_params_match(params, cfg);
  Eigen::VectorXd logits(static_cast<Eigen::Index>(batch.size()));
  if (trace != nullptr) {
    trace->lengths.clear();
    trace->attention.clear();
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::vector<std::vector<Eigen::MatrixXd>> attn;
    logits[static_cast<Eigen::Index>(i)] = forward_example(
        batch[i], params, cfg, nullptr, nullptr,
        trace != nullptr ? &attn : nullptr);
    if (trace != nullptr) {
      trace->lengths.push_back(batch[i].length());
      trace->attention.push_back(std::move(attn));
    }
  }
  return logits;
}

double encoder_loss_and_gradient(const std::vector<TokenizedInput>& batch,
                                 const std::vector<double>& targets,
                                 const EncoderParams& params,
                                 const EncoderConfig& cfg,
                                 rng::Engine* dropout_rng,
                                 EncoderParams& grad) {
  check_params_match(params, cfg);
  if (batch.empty() || batch.size() != targets.size()) {
    throw NumericError("encoder_loss_and_gradient: " +
                       std::to_string(batch.size()) + " inputs for " +
                       std::to_string(targets.size()) + " targets");
  }
  grad.flat.setZero();
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  ExampleTape tape;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double logit =
        forward_example(batch[i], params, cfg, dropout_rng, &tape, nullptr);
    loss += bce_from_logit(logit, targets[i]) * inv_n;
    const double dlogit = (sigmoid(logit) - targets[i]) * inv_n;
    backward_example(tape, dlogit, params, cfg, grad);
  }
  return loss;
}

// ----------------------------------------------------------------- train --

namespace {

double mean_loss(const std::vector<TokenizedInput>& inputs,
                 const std::vector<double>& targets,
                 const EncoderParams& params, const EncoderConfig& cfg) {
  double loss = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double logit =
        forward_example(inputs[i], params, cfg, nullptr, nullptr, nullptr);
    loss += bce_from_logit(logit, targets[i]);
  }
  return loss / static_cast<double>(inputs.size());
}

std::vector<corpus::Label> predict_encoded(
    const std::vector<TokenizedInput>& inputs, const EncoderParams& params,
    const EncoderConfig& cfg) {
  check_params_match(params, cfg);
  std::vector<corpus::Label> labels;
  labels.reserve(inputs.size());
  for (const TokenizedInput& input : inputs) {
    const double logit =
        forward_example(input, params, cfg, nullptr, nullptr, nullptr);
    labels.push_back(logit > 0.0 ? corpus::Label::Informative
                                 : corpus::Label::Uninformative);
  }
  return labels;
}

}  // namespace

std::pair<EncoderParams, TrainReport> train_encoder(
    const corpus::Dataset& train, const corpus::Dataset& dev,
    const SubwordVocab& vocab, const EncoderConfig& cfg_in) {
  EncoderConfig cfg = cfg_in;
  cfg.vocab_size = vocab.size();
  cfg.validate();

  const auto encode_all = [&vocab](const corpus::Dataset& d) {
    std::vector<TokenizedInput> inputs;
    inputs.reserve(d.size());
    for (const corpus::Tweet& t : d.tweets) {
      inputs.push_back(encode(t.text, vocab));
    }
    return inputs;
  };
  const auto targets_of = [](const corpus::Dataset& d) {
    std::vector<double> targets;
    targets.reserve(d.size());
    for (const corpus::Tweet& t : d.tweets) {
      if (!t.label) {
        throw DataError("train_encoder: tweet " + t.id + " is unlabeled");
      }
      targets.push_back(*t.label == corpus::Label::Informative ? 1.0 : 0.0);
    }
    return targets;
  };

  const std::vector<TokenizedInput> train_inputs = encode_all(train);
  const std::vector<double> train_targets = targets_of(train);
  const std::vector<TokenizedInput> dev_inputs = encode_all(dev);
  std::vector<corpus::Label> dev_golds;
  dev_golds.reserve(dev.size());
  for (const corpus::Tweet& t : dev.tweets) {
    if (!t.label) {
      throw DataError("train_encoder: dev tweet " + t.id + " is unlabeled");
    }
    dev_golds.push_back(*t.label);
  }

  EncoderParams params = EncoderParams::random_init(cfg, cfg.seed);
  EncoderParams grad(cfg);
  numopt::AdamState adam(params.flat.size());
  const numopt::AdamConfig adam_cfg{cfg.learning_rate, cfg.adam_epsilon, 0.9,
                                    0.999};

  TrainReport report;
  report.initial_loss = mean_loss(train_inputs, train_targets, params, cfg);

  auto order_rng = rng::make_engine(cfg.seed, /*stream=*/2);
  auto dropout_rng = rng::make_engine(cfg.seed, /*stream=*/3);
  std::vector<std::size_t> order(train_inputs.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng::shuffle(order, order_rng);
    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
      const std::size_t end = std::min(
          order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<TokenizedInput> batch;
      std::vector<double> targets;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(train_inputs[order[i]]);
        targets.push_back(train_targets[order[i]]);
      }
      const double loss = encoder_loss_and_gradient(batch, targets, params,
                                                    cfg, &dropout_rng, grad);
      if (!std::isfinite(loss)) {
        throw NumericError("train_encoder: non-finite loss in epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index));
      }
      numopt::adam_step(params.flat, grad.flat, adam, adam_cfg);
      epoch_loss += loss * static_cast<double>(end - start);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(order.size());
    const auto dev_preds = predict_encoded(dev_inputs, params, cfg);
    stats.dev_f1 = metrics::evaluate(dev_preds, dev_golds).f1;
    report.epochs.push_back(stats);
  }
  return {std::move(params), std::move(report)};
}

std::vector<corpus::Label> encoder_predict(const corpus::Dataset& d,
                                           const SubwordVocab& vocab,
                                           const EncoderParams& params,
                                           const EncoderConfig& cfg) {
  std::vector<TokenizedInput> inputs;
  inputs.reserve(d.size());
  for (const corpus::Tweet& t : d.tweets) {
    inputs.push_back(encode(t.text, vocab));
  }
  return predict_encoded(inputs, params, cfg);
}

// ------------------------------------------------------------ checkpoint --

void save_checkpoint(const std::filesystem::path& path,
                     const EncoderParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write checkpoint: " + path.string());
  }
  const EncoderConfig& c = params.config();
  const nlohmann::json header{
      {"d_model", c.d_model},     {"n_heads", c.n_heads},
      {"n_layers", c.n_layers},   {"d_ffn", c.d_ffn},
      {"dropout", c.dropout},     {"max_len", c.max_len},
      {"batch_size", c.batch_size},
      {"learning_rate", c.learning_rate},
      {"adam_epsilon", c.adam_epsilon},
      {"epochs", c.epochs},       {"seed", c.seed},
      {"vocab_size", c.vocab_size},
      {"n_params", params.flat.size()}};
  out << "covtweet-encoder-checkpoint v1\n" << header.dump() << "\n";
  out.write(reinterpret_cast<const char*>(params.flat.data()),
            static_cast<std::streamsize>(params.flat.size() *
                                         sizeof(double)));
}

EncoderParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open checkpoint: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "covtweet-encoder-checkpoint v1") {
    throw DataError(path.string() + ": not an encoder checkpoint");
  }
  if (!std::getline(in, line)) {
    throw DataError(path.string() + ": missing config header");
  }
  const auto header = nlohmann::json::parse(line);
  EncoderConfig cfg;
  cfg.d_model = header.at("d_model").get<Eigen::Index>();
  cfg.n_heads = header.at("n_heads").get<Eigen::Index>();
  cfg.n_layers = header.at("n_layers").get<Eigen::Index>();
  cfg.d_ffn = header.at("d_ffn").get<Eigen::Index>();
  cfg.dropout = header.at("dropout").get<double>();
  cfg.max_len = header.at("max_len").get<Eigen::Index>();
  cfg.batch_size = header.at("batch_size").get<int>();
  cfg.learning_rate = header.at("learning_rate").get<double>();
  cfg.adam_epsilon = header.at("adam_epsilon").get<double>();
  cfg.epochs = header.at("epochs").get<int>();
  cfg.seed = header.at("seed").get<std::uint64_t>();
  cfg.vocab_size = header.at("vocab_size").get<Eigen::Index>();

  EncoderParams params(cfg);
  if (header.at("n_params").get<Eigen::Index>() != params.flat.size()) {
    throw DataError(path.string() + ": parameter count mismatch");
  }
  in.read(reinterpret_cast<char*>(params.flat.data()),
          static_cast<std::streamsize>(params.flat.size() * sizeof(double)));
  if (!in) {
    throw DataError(path.string() + ": truncated parameter payload");
  }
  return params;
}

}  // namespace covtweet::encoder
