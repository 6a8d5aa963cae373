#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "edmol/encoding.hpp"
#include "edmol/rng.hpp"

namespace edmol {

struct ModelConfig {
  int n_layer = 2;
  int n_head = 4;
  int n_embd = 64;
  int n_ctx = 256;
  int token_vocab = 300;
  int coord_vocab = 300;
  int l_vocab = 200;
  int theta_vocab = 200;
  int phi_vocab = 200;
  int point_classes = 4;
  double dropout = 0.0;
  double init_range = 0.02;

  static ModelConfig toy();
  static ModelConfig full();
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

enum Head { kTokenHead, kXHead, kYHead, kZHead, kLHead, kThetaHead, kPhiHead };
inline constexpr int kNumHeads = 7;
inline constexpr std::array<const char*, kNumHeads> kHeadNames{"token", "x", "y", "z", "l", "theta", "phi"};

int head_size(const ModelConfig& config, int head);

using HeadTargets = std::array<int, kNumHeads>;  // kAbsent = masked

// One concatenated sequence: point cloud first, then molecule tokens.
struct ModelInput {
  std::vector<int> type_ids;  // point class, or token id
  std::vector<char> is_point;
  std::vector<LatticePoint> coords;  // 0,0,0 for non-atom tokens

  int size() const { return static_cast<int>(type_ids.size()); }
  void push_point(int cls, const LatticePoint& q);
  void push_token(int token, const LatticePoint& q);
};

struct TrainingExample {
  ModelInput input;
  std::vector<HeadTargets> targets;  // per input position
  int n_points = 0;
};

// Input holds cloud + seq[0..n-2]; position n_points + k predicts seq[k+1].
TrainingExample make_example(const EncodedCloud& cloud, const EncodedSequence& seq);
// Cloud plus every token of `prefix`; the last row predicts the next token.
ModelInput make_prefix(const EncodedCloud& cloud, const EncodedSequence& prefix);

template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// All tensors in a fixed order. Biases and LayerNorm parameters are 1 x n.
template <typename S>
struct ModelParams {
  ModelConfig config;
  std::vector<std::string> names;
  std::vector<Matrix<S>> tensors;

  // Tensor indices.
  static constexpr int kWx = 0, kWy = 1, kWz = 2, kWtok = 3, kWcls = 4, kWpe = 5;
  static constexpr int kLayerBase = 6;
  enum LayerTensor { kLn1G, kLn1B, kAttnW, kAttnB, kProjW, kProjB, kLn2G, kLn2B, kFcW, kFcB, kFc2W, kFc2B };
  static constexpr int kPerLayer = 12;
  int layer(int l, LayerTensor t) const { return kLayerBase + l * kPerLayer + t; }
  int lnf_g() const { return kLayerBase + config.n_layer * kPerLayer; }
  int lnf_b() const { return lnf_g() + 1; }
  int head(int h) const { return lnf_g() + 2 + h; }

  Matrix<S>& operator[](int i) { return tensors[i]; }
  const Matrix<S>& operator[](int i) const { return tensors[i]; }
  int count() const { return static_cast<int>(tensors.size()); }
  std::size_t num_scalars() const;

  // Same shapes, zero values.
  ModelParams zeros_like() const;
  template <typename T>
  ModelParams<T> cast() const;
};

// Shapes only, all zero.
template <typename S>
ModelParams<S> make_params(const ModelConfig& config);

// Normal(0, init_range) weights and embeddings, unit LayerNorm gains,
// zero biases.
template <typename S>
ModelParams<S> init_params(const ModelConfig& config, std::uint64_t seed);

struct LossBreakdown {
  double total = 0;
  std::array<double, kNumHeads> head_ce{};  // mean CE per head (0 if no targets)
  std::array<int, kNumHeads> head_count{};
};

// Loss over a batch: per head, summed CE divided by that head's unmasked
// count across the batch; heads summed. When `grad` is given it receives
// d(loss)/d(params) (overwritten). `dropout_rng` enables dropout.
template <typename S>
LossBreakdown loss_and_grad(const ModelParams<S>& params, const std::vector<const TrainingExample*>& batch,
                            ModelParams<S>* grad, Rng* dropout_rng = nullptr);

// Logits of every head for the last position of `input` (inference mode).
template <typename S>
std::array<std::vector<double>, kNumHeads> next_logits(const ModelParams<S>& params, const ModelInput& input);

// Logits of every head at each requested row (inference mode).
template <typename S>
std::array<Matrix<S>, kNumHeads> forward_logits(const ModelParams<S>& params, const ModelInput& input,
                                                const std::vector<int>& rows);

}  // namespace edmol
