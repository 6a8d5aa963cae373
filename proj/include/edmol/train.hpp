#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "edmol/model.hpp"

namespace edmol {

struct TrainConfig {
  int steps = 3000;
  int batch_size = 4;
  double lr = 3e-4;
  int warmup = 100;
  double min_lr_ratio = 0.1;  // cosine floor as a fraction of lr
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double grad_clip = 1.0;  // global L2 norm; 0 disables
  std::uint64_t seed = 0;
  // Full-set evaluation every eval_every steps (0 = never); training stops
  // early once the token-head CE drops below target_token_ce (> 0).
  int eval_every = 0;
  double target_token_ce = 0;

  void validate() const;
};

// Linear warmup (lr * s / warmup for s < warmup), then cosine decay to
// lr * min_lr_ratio at `steps`.
double learning_rate(const TrainConfig& cfg, int step);

struct AdamState {
  ModelParams<float> m;
  ModelParams<float> v;
  int step = 0;
};

AdamState make_adam_state(const ModelParams<float>& params);

// Decoupled weight decay applies to linear and head weights only. Returns
// the gradient norm before clipping.
double adamw_step(ModelParams<float>& params, ModelParams<float>& grad, AdamState& state, double lr,
                  const TrainConfig& cfg);

struct TrainLogEntry {
  int step = 0;
  double loss = 0;
  double token_ce = 0;
  double lr = 0;
};

struct TrainResult {
  ModelParams<float> params;
  std::vector<TrainLogEntry> log;
  int steps_run = 0;
  double eval_token_ce = -1;  // last full-set evaluation, -1 if none
};

using StepCallback = std::function<void(const TrainLogEntry&, const ModelParams<float>&)>;

// Deterministic given cfg.seed: init, shuffling and dropout use separate
// derived streams; batches reduce serially.
TrainResult train(const std::vector<TrainingExample>& data, const ModelConfig& model, const TrainConfig& cfg,
                  const StepCallback& on_step = {});

// Per-head mean CE over the whole set, no dropout.
LossBreakdown evaluate(const ModelParams<float>& params, const std::vector<TrainingExample>& data);

}  // namespace edmol
