#include "edmol/train.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "edmol/error.hpp"

namespace edmol {

void TrainConfig::validate() const {
  if (steps < 0) throw ParameterError("steps must be non-negative");
  if (batch_size < 1) throw ParameterError("batch_size must be positive");
  if (!(lr > 0)) throw ParameterError("lr must be positive");
  if (warmup < 0) throw ParameterError("warmup must be non-negative");
  if (!(min_lr_ratio >= 0 && min_lr_ratio <= 1)) throw ParameterError("min_lr_ratio must be in [0, 1]");
  if (!(weight_decay >= 0)) throw ParameterError("weight_decay must be non-negative");
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1)) throw ParameterError("betas must be in [0, 1)");
  if (!(eps > 0)) throw ParameterError("eps must be positive");
  if (!(grad_clip >= 0)) throw ParameterError("grad_clip must be non-negative");
  if (eval_every < 0) throw ParameterError("eval_every must be non-negative");
}

double learning_rate(const TrainConfig& cfg, int step) {
  if (step < cfg.warmup) return cfg.lr * step / cfg.warmup;
  const double floor = cfg.lr * cfg.min_lr_ratio;
  const int span = cfg.steps - cfg.warmup;
  if (span <= 0) return cfg.lr;
  const double progress = std::min(1.0, static_cast<double>(step - cfg.warmup) / span);
  return floor + 0.5 * (cfg.lr - floor) * (1.0 + std::cos(std::numbers::pi * progress));
}

AdamState make_adam_state(const ModelParams<float>& params) {
  return AdamState{params.zeros_like(), params.zeros_like(), 0};
}

namespace {

bool decays(const std::string& name) {
  auto ends = [&](std::string_view s) {
    return name.size() >= s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0;
  };
  return ends(".w") || name.rfind("head.", 0) == 0;
}

}  // namespace

double adamw_step(ModelParams<float>& params, ModelParams<float>& grad, AdamState& state, double lr,
                  const TrainConfig& cfg) {
  double sq = 0;
  for (const auto& g : grad.tensors) sq += static_cast<double>(g.squaredNorm());
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw InternalError("non-finite gradient norm");
  if (cfg.grad_clip > 0 && norm > cfg.grad_clip) {
    const float s = static_cast<float>(cfg.grad_clip / norm);
    for (auto& g : grad.tensors) g *= s;
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, state.step);
  const double bc2 = 1.0 - std::pow(cfg.beta2, state.step);
  const float b1 = static_cast<float>(cfg.beta1);
  const float b2 = static_cast<float>(cfg.beta2);
  const float step_size = static_cast<float>(lr / bc1);
  const float inv_bc2 = static_cast<float>(1.0 / bc2);
  const float eps = static_cast<float>(cfg.eps);
  for (int i = 0; i < params.count(); ++i) {
    auto& p = params[i];
    auto& m = state.m[i];
    auto& v = state.v[i];
    const auto& g = grad[i];
    if (cfg.weight_decay > 0 && decays(params.names[i])) p *= static_cast<float>(1.0 - lr * cfg.weight_decay);
    m = b1 * m + (1.0f - b1) * g;
    v = (b2 * v.array() + (1.0f - b2) * g.array().square()).matrix();
    p.array() -= step_size * m.array() / ((v.array() * inv_bc2).sqrt() + eps);
  }
  return norm;
}

LossBreakdown evaluate(const ModelParams<float>& params, const std::vector<TrainingExample>& data) {
  std::vector<const TrainingExample*> all;
  for (const auto& ex : data) all.push_back(&ex);
  return loss_and_grad<float>(params, all, nullptr, nullptr);
}

TrainResult train(const std::vector<TrainingExample>& data, const ModelConfig& model, const TrainConfig& cfg,
                  const StepCallback& on_step) {
  cfg.validate();
  model.validate();
  if (data.empty()) throw InputError("training set is empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].input.size() > model.n_ctx) {
      throw InputError("training example " + std::to_string(i) + " has " + std::to_string(data[i].input.size()) +
                       " positions, n_ctx is " + std::to_string(model.n_ctx));
    }
  }

  TrainResult result;
  result.params = init_params<float>(model, derive_seed(cfg.seed, 0));
  Rng shuffle_rng(derive_seed(cfg.seed, 1));
  Rng dropout_rng(derive_seed(cfg.seed, 2));
  AdamState state = make_adam_state(result.params);
  ModelParams<float> grad;

  std::vector<int> order(data.size());
  std::size_t cursor = order.size();
  auto next_example = [&]() -> const TrainingExample* {
    if (cursor == order.size()) {
      std::iota(order.begin(), order.end(), 0);
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);
      cursor = 0;
    }
    return &data[order[cursor++]];
  };

  for (int step = 1; step <= cfg.steps; ++step) {
    std::vector<const TrainingExample*> batch;
    for (int b = 0; b < cfg.batch_size; ++b) batch.push_back(next_example());
    const LossBreakdown loss = loss_and_grad<float>(result.params, batch, &grad, &dropout_rng);
    if (!std::isfinite(loss.total)) {
      throw InternalError("non-finite loss at step " + std::to_string(step));
    }
    const double lr = learning_rate(cfg, step);
    adamw_step(result.params, grad, state, lr, cfg);
    TrainLogEntry entry{step, loss.total, loss.head_ce[kTokenHead], lr};
    result.log.push_back(entry);
    result.steps_run = step;
    if (on_step) on_step(entry, result.params);
    if (cfg.eval_every > 0 && step % cfg.eval_every == 0) {
      result.eval_token_ce = evaluate(result.params, data).head_ce[kTokenHead];
      if (cfg.target_token_ce > 0 && result.eval_token_ce < cfg.target_token_ce) break;
    }
  }
  return result;
}

}  // namespace edmol
