#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edmol/model.hpp"

namespace edmol {

struct GenerationConfig {
  double temperature = 0.7;
  int max_tokens = 0;  // 0 = n_ctx - cloud size
  int n_samples = 10;
  std::uint64_t seed = 0;
  int max_retries = 3;  // resamples of a structurally impossible token
  ToleranceConfig tolerances;
  DiscretizationParams discretization;

  void validate() const;
};

enum class GenerationStatus { Complete, Truncated, Invalid };

std::string_view status_name(GenerationStatus s);

// |measured - target| per constrained field; -1 where the field was absent.
struct AtomResidual {
  double dl = -1;
  double dtheta = -1;
  double dphi = -1;
};

struct GenerationResult {
  Molecule molecule;  // Angstrom, original frame; empty unless complete
  EncodedSequence sequence;
  std::vector<AtomResidual> residuals;  // per atom, in token order
  GenerationStatus status = GenerationStatus::Invalid;
  std::string message;
  std::uint64_t seed = 0;
};

// Draw from softmax(logits / T); T <= 1e-6 takes the argmax (lowest index on
// ties). -inf entries are excluded. Throws NumericError on NaN or +inf, or
// when every entry is -inf.
int sample_categorical(std::span<const double> logits, double temperature, Rng& rng);

// Residual bound for complete results: tolerance plus one lattice step
// (sigma for l, 5 degrees for angles).
bool within_slack(const AtomResidual& r, const ToleranceConfig& tol, const DiscretizationParams& params);

// One rollout on the cloud's shared lattice (centered on `center`).
GenerationResult generate_one(const EncodedCloud& cloud, const Vec3& center, const ModelParams<float>& params,
                              const GenerationConfig& cfg, std::uint64_t seed);

// cfg.n_samples rollouts with seeds cfg.seed + i.
std::vector<GenerationResult> generate(const LabeledPointCloud& cloud, const ModelParams<float>& params,
                                       const GenerationConfig& cfg);

// JSON sidecar: one object per rollout with status, seed, tokens and residuals.
std::string generation_report_json(const std::vector<GenerationResult>& results);

}  // namespace edmol
