#include "edmol/generate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "edmol/error.hpp"

namespace edmol {

void GenerationConfig::validate() const {
  if (!(temperature > 0)) throw ParameterError("temperature must be positive");
  if (max_tokens < 0) throw ParameterError("max_tokens must be non-negative");
  if (n_samples < 1) throw ParameterError("n_samples must be positive");
  if (max_retries < 0) throw ParameterError("max_retries must be non-negative");
  tolerances.validate();
  discretization.validate();
}

std::string_view status_name(GenerationStatus s) {
  switch (s) {
    case GenerationStatus::Complete:
      return "complete";
    case GenerationStatus::Truncated:
      return "truncated";
    case GenerationStatus::Invalid:
      return "invalid";
  }
  return "invalid";
}

int sample_categorical(std::span<const double> logits, double temperature, Rng& rng) {
  if (!(temperature > 0)) throw ParameterError("temperature must be positive");
  int best = -1;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double v = logits[i];
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) throw NumericError("non-finite logit");
    if (v == -std::numeric_limits<double>::infinity()) continue;
    if (best < 0 || v > logits[best]) best = static_cast<int>(i);
  }
  if (best < 0) throw NumericError("every logit is -inf");
  if (temperature <= 1e-6) return best;

  std::vector<double> w(logits.size(), 0.0);
  double total = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (logits[i] == -std::numeric_limits<double>::infinity()) continue;
    w[i] = std::exp((logits[i] - logits[best]) / temperature);
    total += w[i];
  }
  const double u = rng.uniform() * total;
  double acc = 0;
  int last = best;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0) continue;
    acc += w[i];
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last;
}

bool within_slack(const AtomResidual& r, const ToleranceConfig& tol, const DiscretizationParams& params) {
  const double angle_slack = params.angle_bin / 2;
  if (r.dl > tol.delta_l + params.sigma) return false;
  if (r.dtheta > tol.delta_theta + angle_slack) return false;
  if (r.dphi > tol.delta_phi + angle_slack) return false;
  return true;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr LatticePoint kNoCoords{kAbsent, kAbsent, kAbsent};
constexpr std::array<int, 3> kNoGeom{kAbsent, kAbsent, kAbsent};

// Cheap prefix grammar: rejects tokens no continuation could make valid.
bool token_allowed(std::span<const TokenEvent> events, int token) {
  const Vocab& v = Vocab::instance();
  if (token == v.pad() || token == v.start()) return false;
  int depth = 0;
  int atoms = 0;
  int pending = 0;  // unconsumed stars from completed fragments and this one
  bool root = true;
  bool connector = false;
  bool in_bracket = false;
  int last = v.start();
  for (const auto& e : events) {
    const int id = e.token_id;
    if (id == v.sep()) {
      root = false;
      connector = false;
      depth = 0;
      atoms = 0;
    } else if (id == v.open()) {
      ++depth;
    } else if (id == v.close()) {
      --depth;
    } else if (id == v.star() || id == v.branch_star()) {
      if (!root && !connector) {
        connector = true;
        --pending;
      } else {
        ++pending;
      }
    } else if (v.token(id) == "[_0") {
      in_bracket = true;
    } else if (v.token(id) == "]_0") {
      in_bracket = false;
    }
    if (e.kind == TokenKind::Atom) ++atoms;
    last = id;
  }
  const std::string& last_text = v.text(last);
  const bool after_bond = last_text == "-" || last_text == "=" || last_text == "#";
  if (in_bracket) return v.kind(token) != TokenKind::Control;
  if (token == v.close()) return depth > 0 && last != v.open() && !after_bond;
  if (token == v.open()) return atoms > 0 && last != v.open() && !after_bond;
  if (token == v.sep() || token == v.end()) {
    if (depth != 0 || atoms == 0 || after_bond || last == v.open()) return false;
    if (!root && !connector) return false;
    return token == v.sep() ? pending > 0 : pending == 0;
  }
  if (token == v.branch_star()) return atoms > 0;
  return true;
}

std::vector<double> log_softmax(const std::vector<double>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0;
  for (double x : logits) sum += std::exp(x - mx);
  const double lse = mx + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

int clamp_bin(int b, int n) { return std::clamp(b, 0, n - 1); }

}  // namespace

GenerationResult generate_one(const EncodedCloud& cloud, const Vec3& center, const ModelParams<float>& params,
                              const GenerationConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const Vocab& v = Vocab::instance();
  const DiscretizationParams& dp = cfg.discretization;
  const double T = cfg.temperature;
  Rng rng(seed);

  GenerationResult res;
  res.seed = seed;
  int max_len = params.config.n_ctx - cloud.size();
  if (cfg.max_tokens > 0) max_len = std::min(max_len, cfg.max_tokens);
  if (max_len < 2) throw ParameterError("point cloud leaves no room for molecule tokens in n_ctx");

  EncodedSequence& seq = res.sequence;
  std::vector<TokenEvent> events;
  std::map<int, Vec3> position_at;  // sequence position -> Angstrom
  seq.tokens.push_back(v.start());
  seq.coords.push_back(kNoCoords);
  seq.geom.push_back(kNoGeom);
  events.push_back({v.start(), TokenKind::Control, std::nullopt});
  int n_atoms = 0;

  try {
    bool ended = false;
    while (seq.size() < max_len) {
      const auto logits = next_logits(params, make_prefix(cloud, seq));
      std::vector<double> tok_logits = logits[kTokenHead];
      tok_logits.resize(std::min<std::size_t>(tok_logits.size(), v.size()));
      int token = -1;
      for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        const int candidate = sample_categorical(tok_logits, T, rng);
        if (token_allowed(events, candidate)) {
          token = candidate;
          break;
        }
        tok_logits[candidate] = kNegInf;
        if (std::all_of(tok_logits.begin(), tok_logits.end(), [](double x) { return x == kNegInf; })) break;
      }
      if (token < 0) {
        res.status = GenerationStatus::Invalid;
        res.message = "no structurally valid token at position " + std::to_string(seq.size());
        return res;
      }

      const int pos = seq.size();
      TokenEvent ev{token, v.kind(token), std::nullopt};
      if (ev.kind != TokenKind::Atom) {
        events.push_back(ev);
        seq.tokens.push_back(token);
        seq.coords.push_back(kNoCoords);
        seq.geom.push_back(kNoGeom);
        if (token == v.end()) {
          ended = true;
          break;
        }
        continue;
      }

      ev.atom_index = n_atoms++;
      events.push_back(ev);
      const auto anc = trace_ancestors(events, pos);
      LatticePoint q{};
      std::array<int, 3> geom = kNoGeom;
      AtomResidual residual;
      if (!anc.r1) {
        for (int d = 0; d < 3; ++d) {
          std::vector<double> axis = logits[kXHead + d];
          axis.resize(std::min<int>(static_cast<int>(axis.size()), dp.coord_max + 1));
          for (int k = 0; k < dp.coord_min; ++k) axis[k] = kNegInf;
          q[d] = sample_categorical(axis, T, rng);
        }
      } else {
        Anchors anchors{position_at.at(*anc.r1), std::nullopt, std::nullopt};
        GeomRecord bins;
        bins.l_bin = clamp_bin(sample_categorical(logits[kLHead], T, rng), dp.num_length_bins);
        bins.has_l = true;
        if (anc.r2) {
          anchors.v2 = position_at.at(*anc.r2);
          bins.theta_bin = clamp_bin(sample_categorical(logits[kThetaHead], T, rng), dp.num_angle_bins);
          bins.has_theta = true;
          if (anc.r3) {
            anchors.v3 = position_at.at(*anc.r3);
            bins.phi_bin = clamp_bin(sample_categorical(logits[kPhiHead], T, rng), dp.num_angle_bins);
            bins.has_phi = true;
          }
        }
        const FeasibleSet set = feasible_lattice_points(anchors, bins, cfg.tolerances, dp, center);
        const auto lx = log_softmax(logits[kXHead]);
        const auto ly = log_softmax(logits[kYHead]);
        const auto lz = log_softmax(logits[kZHead]);
        std::vector<double> scores;
        scores.reserve(set.points.size());
        for (const auto& p : set.points) scores.push_back(lx.at(p[0]) + ly.at(p[1]) + lz.at(p[2]));
        q = set.points[sample_categorical(scores, T, rng)];

        const Vec3 placed = dequantize(q, center, dp);
        const GeomRecord target = dequantize_bins(bins.l_bin, bins.theta_bin, bins.phi_bin, bins.has_theta,
                                                  bins.has_phi, dp);
        const GeomRecord got = relative_geometry(anchors, placed, dp);
        geom[0] = bins.l_bin;
        residual.dl = std::abs(got.l - target.l);
        if (bins.has_theta) {
          geom[1] = bins.theta_bin;
          residual.dtheta = std::abs(got.theta - target.theta);
        }
        if (bins.has_phi) {
          geom[2] = bins.phi_bin;
          if (!degenerate_frame(*anchors.v3, *anchors.v2, anchors.v1)) {
            residual.dphi = circular_difference(got.phi, target.phi);
          }
        }
      }
      position_at[pos] = dequantize(q, center, dp);
      seq.tokens.push_back(token);
      seq.coords.push_back(q);
      seq.geom.push_back(geom);
      res.residuals.push_back(residual);
      if (!within_slack(residual, cfg.tolerances, dp)) {
        res.status = GenerationStatus::Invalid;
        res.message = "constraint residual above tolerance at position " + std::to_string(pos);
        return res;
      }
    }
    if (!ended) {
      res.status = GenerationStatus::Truncated;
      res.message = "reached max_tokens without end_0";
      return res;
    }
    Detokenized d = detokenize_with_positions(events);
    for (int a = 0; a < static_cast<int>(d.mol.size()); ++a) d.mol.atom(a).position = position_at.at(d.atom_position[a]);
    res.molecule = std::move(d.mol);
    res.status = GenerationStatus::Complete;
  } catch (const Error& e) {
    res.status = GenerationStatus::Invalid;
    res.message = e.what();
  }
  return res;
}

std::vector<GenerationResult> generate(const LabeledPointCloud& cloud, const ModelParams<float>& params,
                                       const GenerationConfig& cfg) {
  cfg.validate();
  if (cloud.n() == 0) throw InputError("empty point cloud");
  const Vec3 center = cloud.centroid();
  const EncodedCloud enc = encode_cloud(cloud, center, cfg.discretization);
  std::vector<GenerationResult> out;
  for (int i = 0; i < cfg.n_samples; ++i) out.push_back(generate_one(enc, center, params, cfg, cfg.seed + i));
  return out;
}

std::string generation_report_json(const std::vector<GenerationResult>& results) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    nlohmann::ordered_json j;
    j["index"] = i;
    j["seed"] = r.seed;
    j["status"] = status_name(r.status);
    j["message"] = r.message;
    j["tokens"] = events_to_string(events_from_ids(r.sequence.tokens));
    nlohmann::ordered_json res = nlohmann::ordered_json::array();
    for (const auto& a : r.residuals) res.push_back({a.dl, a.dtheta, a.dphi});
    j["residuals"] = res;
    arr.push_back(j);
  }
  return arr.dump(1) + "\n";
}

}  // namespace edmol
