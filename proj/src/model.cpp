#include "edmol/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "edmol/error.hpp"

namespace edmol {

ModelConfig ModelConfig::toy() { return ModelConfig{}; }

ModelConfig ModelConfig::full() {
  ModelConfig c;
  c.n_layer = 24;
  c.n_head = 16;
  c.n_embd = 1024;
  c.n_ctx = 1024;
  c.dropout = 0.1;
  return c;
}

void ModelConfig::validate() const {
  if (n_layer < 1 || n_head < 1 || n_embd < 1 || n_ctx < 1) throw ParameterError("model sizes must be positive");
  if (n_embd % n_head != 0) throw ParameterError("n_embd must be divisible by n_head");
  if (token_vocab < 1 || coord_vocab < 1 || l_vocab < 1 || theta_vocab < 1 || phi_vocab < 1 || point_classes < 1) {
    throw ParameterError("vocabulary sizes must be positive");
  }
  if (!(dropout >= 0 && dropout < 1)) throw ParameterError("dropout must be in [0, 1)");
  if (!(init_range >= 0)) throw ParameterError("init_range must be non-negative");
}

int head_size(const ModelConfig& c, int head) {
  switch (head) {
    case kTokenHead:
      return c.token_vocab;
    case kXHead:
    case kYHead:
    case kZHead:
      return c.coord_vocab;
    case kLHead:
      return c.l_vocab;
    case kThetaHead:
      return c.theta_vocab;
    case kPhiHead:
      return c.phi_vocab;
  }
  throw ParameterError("bad head index");
}

void ModelInput::push_point(int cls, const LatticePoint& q) {
  type_ids.push_back(cls);
  is_point.push_back(1);
  coords.push_back(q);
}

void ModelInput::push_token(int token, const LatticePoint& q) {
  type_ids.push_back(token);
  is_point.push_back(0);
  // Non-atom tokens use coordinate id 0.
  coords.push_back(q[0] < 0 ? LatticePoint{0, 0, 0} : q);
}

namespace {

HeadTargets targets_of(const EncodedSequence& seq, int k) {
  HeadTargets t;
  t.fill(kAbsent);
  t[kTokenHead] = seq.tokens[k];
  if (seq.coords[k][0] >= 0) {
    for (int d = 0; d < 3; ++d) t[kXHead + d] = seq.coords[k][d];
    for (int g = 0; g < 3; ++g) t[kLHead + g] = seq.geom[k][g];
  }
  return t;
}

ModelInput cloud_input(const EncodedCloud& cloud) {
  ModelInput in;
  for (int i = 0; i < cloud.size(); ++i) in.push_point(cloud.classes[i], cloud.coords[i]);
  return in;
}

}  // namespace

TrainingExample make_example(const EncodedCloud& cloud, const EncodedSequence& seq) {
  if (seq.size() < 2) throw InputError("encoded sequence too short");
  TrainingExample ex;
  ex.input = cloud_input(cloud);
  ex.n_points = cloud.size();
  HeadTargets none;
  none.fill(kAbsent);
  ex.targets.assign(cloud.size(), none);
  for (int k = 0; k + 1 < seq.size(); ++k) {
    ex.input.push_token(seq.tokens[k], seq.coords[k]);
    ex.targets.push_back(targets_of(seq, k + 1));
  }
  return ex;
}

ModelInput make_prefix(const EncodedCloud& cloud, const EncodedSequence& prefix) {
  ModelInput in = cloud_input(cloud);
  for (int k = 0; k < prefix.size(); ++k) in.push_token(prefix.tokens[k], prefix.coords[k]);
  return in;
}

template <typename S>
std::size_t ModelParams<S>::num_scalars() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += static_cast<std::size_t>(t.size());
  return n;
}

template <typename S>
ModelParams<S> ModelParams<S>::zeros_like() const {
  ModelParams out;
  out.config = config;
  out.names = names;
  for (const auto& t : tensors) out.tensors.push_back(Matrix<S>::Zero(t.rows(), t.cols()));
  return out;
}

template <typename S>
template <typename T>
ModelParams<T> ModelParams<S>::cast() const {
  ModelParams<T> out;
  out.config = config;
  out.names = names;
  for (const auto& t : tensors) out.tensors.push_back(t.template cast<T>());
  return out;
}

template <typename S>
ModelParams<S> make_params(const ModelConfig& c) {
  c.validate();
  ModelParams<S> p;
  p.config = c;
  const int d = c.n_embd;
  auto add = [&](const std::string& name, int rows, int cols) {
    p.names.push_back(name);
    p.tensors.push_back(Matrix<S>::Zero(rows, cols));
  };
  add("wx", c.coord_vocab, d);
  add("wy", c.coord_vocab, d);
  add("wz", c.coord_vocab, d);
  add("wtok", c.token_vocab, d);
  add("wcls", c.point_classes, d);
  add("wpe", c.n_ctx, d);
  for (int l = 0; l < c.n_layer; ++l) {
    const std::string h = "h" + std::to_string(l) + ".";
    add(h + "ln1.g", 1, d);
    add(h + "ln1.b", 1, d);
    add(h + "attn.w", d, 3 * d);
    add(h + "attn.b", 1, 3 * d);
    add(h + "proj.w", d, d);
    add(h + "proj.b", 1, d);
    add(h + "ln2.g", 1, d);
    add(h + "ln2.b", 1, d);
    add(h + "fc.w", d, 4 * d);
    add(h + "fc.b", 1, 4 * d);
    add(h + "fc2.w", 4 * d, d);
    add(h + "fc2.b", 1, d);
  }
  add("lnf.g", 1, d);
  add("lnf.b", 1, d);
  for (int h = 0; h < kNumHeads; ++h) add(std::string("head.") + kHeadNames[h], d, head_size(c, h));
  return p;
}

namespace {

bool is_gain(const std::string& name) { return name.size() > 2 && name.compare(name.size() - 2, 2, ".g") == 0; }
bool is_bias(const std::string& name) { return name.size() > 2 && name.compare(name.size() - 2, 2, ".b") == 0; }

double normal(Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

template <typename S>
ModelParams<S> init_params(const ModelConfig& c, std::uint64_t seed) {
  ModelParams<S> p = make_params<S>(c);
  Rng rng(seed);
  for (int i = 0; i < p.count(); ++i) {
    auto& t = p.tensors[i];
    if (is_gain(p.names[i])) {
      t.setOnes();
    } else if (!is_bias(p.names[i])) {
      for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = static_cast<S>(c.init_range * normal(rng));
    }
  }
  return p;
}

namespace {

constexpr double kLnEps = 1e-5;

template <typename S>
struct LnCache {
  Matrix<S> xhat;
  std::vector<S> rstd;
};

template <typename S>
Matrix<S> layer_norm(const Matrix<S>& x, const Matrix<S>& g, const Matrix<S>& b, LnCache<S>* cache) {
  const Eigen::Index T = x.rows();
  Matrix<S> xhat(T, x.cols());
  std::vector<S> rstd(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const S mu = x.row(t).mean();
    auto centered = (x.row(t).array() - mu).matrix();
    const S var = centered.squaredNorm() / static_cast<S>(x.cols());
    rstd[t] = S(1) / std::sqrt(var + static_cast<S>(kLnEps));
    xhat.row(t) = centered * rstd[t];
  }
  Matrix<S> y = ((xhat.array().rowwise() * g.row(0).array()).rowwise() + b.row(0).array()).matrix();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->rstd = std::move(rstd);
  }
  return y;
}

template <typename S>
Matrix<S> layer_norm_backward(const Matrix<S>& dy, const LnCache<S>& c, const Matrix<S>& g, Matrix<S>& dg,
                              Matrix<S>& db) {
  dg.row(0) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  db.row(0) += dy.colwise().sum();
  Matrix<S> dxhat = (dy.array().rowwise() * g.row(0).array()).matrix();
  Matrix<S> dx(dy.rows(), dy.cols());
  const S inv_d = S(1) / static_cast<S>(dy.cols());
  for (Eigen::Index t = 0; t < dy.rows(); ++t) {
    const S m1 = dxhat.row(t).sum() * inv_d;
    const S m2 = dxhat.row(t).dot(c.xhat.row(t)) * inv_d;
    dx.row(t) = ((dxhat.row(t).array() - m1 - c.xhat.row(t).array() * m2) * c.rstd[t]).matrix();
  }
  return dx;
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

template <typename S>
S gelu(S x) {
  return S(0.5) * x * (S(1) + std::tanh(static_cast<S>(kGeluC) * (x + static_cast<S>(kGeluA) * x * x * x)));
}

template <typename S>
S gelu_grad(S x) {
  const S t = std::tanh(static_cast<S>(kGeluC) * (x + static_cast<S>(kGeluA) * x * x * x));
  return S(0.5) * (S(1) + t) +
         S(0.5) * x * (S(1) - t * t) * static_cast<S>(kGeluC) * (S(1) + S(3) * static_cast<S>(kGeluA) * x * x);
}

// Inverted dropout mask, or empty when disabled.
template <typename S>
Matrix<S> dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng* rng) {
  if (!rng || p <= 0) return {};
  Matrix<S> m(rows, cols);
  const S keep = static_cast<S>(1.0 / (1.0 - p));
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng->uniform() < p ? S(0) : keep;
  return m;
}

template <typename S>
void apply_mask(Matrix<S>& x, const Matrix<S>& mask) {
  if (mask.size() != 0) x.array() *= mask.array();
}

template <typename S>
struct LayerCache {
  Matrix<S> x;
  LnCache<S> ln1;
  Matrix<S> a1;
  Matrix<S> qkv;
  std::vector<Matrix<S>> probs;
  std::vector<Matrix<S>> prob_masks;
  Matrix<S> att;
  Matrix<S> proj_mask;
  Matrix<S> h1;
  LnCache<S> ln2;
  Matrix<S> a2;
  Matrix<S> f;
  Matrix<S> g;
  Matrix<S> fc2_mask;
};

template <typename S>
struct ForwardCache {
  Matrix<S> embd_mask;
  std::vector<LayerCache<S>> layers;
  LnCache<S> lnf;
  Matrix<S> hf;
};

template <typename S>
void check_input(const ModelConfig& c, const ModelInput& in) {
  if (in.size() == 0) throw InputError("empty model input");
  if (in.size() > c.n_ctx) {
    throw InputError("sequence length " + std::to_string(in.size()) + " exceeds n_ctx " + std::to_string(c.n_ctx));
  }
  for (int t = 0; t < in.size(); ++t) {
    const int limit = in.is_point[t] ? c.point_classes : c.token_vocab;
    if (in.type_ids[t] < 0 || in.type_ids[t] >= limit) throw InputError("type id out of range at position " + std::to_string(t));
    for (int d = 0; d < 3; ++d) {
      if (in.coords[t][d] < 0 || in.coords[t][d] >= c.coord_vocab) {
        throw InputError("coordinate id out of range at position " + std::to_string(t));
      }
    }
  }
}

template <typename S>
Matrix<S> embed(const ModelParams<S>& p, const ModelInput& in) {
  using P = ModelParams<S>;
  const int T = in.size();
  Matrix<S> h(T, p.config.n_embd);
  for (int t = 0; t < T; ++t) {
    const auto& q = in.coords[t];
    const Matrix<S>& type_table = in.is_point[t] ? p[P::kWcls] : p[P::kWtok];
    h.row(t) = p[P::kWx].row(q[0]) + p[P::kWy].row(q[1]) + p[P::kWz].row(q[2]) + type_table.row(in.type_ids[t]) +
               p[P::kWpe].row(t);
  }
  return h;
}

// Pre-LN blocks, then the final LayerNorm. Fills `cache` for backward.
template <typename S>
Matrix<S> forward_hidden(const ModelParams<S>& p, const ModelInput& in, ForwardCache<S>* cache, Rng* rng) {
  using P = ModelParams<S>;
  const ModelConfig& c = p.config;
  check_input<S>(c, in);
  const Eigen::Index T = in.size();
  const int d = c.n_embd;
  const int nh = c.n_head;
  const int hd = d / nh;
  const S scale = S(1) / std::sqrt(static_cast<S>(hd));

  Matrix<S> x = embed(p, in);
  Matrix<S> mask = dropout_mask<S>(T, d, c.dropout, rng);
  apply_mask(x, mask);
  if (cache) {
    cache->embd_mask = std::move(mask);
    cache->layers.assign(c.n_layer, {});
  }

  for (int l = 0; l < c.n_layer; ++l) {
    LayerCache<S> local;
    LayerCache<S>& lc = cache ? cache->layers[l] : local;
    lc.x = x;
    lc.a1 = layer_norm(x, p[p.layer(l, P::kLn1G)], p[p.layer(l, P::kLn1B)], &lc.ln1);
    lc.qkv = lc.a1 * p[p.layer(l, P::kAttnW)];
    lc.qkv.rowwise() += p[p.layer(l, P::kAttnB)].row(0);
    lc.att.setZero(T, d);
    lc.probs.assign(nh, {});
    lc.prob_masks.assign(nh, {});
    for (int h = 0; h < nh; ++h) {
      const auto q = lc.qkv.middleCols(h * hd, hd);
      const auto k = lc.qkv.middleCols(d + h * hd, hd);
      const auto v = lc.qkv.middleCols(2 * d + h * hd, hd);
      Matrix<S> P_ = (q * k.transpose()) * scale;
      for (Eigen::Index i = 0; i < T; ++i) {
        const S mx = P_.row(i).head(i + 1).maxCoeff();
        S sum = 0;
        for (Eigen::Index j = 0; j <= i; ++j) {
          P_(i, j) = std::exp(P_(i, j) - mx);
          sum += P_(i, j);
        }
        P_.row(i).head(i + 1) /= sum;
        P_.row(i).tail(T - i - 1).setZero();
      }
      lc.prob_masks[h] = dropout_mask<S>(T, T, c.dropout, rng);
      if (lc.prob_masks[h].size() != 0) {
        Matrix<S> dropped = (P_.array() * lc.prob_masks[h].array()).matrix();
        lc.att.middleCols(h * hd, hd) = dropped * v;
      } else {
        lc.att.middleCols(h * hd, hd) = P_ * v;
      }
      lc.probs[h] = std::move(P_);
    }
    Matrix<S> y = lc.att * p[p.layer(l, P::kProjW)];
    y.rowwise() += p[p.layer(l, P::kProjB)].row(0);
    lc.proj_mask = dropout_mask<S>(T, d, c.dropout, rng);
    apply_mask(y, lc.proj_mask);
    lc.h1 = x + y;

    lc.a2 = layer_norm(lc.h1, p[p.layer(l, P::kLn2G)], p[p.layer(l, P::kLn2B)], &lc.ln2);
    lc.f = lc.a2 * p[p.layer(l, P::kFcW)];
    lc.f.rowwise() += p[p.layer(l, P::kFcB)].row(0);
    lc.g = lc.f.unaryExpr([](S v) { return gelu(v); });
    Matrix<S> z = lc.g * p[p.layer(l, P::kFc2W)];
    z.rowwise() += p[p.layer(l, P::kFc2B)].row(0);
    lc.fc2_mask = dropout_mask<S>(T, d, c.dropout, rng);
    apply_mask(z, lc.fc2_mask);
    x = lc.h1 + z;
  }
  LnCache<S> local_ln;
  Matrix<S> hf = layer_norm(x, p[p.lnf_g()], p[p.lnf_b()], cache ? &cache->lnf : &local_ln);
  if (cache) cache->hf = hf;
  return hf;
}

template <typename S>
Matrix<S> gather_rows(const Matrix<S>& m, const std::vector<int>& rows) {
  Matrix<S> out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = m.row(rows[r]);
  return out;
}

// Backward through the blocks given d(loss)/d(hf).
template <typename S>
void backward(const ModelParams<S>& p, const ModelInput& in, const ForwardCache<S>& cache, const Matrix<S>& dhf,
              ModelParams<S>& grad) {
  using P = ModelParams<S>;
  const ModelConfig& c = p.config;
  const Eigen::Index T = in.size();
  const int d = c.n_embd;
  const int nh = c.n_head;
  const int hd = d / nh;
  const S scale = S(1) / std::sqrt(static_cast<S>(hd));

  Matrix<S> dx = layer_norm_backward(dhf, cache.lnf, p[p.lnf_g()], grad[p.lnf_g()], grad[p.lnf_b()]);

  for (int l = c.n_layer - 1; l >= 0; --l) {
    const LayerCache<S>& lc = cache.layers[l];
    // MLP sublayer.
    Matrix<S> dz = dx;
    apply_mask(dz, lc.fc2_mask);
    grad[p.layer(l, P::kFc2W)].noalias() += lc.g.transpose() * dz;
    grad[p.layer(l, P::kFc2B)].row(0) += dz.colwise().sum();
    Matrix<S> df = dz * p[p.layer(l, P::kFc2W)].transpose();
    df.array() *= lc.f.unaryExpr([](S v) { return gelu_grad(v); }).array();
    grad[p.layer(l, P::kFcW)].noalias() += lc.a2.transpose() * df;
    grad[p.layer(l, P::kFcB)].row(0) += df.colwise().sum();
    Matrix<S> da2 = df * p[p.layer(l, P::kFcW)].transpose();
    Matrix<S> dh1 = dx + layer_norm_backward(da2, lc.ln2, p[p.layer(l, P::kLn2G)], grad[p.layer(l, P::kLn2G)],
                                             grad[p.layer(l, P::kLn2B)]);

    // Attention sublayer.
    Matrix<S> dy = dh1;
    apply_mask(dy, lc.proj_mask);
    grad[p.layer(l, P::kProjW)].noalias() += lc.att.transpose() * dy;
    grad[p.layer(l, P::kProjB)].row(0) += dy.colwise().sum();
    Matrix<S> datt = dy * p[p.layer(l, P::kProjW)].transpose();
    Matrix<S> dqkv = Matrix<S>::Zero(T, 3 * d);
    for (int h = 0; h < nh; ++h) {
      const auto q = lc.qkv.middleCols(h * hd, hd);
      const auto k = lc.qkv.middleCols(d + h * hd, hd);
      const auto v = lc.qkv.middleCols(2 * d + h * hd, hd);
      const Matrix<S>& P_ = lc.probs[h];
      const Matrix<S>& m = lc.prob_masks[h];
      const auto dO = datt.middleCols(h * hd, hd);
      Matrix<S> dP = dO * v.transpose();
      if (m.size() != 0) {
        Matrix<S> Pd = (P_.array() * m.array()).matrix();
        dqkv.middleCols(2 * d + h * hd, hd) = Pd.transpose() * dO;
        dP.array() *= m.array();
      } else {
        dqkv.middleCols(2 * d + h * hd, hd) = P_.transpose() * dO;
      }
      Matrix<S> dS(T, T);
      for (Eigen::Index i = 0; i < T; ++i) {
        const S dot = P_.row(i).head(i + 1).dot(dP.row(i).head(i + 1));
        dS.row(i).head(i + 1) = (P_.row(i).head(i + 1).array() * (dP.row(i).head(i + 1).array() - dot)).matrix();
        dS.row(i).tail(T - i - 1).setZero();
      }
      dS *= scale;
      dqkv.middleCols(h * hd, hd) = dS * k;
      dqkv.middleCols(d + h * hd, hd) = dS.transpose() * q;
    }
    grad[p.layer(l, P::kAttnW)].noalias() += lc.a1.transpose() * dqkv;
    grad[p.layer(l, P::kAttnB)].row(0) += dqkv.colwise().sum();
    Matrix<S> da1 = dqkv * p[p.layer(l, P::kAttnW)].transpose();
    dx = dh1 + layer_norm_backward(da1, lc.ln1, p[p.layer(l, P::kLn1G)], grad[p.layer(l, P::kLn1G)],
                                   grad[p.layer(l, P::kLn1B)]);
  }

  apply_mask(dx, cache.embd_mask);
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto& q = in.coords[t];
    grad[P::kWx].row(q[0]) += dx.row(t);
    grad[P::kWy].row(q[1]) += dx.row(t);
    grad[P::kWz].row(q[2]) += dx.row(t);
    grad[in.is_point[t] ? P::kWcls : P::kWtok].row(in.type_ids[t]) += dx.row(t);
    grad[P::kWpe].row(t) += dx.row(t);
  }
}

}  // namespace

template <typename S>
LossBreakdown loss_and_grad(const ModelParams<S>& params, const std::vector<const TrainingExample*>& batch,
                            ModelParams<S>* grad, Rng* dropout_rng) {
  LossBreakdown out;
  for (const TrainingExample* ex : batch) {
    if (ex->targets.size() != static_cast<std::size_t>(ex->input.size())) {
      throw InputError("targets and input differ in length");
    }
    for (const auto& t : ex->targets) {
      for (int h = 0; h < kNumHeads; ++h) out.head_count[h] += t[h] != kAbsent;
    }
  }
  int total_count = 0;
  for (int n : out.head_count) total_count += n;
  if (total_count == 0) throw InputError("batch has no unmasked targets");

  if (grad) *grad = params.zeros_like();
  std::array<double, kNumHeads> ce_sum{};

  for (const TrainingExample* ex : batch) {
    std::vector<int> rows;
    for (int t = 0; t < ex->input.size(); ++t) {
      for (int h = 0; h < kNumHeads; ++h) {
        if (ex->targets[t][h] != kAbsent) {
          rows.push_back(t);
          break;
        }
      }
    }
    if (rows.empty()) continue;
    ForwardCache<S> cache;
    const Matrix<S> hf = forward_hidden(params, ex->input, grad ? &cache : nullptr, dropout_rng);
    const Matrix<S> hr = gather_rows(hf, rows);
    Matrix<S> dhr = Matrix<S>::Zero(hr.rows(), hr.cols());

    for (int h = 0; h < kNumHeads; ++h) {
      if (out.head_count[h] == 0) continue;
      const Matrix<S>& W = params[params.head(h)];
      Matrix<S> logits = hr * W;
      Matrix<S> dlogits = Matrix<S>::Zero(logits.rows(), logits.cols());
      bool any = false;
      const S weight = S(1) / static_cast<S>(out.head_count[h]);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const int target = ex->targets[rows[r]][h];
        if (target == kAbsent) continue;
        if (target < 0 || target >= logits.cols()) throw InputError("target out of range for head " + std::string(kHeadNames[h]));
        any = true;
        const S mx = logits.row(r).maxCoeff();
        const auto e = (logits.row(r).array() - mx).exp();
        const S sum = e.sum();
        ce_sum[h] += static_cast<double>(std::log(sum) + mx - logits(r, target));
        if (grad) {
          dlogits.row(r) = (e / sum * weight).matrix();
          dlogits(r, target) -= weight;
        }
      }
      if (grad && any) {
        (*grad)[params.head(h)].noalias() += hr.transpose() * dlogits;
        dhr.noalias() += dlogits * W.transpose();
      }
    }
    if (grad) {
      Matrix<S> dhf = Matrix<S>::Zero(hf.rows(), hf.cols());
      for (std::size_t r = 0; r < rows.size(); ++r) dhf.row(rows[r]) = dhr.row(r);
      backward(params, ex->input, cache, dhf, *grad);
    }
  }

  for (int h = 0; h < kNumHeads; ++h) {
    if (out.head_count[h] == 0) continue;
    out.head_ce[h] = ce_sum[h] / out.head_count[h];
    out.total += out.head_ce[h];
  }
  return out;
}

template <typename S>
std::array<Matrix<S>, kNumHeads> forward_logits(const ModelParams<S>& params, const ModelInput& input,
                                                const std::vector<int>& rows) {
  const Matrix<S> hf = forward_hidden<S>(params, input, nullptr, nullptr);
  const Matrix<S> hr = gather_rows(hf, rows);
  std::array<Matrix<S>, kNumHeads> out;
  for (int h = 0; h < kNumHeads; ++h) out[h] = hr * params[params.head(h)];
  return out;
}

template <typename S>
std::array<std::vector<double>, kNumHeads> next_logits(const ModelParams<S>& params, const ModelInput& input) {
  const auto logits = forward_logits(params, input, {input.size() - 1});
  std::array<std::vector<double>, kNumHeads> out;
  for (int h = 0; h < kNumHeads; ++h) {
    out[h].resize(logits[h].cols());
    for (Eigen::Index j = 0; j < logits[h].cols(); ++j) out[h][j] = static_cast<double>(logits[h](0, j));
  }
  return out;
}

#define EDMOL_INSTANTIATE(S)                                                                                      \
  template struct ModelParams<S>;                                                                                 \
  template ModelParams<S> make_params<S>(const ModelConfig&);                                                     \
  template ModelParams<S> init_params<S>(const ModelConfig&, std::uint64_t);                                      \
  template LossBreakdown loss_and_grad<S>(const ModelParams<S>&, const std::vector<const TrainingExample*>&,      \
                                          ModelParams<S>*, Rng*);                                                 \
  template std::array<Matrix<S>, kNumHeads> forward_logits<S>(const ModelParams<S>&, const ModelInput&,           \
                                                              const std::vector<int>&);                          \
  template std::array<std::vector<double>, kNumHeads> next_logits<S>(const ModelParams<S>&, const ModelInput&);

EDMOL_INSTANTIATE(float)
EDMOL_INSTANTIATE(double)
template ModelParams<double> ModelParams<float>::cast<double>() const;
template ModelParams<float> ModelParams<double>::cast<float>() const;
template ModelParams<float> ModelParams<float>::cast<float>() const;
template ModelParams<double> ModelParams<double>::cast<double>() const;

#undef EDMOL_INSTANTIATE

}  // namespace edmol
