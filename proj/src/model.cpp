#include "amagcn/model.hpp"

#include <cmath>

#include "amagcn/container.hpp"
#include "amagcn/errors.hpp"

namespace amagcn::model {

namespace {

// Window split for the two max-pool aggregations: the first covers layers
// 1..mid, the second mid..L (1-indexed), sharing the middle layer.
std::size_t pool_mid(int layers) { return static_cast<std::size_t>((layers + 1) / 2); }

Matrix masked_diff(const Matrix& probs, const Matrix& one_hot, const std::vector<char>& mask,
                   double scale) {
  Matrix d(probs.rows, probs.cols);
  for (std::size_t i = 0; i < probs.rows; ++i) {
    if (!mask[i]) continue;
    const double* p = probs.row(i);
    const double* y = one_hot.row(i);
    double* o = d.row(i);
    for (std::size_t j = 0; j < probs.cols; ++j) o[j] = scale * (p[j] - y[j]);
  }
  return d;
}

void append_layer(ParamRefs& refs, nn::LayerParams& layer, const std::string& base) {
  for (std::size_t k = 0; k < layer.weights.size(); ++k) {
    refs.tensors.push_back(&layer.weights[k]);
    refs.decay.push_back(1);
    refs.names.push_back(base + ".W" + std::to_string(k));
  }
  refs.tensors.push_back(&layer.bias);
  refs.decay.push_back(0);
  refs.names.push_back(base + ".b");
}

// Visits every tensor with its checkpoint name, in declaration order.
template <typename F>
void for_each_tensor(const ModelParams& p, F&& f) {
  auto visit_layer = [&f](const nn::LayerParams& layer, const std::string& base) {
    for (std::size_t k = 0; k < layer.weights.size(); ++k)
      f(base + ".W" + std::to_string(k), layer.weights[k]);
    f(base + ".b", layer.bias);
  };
  for (std::size_t i = 0; i < p.gc.size(); ++i)
    visit_layer(p.gc[i], "gc" + std::to_string(i));
  if (!p.head.weights.empty()) visit_layer(p.head, "head");
  for (std::size_t i = 0; i < p.adu.size(); ++i)
    visit_layer(p.adu[i], "adu" + std::to_string(i));
}

}  // namespace

Ablation ablation_from_string(const std::string& s) {
  if (s == "full") return Ablation::full;
  if (s == "noP") return Ablation::noP;
  if (s == "noW") return Ablation::noW;
  if (s == "noA") return Ablation::noA;
  if (s == "noS") return Ablation::noS;
  throw UsageError("unknown ablation '" + s + "' (expected full|noP|noW|noA|noS)");
}

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::noP: return "noP";
    case Ablation::noW: return "noW";
    case Ablation::noA: return "noA";
    case Ablation::noS: return "noS";
  }
  return "full";
}

void AmaGcnConfig::validate() const {
  if (mla_layers < 1) throw UsageError("mla_layers must be >= 1");
  if (adu_layers < 1) throw UsageError("adu_layers must be >= 1");
  if (hidden_dim < 1) throw UsageError("hidden_dim must be >= 1");
  if (cheb_order < 0) throw UsageError("cheb_order must be >= 0");
  if (dropout < 0.0 || dropout >= 1.0) throw UsageError("dropout must be in [0, 1)");
  if (lr_mla <= 0.0 || lr_adu <= 0.0) throw UsageError("learning rates must be positive");
  if (weight_decay < 0.0) throw UsageError("weight_decay must be nonnegative");
  if (epochs < 0) throw UsageError("epochs must be nonnegative");
  if (lambda < 0.0) throw UsageError("lambda must be nonnegative");
  if (xi <= 0.0) throw UsageError("xi must be positive");
  if (sigma <= 0.0) throw UsageError("sigma must be positive");
}

ModelParams init_params(const AmaGcnConfig& cfg, std::size_t in_dim, int num_classes,
                        std::uint64_t seed) {
  cfg.validate();
  if (num_classes < 2) throw DataError("need at least two classes");
  const int terms = cfg.cheb_order + 1;
  const std::size_t hidden = cfg.hidden_dim;
  const std::size_t classes = static_cast<std::size_t>(num_classes);
  const int layers = cfg.backbone_layers();

  ModelParams p;
  for (int i = 0; i < layers; ++i) {
    Rng rng = Rng::child(seed, "init-mla", static_cast<std::uint64_t>(i));
    const std::size_t in = i == 0 ? in_dim : hidden;
    std::size_t out = hidden;
    if (cfg.plain_backbone() && i == layers - 1) out = classes;
    p.gc.push_back(nn::glorot_graph_conv(in, out, terms, rng));
  }
  if (!cfg.plain_backbone()) {
    Rng rng = Rng::child(seed, "init-head");
    p.head = nn::glorot_dense(2 * hidden, classes, rng);
  }
  const std::size_t joint = cfg.plain_backbone() ? hidden : 2 * hidden;
  for (int i = 0; i < cfg.adu_layers; ++i) {
    Rng rng = Rng::child(seed, "init-adu", static_cast<std::uint64_t>(i));
    const std::size_t in = i == 0 ? joint : hidden;
    const std::size_t out = i == cfg.adu_layers - 1 ? classes : hidden;
    p.adu.push_back(nn::glorot_graph_conv(in, out, terms, rng));
  }
  return p;
}

ModelParams zero_grads_like(const ModelParams& p) {
  ModelParams z;
  for (const auto& l : p.gc) z.gc.push_back(nn::zeros_like(l));
  z.head = nn::zeros_like(p.head);
  for (const auto& l : p.adu) z.adu.push_back(nn::zeros_like(l));
  return z;
}

DropoutStreams DropoutStreams::make(std::uint64_t seed, const AmaGcnConfig& cfg) {
  DropoutStreams s;
  for (int i = 0; i < cfg.backbone_layers(); ++i)
    s.backbone.push_back(Rng::child(seed, "dropout-backbone", static_cast<std::uint64_t>(i)));
  for (int i = 0; i < cfg.adu_layers; ++i)
    s.adu.push_back(Rng::child(seed, "dropout-adu", static_cast<std::uint64_t>(i)));
  return s;
}

Matrix mla_forward(const Matrix& features, const spectral::ChebBasis& basis,
                   const ModelParams& params, const AmaGcnConfig& cfg, bool training,
                   DropoutStreams* streams, BackboneCache* cache) {
  const int layers = cfg.backbone_layers();
  if (static_cast<int>(params.gc.size()) != layers)
    throw DataError("parameter set does not match configured backbone depth");
  if (!cache) throw UsageError("mla_forward needs a cache");

  cache->layers.assign(static_cast<std::size_t>(layers), nn::LayerCache{});
  cache->hidden.clear();

  const Matrix* current = &features;
  for (int i = 0; i < layers; ++i) {
    nn::LayerCache& lc = cache->layers[static_cast<std::size_t>(i)];
    Rng* rng = streams ? &streams->backbone[static_cast<std::size_t>(i)] : nullptr;
    Matrix dropped = nn::dropout(*current, cfg.dropout, rng, training, &lc.drop_mask);
    const bool relu = !(cfg.plain_backbone() && i == layers - 1);
    cache->hidden.push_back(nn::cheb_conv_forward(dropped, basis, params.gc[static_cast<std::size_t>(i)],
                                                  relu, &lc));
    current = &cache->hidden.back();
  }

  if (cfg.plain_backbone()) {
    cache->h_final = cache->hidden[0];
    cache->probs = nn::softmax_rows(cache->hidden.back());
    return cache->probs;
  }

  const std::size_t mid = pool_mid(layers);
  std::vector<const Matrix*> win1, win2;
  for (std::size_t i = 0; i < mid; ++i) win1.push_back(&cache->hidden[i]);
  for (std::size_t i = mid - 1; i < cache->hidden.size(); ++i) win2.push_back(&cache->hidden[i]);
  const Matrix la1 = nn::maxpool_aggregate(win1, &cache->pool1_argmax);
  const Matrix la2 = nn::maxpool_aggregate(win2, &cache->pool2_argmax);
  cache->h_final = nn::concat_aggregate({&la1, &la2});
  const Matrix logits = nn::dense_forward(cache->h_final, params.head, &cache->head);
  cache->probs = nn::softmax_rows(logits);
  return cache->probs;
}

Matrix adu_forward(const Matrix& h_final, const spectral::ChebBasis& basis,
                   const ModelParams& params, const AmaGcnConfig& cfg, bool training,
                   DropoutStreams* streams, AduCache* cache) {
  if (static_cast<int>(params.adu.size()) != cfg.adu_layers)
    throw DataError("parameter set does not match configured auxiliary depth");
  if (!cache) throw UsageError("adu_forward needs a cache");

  cache->layers.assign(params.adu.size(), nn::LayerCache{});
  const Matrix* current = &h_final;
  Matrix out;
  for (std::size_t i = 0; i < params.adu.size(); ++i) {
    nn::LayerCache& lc = cache->layers[i];
    Rng* rng = streams ? &streams->adu[i] : nullptr;
    Matrix dropped = nn::dropout(*current, cfg.dropout, rng, training, &lc.drop_mask);
    const bool relu = i + 1 < params.adu.size();
    out = nn::cheb_conv_forward(dropped, basis, params.adu[i], relu, &lc);
    current = &out;
  }
  cache->probs = nn::softmax_rows(out);
  return cache->probs;
}

namespace {

nn::LossTerms forward_losses(const PopulationGraph& g, const spectral::ChebBasis& basis,
                             const ModelParams& params, const AmaGcnConfig& cfg, bool training,
                             DropoutStreams* streams, BackboneCache& bcache, AduCache& acache,
                             Matrix& one_hot_out, long* clamp_events) {
  const Matrix z = mla_forward(g.features, basis, params, cfg, training, streams, &bcache);
  one_hot_out = nn::one_hot(g.labels, g.num_classes);

  nn::LossTerms terms;
  terms.lambda = cfg.effective_lambda();
  terms.xi = cfg.xi;
  terms.sigma = cfg.sigma;
  terms.semi = nn::cross_entropy_masked(z, one_hot_out, g.train_mask, clamp_events);
  if (terms.lambda != 0.0) {
    const Matrix t = adu_forward(bcache.h_final, basis, params, cfg, training, streams, &acache);
    terms.sim = nn::similarity_loss(t, one_hot_out, g.train_mask, cfg.xi, cfg.sigma);
  }
  terms.total = nn::total_loss(terms.semi, terms.sim, terms.lambda);
  return terms;
}

}  // namespace

nn::LossTerms compute_loss(const PopulationGraph& g, const spectral::ChebBasis& basis,
                           const ModelParams& params, const AmaGcnConfig& cfg) {
  BackboneCache bcache;
  AduCache acache;
  Matrix y;
  return forward_losses(g, basis, params, cfg, false, nullptr, bcache, acache, y, nullptr);
}

nn::LossTerms compute_loss_and_grads(const PopulationGraph& g,
                                     const spectral::ChebBasis& basis,
                                     const ModelParams& params, const AmaGcnConfig& cfg,
                                     bool training, DropoutStreams* streams,
                                     ModelParams& grads, long* clamp_events) {
  BackboneCache bcache;
  AduCache acache;
  Matrix y;
  const nn::LossTerms terms =
      forward_losses(g, basis, params, cfg, training, streams, bcache, acache, y, clamp_events);

  const int layers = cfg.backbone_layers();
  const std::size_t n = g.size();
  const std::vector<char>& mask = g.train_mask;

  // Gradient reaching each backbone layer's post-activation output.
  std::vector<Matrix> grad_hidden;
  for (const Matrix& h : bcache.hidden) grad_hidden.emplace_back(h.rows, h.cols);

  // Auxiliary path: d total / d T for the tanh similarity loss, then back
  // through its softmax and conv stack to the joint representation.
  Matrix grad_joint(bcache.h_final.rows, bcache.h_final.cols);
  if (terms.lambda != 0.0) {
    const double coeff =
        terms.lambda * (1.0 - terms.sim * terms.sim) / (cfg.sigma * cfg.sigma);
    const Matrix grad_t = masked_diff(acache.probs, y, mask, coeff);
    Matrix gr = nn::softmax_backward(grad_t, acache.probs);
    for (std::size_t i = params.adu.size(); i-- > 0;) {
      const bool relu = i + 1 < params.adu.size();
      Matrix gin = nn::cheb_conv_backward(gr, basis, params.adu[i], acache.layers[i], relu,
                                          grads.adu[i], true);
      gr = nn::dropout_backward(gin, acache.layers[i].drop_mask);
    }
    grad_joint = gr;
  }

  if (cfg.plain_backbone()) {
    // Softmax feeds straight off the last conv's logits; fused gradient.
    const Matrix grad_logits = masked_diff(bcache.probs, y, mask, 1.0);
    Matrix gin = nn::cheb_conv_backward(grad_logits, basis, params.gc[1], bcache.layers[1],
                                        false, grads.gc[1], true);
    grad_hidden[0] = nn::dropout_backward(gin, bcache.layers[1].drop_mask);
    for (std::size_t i = 0; i < grad_joint.size(); ++i)
      grad_hidden[0].data[i] += grad_joint.data[i];
    nn::cheb_conv_backward(grad_hidden[0], basis, params.gc[0], bcache.layers[0], true,
                           grads.gc[0], false);
    return terms;
  }

  // Head path (fused softmax + cross entropy), then pool routing.
  const Matrix grad_logits = masked_diff(bcache.probs, y, mask, 1.0);
  Matrix grad_final = nn::dense_backward(grad_logits, params.head, bcache.head, grads.head, true);
  for (std::size_t i = 0; i < grad_final.size(); ++i)
    grad_final.data[i] += grad_joint.data[i];

  const std::size_t hidden = cfg.hidden_dim;
  const std::size_t mid = pool_mid(layers);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < hidden; ++c) {
      const std::size_t flat = r * hidden + c;
      const std::size_t l1 = bcache.pool1_argmax[flat];
      grad_hidden[l1](r, c) += grad_final(r, c);
      const std::size_t l2 = (mid - 1) + bcache.pool2_argmax[flat];
      grad_hidden[l2](r, c) += grad_final(r, c + hidden);
    }
  }

  for (int i = layers - 1; i >= 0; --i) {
    const std::size_t li = static_cast<std::size_t>(i);
    Matrix gin = nn::cheb_conv_backward(grad_hidden[li], basis, params.gc[li],
                                        bcache.layers[li], true, grads.gc[li], i > 0);
    if (i > 0) {
      Matrix gprev = nn::dropout_backward(gin, bcache.layers[li].drop_mask);
      for (std::size_t k = 0; k < gprev.size(); ++k)
        grad_hidden[li - 1].data[k] += gprev.data[k];
    }
  }
  return terms;
}

ParamRefs collect_backbone(ModelParams& p) {
  ParamRefs refs;
  for (std::size_t i = 0; i < p.gc.size(); ++i)
    append_layer(refs, p.gc[i], "gc" + std::to_string(i));
  if (!p.head.weights.empty()) append_layer(refs, p.head, "head");
  return refs;
}

ParamRefs collect_adu(ModelParams& p) {
  ParamRefs refs;
  for (std::size_t i = 0; i < p.adu.size(); ++i)
    append_layer(refs, p.adu[i], "adu" + std::to_string(i));
  return refs;
}

std::vector<const Matrix*> const_tensors(const ParamRefs& refs) {
  return std::vector<const Matrix*>(refs.tensors.begin(), refs.tensors.end());
}

TrainerState init_trainer(ModelParams& params, const AmaGcnConfig& cfg, std::uint64_t seed) {
  TrainerState state;
  ParamRefs backbone = collect_backbone(params);
  nn::adam_init(state.adam_mla, const_tensors(backbone), cfg.lr_mla, cfg.weight_decay);
  ParamRefs adu = collect_adu(params);
  nn::adam_init(state.adam_adu, const_tensors(adu), cfg.lr_adu, cfg.weight_decay);
  state.streams = DropoutStreams::make(seed, cfg);
  return state;
}

nn::LossTerms train_step(const PopulationGraph& g, const spectral::ChebBasis& basis,
                         ModelParams& params, TrainerState& state, const AmaGcnConfig& cfg,
                         long* clamp_events) {
  ModelParams grads = zero_grads_like(params);
  const nn::LossTerms terms = compute_loss_and_grads(g, basis, params, cfg, true,
                                                     &state.streams, grads, clamp_events);
  if (!std::isfinite(terms.total)) throw NumericError("non-finite training loss");

  ParamRefs bp = collect_backbone(params);
  ParamRefs bg = collect_backbone(grads);
  nn::adam_step(state.adam_mla, bp.tensors, const_tensors(bg), bp.decay, bp.names);

  if (cfg.effective_lambda() != 0.0) {
    ParamRefs ap = collect_adu(params);
    ParamRefs ag = collect_adu(grads);
    nn::adam_step(state.adam_adu, ap.tensors, const_tensors(ag), ap.decay, ap.names);
  }
  return terms;
}

Prediction predict(const PopulationGraph& g, const spectral::ChebBasis& basis,
                   const ModelParams& params, const AmaGcnConfig& cfg) {
  BackboneCache cache;
  Prediction out;
  out.probs = mla_forward(g.features, basis, params, cfg, false, nullptr, &cache);
  out.labels.resize(out.probs.rows);
  for (std::size_t i = 0; i < out.probs.rows; ++i) {
    const double* r = out.probs.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < out.probs.cols; ++j)
      if (r[j] > r[best]) best = j;
    out.labels[i] = static_cast<int>(best);
  }
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     std::uint64_t seed, const std::string& config_hash) {
  container::Container c;
  c.kind = "checkpoint";
  c.seed = seed;
  c.config_hash = config_hash;
  for_each_tensor(params, [&c](const std::string& name, const Matrix& m) {
    c.arrays.push_back({name, m});
  });
  container::save(path, c);
}

ModelParams load_checkpoint(const std::filesystem::path& path, std::uint64_t* seed,
                             std::string* config_hash) {
  const container::Container c = container::load(path);
  if (c.kind != "checkpoint")
    throw DataError("not a checkpoint container: " + path.string());
  if (seed) *seed = c.seed;
  if (config_hash) *config_hash = c.config_hash;

  ModelParams p;
  auto layer_at = [](std::vector<nn::LayerParams>& v, std::size_t i) -> nn::LayerParams& {
    if (v.size() <= i) v.resize(i + 1);
    return v[i];
  };
  for (const auto& arr : c.arrays) {
    const std::string& name = arr.name;
    const std::size_t dot = name.find('.');
    if (dot == std::string::npos) throw DataError("malformed tensor name: " + name);
    const std::string group = name.substr(0, dot);
    const std::string leaf = name.substr(dot + 1);

    nn::LayerParams* layer = nullptr;
    if (group == "head") {
      layer = &p.head;
    } else if (group.rfind("gc", 0) == 0) {
      layer = &layer_at(p.gc, std::stoul(group.substr(2)));
    } else if (group.rfind("adu", 0) == 0) {
      layer = &layer_at(p.adu, std::stoul(group.substr(3)));
    } else {
      throw DataError("unknown tensor group: " + name);
    }

    if (leaf == "b") {
      layer->bias = arr.data;
    } else if (leaf.rfind("W", 0) == 0) {
      const std::size_t k = std::stoul(leaf.substr(1));
      if (layer->weights.size() <= k) layer->weights.resize(k + 1);
      layer->weights[k] = arr.data;
    } else {
      throw DataError("unknown tensor leaf: " + name);
    }
  }
  return p;
}

}  // namespace amagcn::model
