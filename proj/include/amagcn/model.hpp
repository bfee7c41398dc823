#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "amagcn/graph.hpp"
#include "amagcn/nn.hpp"
#include "amagcn/rng.hpp"
#include "amagcn/spectral.hpp"

namespace amagcn::model {

// Run variants. noP swaps the graph source (manual measure list, unit
// weights) and keeps the full model. noW keeps PSWE selection but drops the
// learned weights and the deep backbone. noA keeps the PSWE graph and drops
// the deep backbone. noS trains without the similarity channel.
enum class Ablation { full, noP, noW, noA, noS };

Ablation ablation_from_string(const std::string& s);
std::string to_string(Ablation a);

struct AmaGcnConfig {
  int mla_layers = 5;
  int adu_layers = 2;
  std::size_t hidden_dim = 16;
  int cheb_order = 3;
  double dropout = 0.3;
  double lr_mla = 0.005;
  double lr_adu = 0.05;
  double weight_decay = 0.0005;
  int epochs = 300;
  double lambda = 1.0;
  double xi = 1e-6;
  double sigma = 1.0;
  Ablation ablation = Ablation::full;

  // noW and noA train a plain two-layer GCN instead of the aggregation
  // backbone; the auxiliary channel then consumes the first hidden layer.
  bool plain_backbone() const {
    return ablation == Ablation::noW || ablation == Ablation::noA;
  }
  double effective_lambda() const { return ablation == Ablation::noS ? 0.0 : lambda; }
  int backbone_layers() const { return plain_backbone() ? 2 : mla_layers; }

  void validate() const;
};

// Backbone graph-conv stack, dense output head (absent for the plain
// backbone, where the last conv maps straight to class logits), and the
// auxiliary channel's conv stack.
struct ModelParams {
  std::vector<nn::LayerParams> gc;
  nn::LayerParams head;
  std::vector<nn::LayerParams> adu;
};

ModelParams init_params(const AmaGcnConfig& cfg, std::size_t in_dim, int num_classes,
                        std::uint64_t seed);
ModelParams zero_grads_like(const ModelParams& p);

// One independent stream per dropout site, split from the run seed by label.
// Skipping a site (ablation) therefore never shifts another site's draws.
struct DropoutStreams {
  std::vector<Rng> backbone;
  std::vector<Rng> adu;

  static DropoutStreams make(std::uint64_t seed, const AmaGcnConfig& cfg);
};

struct BackboneCache {
  std::vector<nn::LayerCache> layers;
  std::vector<Matrix> hidden;
  std::vector<std::uint8_t> pool1_argmax;
  std::vector<std::uint8_t> pool2_argmax;
  Matrix h_final;
  nn::LayerCache head;
  Matrix probs;
};

struct AduCache {
  std::vector<nn::LayerCache> layers;
  Matrix probs;
};

// Z = softmax over class logits; cache->h_final carries the representation
// the auxiliary channel consumes. streams may be null when not training.
Matrix mla_forward(const Matrix& features, const spectral::ChebBasis& basis,
                   const ModelParams& params, const AmaGcnConfig& cfg, bool training,
                   DropoutStreams* streams, BackboneCache* cache);

Matrix adu_forward(const Matrix& h_final, const spectral::ChebBasis& basis,
                   const ModelParams& params, const AmaGcnConfig& cfg, bool training,
                   DropoutStreams* streams, AduCache* cache);

// Forward-only loss evaluation (no dropout), used by finite-difference
// checks and epoch logging.
nn::LossTerms compute_loss(const PopulationGraph& g, const spectral::ChebBasis& basis,
                           const ModelParams& params, const AmaGcnConfig& cfg);

// Full forward and reverse pass; accumulates into grads (caller zeroes).
nn::LossTerms compute_loss_and_grads(const PopulationGraph& g,
                                     const spectral::ChebBasis& basis,
                                     const ModelParams& params, const AmaGcnConfig& cfg,
                                     bool training, DropoutStreams* streams,
                                     ModelParams& grads, long* clamp_events = nullptr);

// Flat view over a parameter set for the optimizer: tensor pointers, decay
// eligibility (weight matrices yes, biases no), and stable names.
struct ParamRefs {
  std::vector<Matrix*> tensors;
  std::vector<char> decay;
  std::vector<std::string> names;
};

ParamRefs collect_backbone(ModelParams& p);
ParamRefs collect_adu(ModelParams& p);
std::vector<const Matrix*> const_tensors(const ParamRefs& refs);

struct TrainerState {
  nn::AdamState adam_mla;
  nn::AdamState adam_adu;
  DropoutStreams streams;
};

TrainerState init_trainer(ModelParams& params, const AmaGcnConfig& cfg, std::uint64_t seed);

// One epoch of full-graph training: forward, backward, one Adam step per
// parameter group. The auxiliary group is skipped entirely at lambda = 0.
nn::LossTerms train_step(const PopulationGraph& g, const spectral::ChebBasis& basis,
                         ModelParams& params, TrainerState& state, const AmaGcnConfig& cfg,
                         long* clamp_events = nullptr);

struct Prediction {
  std::vector<int> labels;
  Matrix probs;
};

// Evaluation-mode forward plus row argmax; ties resolve to the lowest index.
Prediction predict(const PopulationGraph& g, const spectral::ChebBasis& basis,
                   const ModelParams& params, const AmaGcnConfig& cfg);

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     std::uint64_t seed, const std::string& config_hash);
ModelParams load_checkpoint(const std::filesystem::path& path, std::uint64_t* seed = nullptr,
                            std::string* config_hash = nullptr);

}  // namespace amagcn::model
