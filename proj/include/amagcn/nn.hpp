#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amagcn/matrix.hpp"
#include "amagcn/rng.hpp"
#include "amagcn/spectral.hpp"

namespace amagcn::nn {

// Trainable tensors of one layer: K+1 weight matrices for a spectral graph
// convolution (one per Chebyshev term), a single matrix for a dense layer.
// Bias is kept as a 1 x out matrix so optimizer state handling is uniform.
struct LayerParams {
  std::vector<Matrix> weights;
  Matrix bias;
};

LayerParams zeros_like(const LayerParams& p);
void zero_grads(LayerParams& p);

LayerParams glorot_graph_conv(std::size_t in_dim, std::size_t out_dim, int terms, Rng& rng);
LayerParams glorot_dense(std::size_t in_dim, std::size_t out_dim, Rng& rng);

// Saved forward state a backward pass needs.
struct LayerCache {
  Matrix input;      // input actually consumed (after dropout)
  Matrix drop_mask;  // scaled keep mask; empty when dropout was not applied
  Matrix preact;     // pre-activation output; empty for linear layers
};

// H_out = sum_k T_k * H_in * W_k + bias, optional ReLU.
Matrix cheb_conv_forward(const Matrix& input, const spectral::ChebBasis& basis,
                         const LayerParams& params, bool relu, LayerCache* cache);

// Accumulates parameter gradients into `grad`; returns dL/d(input) when
// requested (empty matrix otherwise).
Matrix cheb_conv_backward(const Matrix& grad_output, const spectral::ChebBasis& basis,
                          const LayerParams& params, const LayerCache& cache, bool relu,
                          LayerParams& grad, bool want_input_grad);

Matrix dense_forward(const Matrix& input, const LayerParams& params, LayerCache* cache);
Matrix dense_backward(const Matrix& grad_output, const LayerParams& params,
                      const LayerCache& cache, LayerParams& grad, bool want_input_grad);

// Inverted dropout: zero with probability p, scale survivors by 1/(1-p).
// Identity when not training or p == 0.
Matrix dropout(const Matrix& input, double p, Rng* rng, bool training, Matrix* mask_out);
Matrix dropout_backward(const Matrix& grad, const Matrix& mask);

Matrix softmax_rows(const Matrix& logits);
// dL/dlogits given dL/dprobs for row-wise softmax.
Matrix softmax_backward(const Matrix& grad_probs, const Matrix& probs);

// Elementwise max across equally-shaped inputs. argmax (when given) records
// the winning input index per element; ties go to the earliest input.
Matrix maxpool_aggregate(const std::vector<const Matrix*>& inputs,
                         std::vector<std::uint8_t>* argmax);
Matrix concat_aggregate(const std::vector<const Matrix*>& inputs);

// Masked cross entropy, summed over labeled rows. Probabilities below 1e-12
// at the true class are clamped there (counted via clamp_events, warned once).
double cross_entropy_masked(const Matrix& probs, const Matrix& one_hot,
                            const std::vector<char>& mask, long* clamp_events = nullptr);

// tanh((sum of squared residuals over labeled rows + xi) / (2 sigma^2)).
double similarity_loss(const Matrix& probs, const Matrix& one_hot,
                       const std::vector<char>& mask, double xi, double sigma);

struct LossTerms {
  double semi = 0.0;
  double sim = 0.0;
  double total = 0.0;
  double lambda = 1.0;
  double xi = 1e-6;
  double sigma = 1.0;
};

double total_loss(double semi, double sim, double lambda);

struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

void adam_init(AdamState& state, const std::vector<const Matrix*>& params, double lr,
               double weight_decay);

// Standard bias-corrected Adam. L2 decay is added to the gradient of tensors
// flagged in apply_decay (weight matrices, not biases). Non-finite gradients
// raise NumericError naming the parameter.
void adam_step(AdamState& state, const std::vector<Matrix*>& params,
               const std::vector<const Matrix*>& grads, const std::vector<char>& apply_decay,
               const std::vector<std::string>& names);

Matrix one_hot(const std::vector<int>& labels, int num_classes);

}  // namespace amagcn::nn
