#include "amagcn/nn.hpp"

#include <cmath>
#include <iostream>

#include "amagcn/errors.hpp"
#include "amagcn/kernels.hpp"

namespace amagcn::nn {

namespace {

void add_inplace(Matrix& dst, const Matrix& src) {
  check_shape(dst, src, "add");
  for (std::size_t i = 0; i < dst.size(); ++i) dst.data[i] += src.data[i];
}

void add_bias_rows(Matrix& m, const Matrix& bias) {
  if (bias.rows != 1 || bias.cols != m.cols) throw DataError("bias shape mismatch");
  for (std::size_t i = 0; i < m.rows; ++i) {
    double* r = m.row(i);
    for (std::size_t j = 0; j < m.cols; ++j) r[j] += bias.data[j];
  }
}

Matrix column_sums(const Matrix& m) {
  Matrix s(1, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* r = m.row(i);
    for (std::size_t j = 0; j < m.cols; ++j) s.data[j] += r[j];
  }
  return s;
}

Matrix glorot(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  Matrix w(in_dim, out_dim);
  for (double& v : w.data) v = rng.uniform(-limit, limit);
  return w;
}

// ReLU mask applied to grad_output; returns the gradient at the
// pre-activation. Derivative at exactly zero is taken as zero.
Matrix apply_relu_mask(const Matrix& grad_output, const Matrix& preact) {
  Matrix g = grad_output;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (preact.data[i] <= 0.0) g.data[i] = 0.0;
  return g;
}

}  // namespace

LayerParams zeros_like(const LayerParams& p) {
  LayerParams z;
  z.weights.reserve(p.weights.size());
  for (const Matrix& w : p.weights) z.weights.emplace_back(w.rows, w.cols);
  z.bias = Matrix(p.bias.rows, p.bias.cols);
  return z;
}

void zero_grads(LayerParams& p) {
  for (Matrix& w : p.weights) w.fill(0.0);
  p.bias.fill(0.0);
}

LayerParams glorot_graph_conv(std::size_t in_dim, std::size_t out_dim, int terms, Rng& rng) {
  LayerParams p;
  for (int k = 0; k < terms; ++k) p.weights.push_back(glorot(in_dim, out_dim, rng));
  p.bias = Matrix(1, out_dim);
  return p;
}

LayerParams glorot_dense(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
  LayerParams p;
  p.weights.push_back(glorot(in_dim, out_dim, rng));
  p.bias = Matrix(1, out_dim);
  return p;
}

Matrix cheb_conv_forward(const Matrix& input, const spectral::ChebBasis& basis,
                         const LayerParams& params, bool relu, LayerCache* cache) {
  if (params.weights.size() != basis.terms.size())
    throw DataError("graph conv term count does not match basis order");
  if (input.cols != params.weights[0].rows)
    throw DataError("graph conv input width mismatch");

  Matrix out = kernels::matmul(kernels::matmul(basis.terms[0], input), params.weights[0]);
  for (std::size_t k = 1; k < basis.terms.size(); ++k) {
    add_inplace(out, kernels::matmul(kernels::matmul(basis.terms[k], input),
                                     params.weights[k]));
  }
  add_bias_rows(out, params.bias);

  if (cache) cache->input = input;
  if (relu) {
    if (cache) cache->preact = out;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  } else if (cache) {
    cache->preact = Matrix();
  }
  return out;
}

Matrix cheb_conv_backward(const Matrix& grad_output, const spectral::ChebBasis& basis,
                          const LayerParams& params, const LayerCache& cache, bool relu,
                          LayerParams& grad, bool want_input_grad) {
  if (cache.input.size() == 0) throw NumericError("backward before forward");
  const Matrix g = relu ? apply_relu_mask(grad_output, cache.preact) : grad_output;

  add_inplace(grad.bias, column_sums(g));
  Matrix grad_input;
  if (want_input_grad) grad_input = Matrix(cache.input.rows, cache.input.cols);
  for (std::size_t k = 0; k < basis.terms.size(); ++k) {
    const Matrix q = kernels::matmul_tn(basis.terms[k], g);  // T_k^T * g
    add_inplace(grad.weights[k], kernels::matmul_tn(cache.input, q));
    if (want_input_grad) add_inplace(grad_input, kernels::matmul_nt(q, params.weights[k]));
  }
  return grad_input;
}

Matrix dense_forward(const Matrix& input, const LayerParams& params, LayerCache* cache) {
  if (params.weights.size() != 1) throw DataError("dense layer expects one weight matrix");
  Matrix out = kernels::matmul(input, params.weights[0]);
  add_bias_rows(out, params.bias);
  if (cache) {
    cache->input = input;
    cache->preact = Matrix();
  }
  return out;
}

Matrix dense_backward(const Matrix& grad_output, const LayerParams& params,
                      const LayerCache& cache, LayerParams& grad, bool want_input_grad) {
  if (cache.input.size() == 0) throw NumericError("backward before forward");
  add_inplace(grad.bias, column_sums(grad_output));
  add_inplace(grad.weights[0], kernels::matmul_tn(cache.input, grad_output));
  if (!want_input_grad) return {};
  return kernels::matmul_nt(grad_output, params.weights[0]);
}

Matrix dropout(const Matrix& input, double p, Rng* rng, bool training, Matrix* mask_out) {
  if (p < 0.0 || p >= 1.0) throw UsageError("dropout probability must be in [0, 1)");
  if (!training || p == 0.0) {
    if (mask_out) *mask_out = Matrix();
    return input;
  }
  if (!rng) throw UsageError("training-mode dropout needs a random stream");
  const double scale = 1.0 / (1.0 - p);
  Matrix mask(input.rows, input.cols);
  Matrix out(input.rows, input.cols);
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double keep = rng->uniform() >= p ? scale : 0.0;
    mask.data[i] = keep;
    out.data[i] = input.data[i] * keep;
  }
  if (mask_out) *mask_out = std::move(mask);
  return out;
}

Matrix dropout_backward(const Matrix& grad, const Matrix& mask) {
  if (mask.size() == 0) return grad;  // dropout was identity
  Matrix g = grad;
  for (std::size_t i = 0; i < g.size(); ++i) g.data[i] *= mask.data[i];
  return g;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p(logits.rows, logits.cols);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const double* l = logits.row(i);
    double* o = p.row(i);
    double mx = l[0];
    for (std::size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, l[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.cols; ++j) {
      o[j] = std::exp(l[j] - mx);
      sum += o[j];
    }
    for (std::size_t j = 0; j < logits.cols; ++j) o[j] /= sum;
  }
  return p;
}

Matrix softmax_backward(const Matrix& grad_probs, const Matrix& probs) {
  check_shape(grad_probs, probs, "softmax_backward");
  Matrix g(probs.rows, probs.cols);
  for (std::size_t i = 0; i < probs.rows; ++i) {
    const double* gp = grad_probs.row(i);
    const double* pr = probs.row(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < probs.cols; ++j) dot += gp[j] * pr[j];
    double* o = g.row(i);
    for (std::size_t j = 0; j < probs.cols; ++j) o[j] = pr[j] * (gp[j] - dot);
  }
  return g;
}

Matrix maxpool_aggregate(const std::vector<const Matrix*>& inputs,
                         std::vector<std::uint8_t>* argmax) {
  if (inputs.empty()) throw DataError("maxpool over an empty list");
  Matrix out = *inputs[0];
  for (const Matrix* m : inputs) check_shape(out, *m, "maxpool");
  if (argmax) argmax->assign(out.size(), 0);
  for (std::size_t idx = 1; idx < inputs.size(); ++idx) {
    const Matrix& m = *inputs[idx];
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (m.data[i] > out.data[i]) {
        out.data[i] = m.data[i];
        if (argmax) (*argmax)[i] = static_cast<std::uint8_t>(idx);
      }
    }
  }
  return out;
}

Matrix concat_aggregate(const std::vector<const Matrix*>& inputs) {
  if (inputs.empty()) throw DataError("concat over an empty list");
  const std::size_t rows = inputs[0]->rows;
  std::size_t cols = 0;
  for (const Matrix* m : inputs) {
    if (m->rows != rows) throw DataError("concat row count mismatch");
    cols += m->cols;
  }
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double* o = out.row(i);
    for (const Matrix* m : inputs) {
      const double* r = m->row(i);
      for (std::size_t j = 0; j < m->cols; ++j) *o++ = r[j];
    }
  }
  return out;
}

double cross_entropy_masked(const Matrix& probs, const Matrix& one_hot,
                            const std::vector<char>& mask, long* clamp_events) {
  check_shape(probs, one_hot, "cross_entropy");
  if (mask.size() != probs.rows) throw DataError("mask length mismatch");
  double loss = 0.0;
  long clamped = 0;
  for (std::size_t i = 0; i < probs.rows; ++i) {
    if (!mask[i]) continue;
    const double* p = probs.row(i);
    const double* y = one_hot.row(i);
    for (std::size_t j = 0; j < probs.cols; ++j) {
      if (y[j] == 0.0) continue;
      double v = p[j];
      if (v < 1e-12) {
        v = 1e-12;
        ++clamped;
      }
      loss -= y[j] * std::log(v);
    }
  }
  if (clamped > 0)
    std::cerr << "warning: cross-entropy clamped " << clamped
              << " vanishing probabilities at 1e-12\n";
  if (clamp_events) *clamp_events += clamped;
  return loss;
}

double similarity_loss(const Matrix& probs, const Matrix& one_hot,
                       const std::vector<char>& mask, double xi, double sigma) {
  check_shape(probs, one_hot, "similarity_loss");
  if (mask.size() != probs.rows) throw DataError("mask length mismatch");
  double sse = 0.0;
  for (std::size_t i = 0; i < probs.rows; ++i) {
    if (!mask[i]) continue;
    const double* p = probs.row(i);
    const double* y = one_hot.row(i);
    for (std::size_t j = 0; j < probs.cols; ++j) {
      const double d = y[j] - p[j];
      sse += d * d;
    }
  }
  return std::tanh((sse + xi) / (2.0 * sigma * sigma));
}

double total_loss(double semi, double sim, double lambda) {
  if (lambda < 0.0) throw UsageError("loss tradeoff lambda must be nonnegative");
  return semi + lambda * sim;
}

void adam_init(AdamState& state, const std::vector<const Matrix*>& params, double lr,
               double weight_decay) {
  state.first_moment.clear();
  state.second_moment.clear();
  for (const Matrix* p : params) {
    state.first_moment.emplace_back(p->rows, p->cols);
    state.second_moment.emplace_back(p->rows, p->cols);
  }
  state.step = 0;
  state.lr = lr;
  state.weight_decay = weight_decay;
}

void adam_step(AdamState& state, const std::vector<Matrix*>& params,
               const std::vector<const Matrix*>& grads, const std::vector<char>& apply_decay,
               const std::vector<std::string>& names) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size())
    throw UsageError("adam state does not match parameter list");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t t = 0; t < params.size(); ++t) {
    Matrix& p = *params[t];
    const Matrix& g_raw = *grads[t];
    Matrix& m = state.first_moment[t];
    Matrix& v = state.second_moment[t];
    check_shape(p, g_raw, "adam_step");
    const double wd = apply_decay[t] ? state.weight_decay : 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = g_raw.data[i] + wd * p.data[i];
      if (!std::isfinite(g))
        throw NumericError("non-finite gradient for parameter " +
                           (t < names.size() ? names[t] : std::to_string(t)));
      m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * g;
      v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * g * g;
      const double m_hat = m.data[i] / bc1;
      const double v_hat = v.data[i] / bc2;
      p.data[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

Matrix one_hot(const std::vector<int>& labels, int num_classes) {
  Matrix y(labels.size(), static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw DataError("label out of range at row " + std::to_string(i));
    y(i, static_cast<std::size_t>(labels[i])) = 1.0;
  }
  return y;
}

}  // namespace amagcn::nn
