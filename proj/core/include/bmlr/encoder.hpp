#pragma once

#include <vector>

#include "bmlr/dense_matrix.hpp"
#include "bmlr/rng.hpp"

namespace bmlr {

struct AffineLayer {
    DenseMatrix weight;
    Vector bias;
};

/// Per-modality MLP encoder: affine layers with ReLU between them and no
/// activation after the last layer.
struct EncoderParams {
    std::vector<AffineLayer> layers;

    std::size_t input_dim() const { return layers.front().weight.cols(); }
    std::size_t output_dim() const { return layers.back().weight.rows(); }
};

struct EncoderCache {
    std::vector<Vector> inputs;   // input to each affine layer (inputs[0] = x)
    std::vector<Vector> preacts;  // W x + b per layer
};

using EncoderGrads = std::vector<AffineLayer>;

/// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
EncoderParams init_encoder(std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                           Rng& rng);

Vector encode(const Vector& x, const EncoderParams& params, EncoderCache* cache = nullptr);

EncoderGrads zero_encoder_grads(const EncoderParams& params);

/// Backprop d(loss)/d(feature) through the cached forward, accumulating
/// layer gradients into `accum`.
void encoder_backward(const Vector& feature_grad, const EncoderParams& params,
                      const EncoderCache& cache, EncoderGrads& accum);

}  // namespace bmlr
