#include "bmlr/encoder.hpp"

#include <cmath>
#include <stdexcept>

#include "bmlr/ops.hpp"

namespace bmlr {

namespace {

DenseMatrix xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    DenseMatrix w(rows, cols);
    for (double& v : w.data()) v = rng.uniform(-limit, limit);
    return w;
}

}  // namespace

EncoderParams init_encoder(std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                           Rng& rng) {
    if (input_dim == 0 || hidden_dims.empty()) {
        throw std::invalid_argument("init_encoder: need input dim and at least one layer");
    }
    EncoderParams params;
    std::size_t prev = input_dim;
    for (std::size_t width : hidden_dims) {
        if (width == 0) {
            throw std::invalid_argument("init_encoder: zero layer width");
        }
        params.layers.push_back({xavier_uniform(width, prev, rng), Vector(width, 0.0)});
        prev = width;
    }
    return params;
}

Vector encode(const Vector& x, const EncoderParams& params, EncoderCache* cache) {
    if (params.layers.empty()) {
        throw std::invalid_argument("encode: encoder has no layers");
    }
    if (x.size() != params.input_dim()) {
        throw std::invalid_argument("encode: input dim mismatch");
    }
    require_finite(x, "encode");
    if (cache) {
        cache->inputs.clear();
        cache->preacts.clear();
    }
    Vector h = x;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        Vector pre = affine_forward(h, params.layers[l].weight, params.layers[l].bias);
        if (cache) {
            cache->inputs.push_back(std::move(h));
            cache->preacts.push_back(pre);
        }
        const bool last = (l + 1 == params.layers.size());
        h = last ? std::move(pre) : relu_forward(pre);
    }
    return h;
}

EncoderGrads zero_encoder_grads(const EncoderParams& params) {
    EncoderGrads grads;
    grads.reserve(params.layers.size());
    for (const auto& layer : params.layers) {
        grads.push_back({DenseMatrix(layer.weight.rows(), layer.weight.cols()),
                         Vector(layer.bias.size(), 0.0)});
    }
    return grads;
}

void encoder_backward(const Vector& feature_grad, const EncoderParams& params,
                      const EncoderCache& cache, EncoderGrads& accum) {
    const std::size_t n_layers = params.layers.size();
    if (cache.inputs.size() != n_layers || cache.preacts.size() != n_layers) {
        throw std::invalid_argument("encoder_backward: cache does not match encoder layout");
    }
    if (accum.size() != n_layers) {
        throw std::invalid_argument("encoder_backward: gradient accumulator mismatch");
    }
    // No activation after the last layer, so the incoming gradient is the
    // last pre-activation gradient directly.
    Vector da = feature_grad;
    for (std::size_t l = n_layers; l-- > 0;) {
        AffineGrads g = affine_backward(da, cache.inputs[l], params.layers[l].weight);
        add_scaled(accum[l].bias, g.bias);
        for (std::size_t i = 0; i < g.weight.size(); ++i) {
            accum[l].weight.data()[i] += g.weight.data()[i];
        }
        if (l > 0) {
            da = relu_backward(g.input, cache.preacts[l - 1]);
        }
    }
}

}  // namespace bmlr
