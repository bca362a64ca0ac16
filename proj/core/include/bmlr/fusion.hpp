#pragma once

#include <string>
#include <vector>

#include "bmlr/dense_matrix.hpp"
#include "bmlr/rng.hpp"

namespace bmlr {

enum class FusionKind { Concat, Sum, Film, Gated };

FusionKind fusion_from_string(const std::string& name);
std::string to_string(FusionKind kind);

/// Decision layer: the fused classifier plus fusion-specific parameters.
///
/// concat: logits = sum_u blocks[u] z^u + bias        (blocks[u] is C x d_u)
/// sum:    logits = blocks[0] (sum_u z^u) + bias      (one shared block)
/// film:   logits = classifier (gamma(z^0) .* z^1 + shift(z^0)) + bias
/// gated:  logits = classifier (g .* z^0 + (1-g) .* z^1) + bias,
///         g = sigmoid(gate_weight [z^0; z^1] + gate_bias)
///
/// For film/gated the unimodal probe heads live here structurally but are
/// routed with the modality encoders, not with the decision layer.
struct DecisionParams {
    FusionKind kind = FusionKind::Concat;
    std::size_t modalities = 0;
    std::size_t classes = 0;

    std::vector<DenseMatrix> blocks;  // concat: per modality; sum: single shared
    Vector bias;

    DenseMatrix classifier;  // film/gated fused classifier
    DenseMatrix film_gamma_w;
    Vector film_gamma_b;
    DenseMatrix film_shift_w;
    Vector film_shift_b;
    DenseMatrix gate_weight;
    Vector gate_bias;

    std::vector<DenseMatrix> probe_w;  // film/gated unimodal probes
    std::vector<Vector> probe_b;

    bool has_probes() const { return kind == FusionKind::Film || kind == FusionKind::Gated; }
};

struct DecisionGrads {
    std::vector<DenseMatrix> blocks;
    Vector bias;
    DenseMatrix classifier;
    DenseMatrix film_gamma_w;
    Vector film_gamma_b;
    DenseMatrix film_shift_w;
    Vector film_shift_b;
    DenseMatrix gate_weight;
    Vector gate_bias;
    std::vector<DenseMatrix> probe_w;
    std::vector<Vector> probe_b;
};

struct FusionCache {
    Vector gamma, shift, modulated;  // film
    Vector gate_pre, gate;           // gated (modulated reused)
};

/// Sum/film/gated require equal feature dims; film/gated require exactly two
/// modalities. Violations are rejected here, at construction.
DecisionParams init_decision(FusionKind kind, std::size_t classes,
                             const std::vector<std::size_t>& feature_dims, Rng& rng);

DecisionGrads zero_decision_grads(const DecisionParams& params);

/// Eq-style unimodal logits: concat/sum use the classifier block with a
/// bias split of b/M; film/gated use the modality's probe head.
Vector unimodal_logits(const Vector& feature, const DecisionParams& params, std::size_t modality);

Vector fuse(const std::vector<Vector>& features, const DecisionParams& params,
            FusionCache* cache = nullptr);

/// Backprop of the fused-logit gradient. Accumulates decision-parameter
/// gradients into `accum` (unless decision routing is masked off) and
/// returns d(loss)/d(z^u) per modality (used only when encoder routing is
/// on).
std::vector<Vector> fuse_backward(const Vector& upstream, const std::vector<Vector>& features,
                                  const DecisionParams& params, const FusionCache& cache,
                                  DecisionGrads* accum);

/// Backprop of a unimodal-logit gradient: optionally accumulates the probe
/// or classifier-block gradient, and returns d(loss)/d(z^u).
Vector unimodal_backward(const Vector& upstream, const Vector& feature,
                         const DecisionParams& params, std::size_t modality,
                         DecisionGrads* decision_accum);

Vector sigmoid(const Vector& x);

}  // namespace bmlr
