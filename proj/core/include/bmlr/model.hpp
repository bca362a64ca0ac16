#pragma once

#include <vector>

#include "bmlr/encoder.hpp"
#include "bmlr/fusion.hpp"
#include "bmlr/label_distribution.hpp"

namespace bmlr {

struct ModelConfig {
    std::size_t classes = 0;
    std::vector<std::size_t> input_dims;           // per modality
    std::vector<std::size_t> hidden_dims = {64, 32};  // last entry = feature dim
    FusionKind fusion = FusionKind::Concat;

    std::size_t modalities() const { return input_dims.size(); }
};

struct ModelParams {
    ModelConfig config;
    std::vector<EncoderParams> encoders;
    DecisionParams decision;
};

ModelParams init_model(const ModelConfig& config, Rng& rng);

struct SampleTrace {
    std::vector<Vector> features;  // z^u
    std::vector<EncoderCache> encoder_caches;
    std::vector<Vector> unimodal_logits;
    std::vector<LabelDistribution> unimodal_probs;
    Vector fused_logits;
    LabelDistribution fused_probs;
    FusionCache fusion;
};

struct ForwardTrace {
    std::vector<SampleTrace> samples;
    std::size_t batch_size() const { return samples.size(); }
};

/// One input vector per modality per sample.
using BatchInputs = std::vector<std::vector<Vector>>;

ForwardTrace forward(const BatchInputs& batch, const ModelParams& params);

struct ModelGradients {
    std::vector<EncoderGrads> encoders;
    DecisionGrads decision;
};

ModelGradients zero_gradients(const ModelParams& params);

/// Per-sample upstream gradients on the logit heads. An empty outer vector
/// disables that head entirely.
struct HeadUpstream {
    std::vector<Vector> fused;                   // [sample]
    std::vector<std::vector<Vector>> unimodal;   // [modality][sample]
};

/// Which loss head feeds which parameter group. Groups excluded here come
/// back as exact zeros, not merely small values.
struct RoutingMask {
    bool unimodal_to_encoder = true;
    bool unimodal_to_decision = true;
    bool multimodal_to_encoder = true;
    bool multimodal_to_decision = true;

    static RoutingMask full() { return {true, true, true, true}; }
    /// Targeted parameter optimization: each encoder trains only on its
    /// modality loss, the decision layer only on the multimodal loss.
    static RoutingMask targeted() { return {true, false, false, true}; }
};

ModelGradients backward(const ForwardTrace& trace, const ModelParams& params,
                        const HeadUpstream& upstream, const RoutingMask& mask);

// ---- Parameter groups -------------------------------------------------
//
// Group u in [0, M) is theta^u: the modality-u encoder plus, for film/gated
// fusion, its probe head. Group M is the decision layer Theta.

struct BlockRef {
    double* data;
    std::size_t size;
};

std::size_t num_groups(const ModelParams& params);
std::vector<BlockRef> parameter_group_blocks(ModelParams& params, std::size_t group);
std::vector<BlockRef> gradient_group_blocks(const ModelParams& params, ModelGradients& grads,
                                            std::size_t group);
std::size_t group_dim(const ModelParams& params, std::size_t group);

/// Copy a group's blocks into / out of one flat vector (block order matches
/// parameter_group_blocks).
Vector flatten_group(const ModelParams& params, std::size_t group);
Vector flatten_gradient_group(const ModelParams& params, const ModelGradients& grads,
                              std::size_t group);

}  // namespace bmlr
