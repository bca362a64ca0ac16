#include "bmlr/model.hpp"

#include <stdexcept>
#include <string>

#include "bmlr/ops.hpp"

namespace bmlr {

ModelParams init_model(const ModelConfig& config, Rng& rng) {
    if (config.classes < 2) {
        throw std::invalid_argument("init_model: need at least two classes");
    }
    if (config.input_dims.size() < 2) {
        throw std::invalid_argument("init_model: need at least two modalities");
    }
    if (config.hidden_dims.empty()) {
        throw std::invalid_argument("init_model: encoder needs at least one layer");
    }
    ModelParams params;
    params.config = config;
    for (std::size_t u = 0; u < config.input_dims.size(); ++u) {
        params.encoders.push_back(init_encoder(config.input_dims[u], config.hidden_dims, rng));
    }
    std::vector<std::size_t> feature_dims(config.input_dims.size(), config.hidden_dims.back());
    params.decision = init_decision(config.fusion, config.classes, feature_dims, rng);
    return params;
}

ForwardTrace forward(const BatchInputs& batch, const ModelParams& params) {
    if (batch.empty()) {
        throw std::invalid_argument("forward: empty batch");
    }
    const std::size_t m = params.config.modalities();
    ForwardTrace trace;
    trace.samples.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch[i].size() != m) {
            throw std::invalid_argument("forward: sample " + std::to_string(i) + " has " +
                                        std::to_string(batch[i].size()) + " modalities, expected " +
                                        std::to_string(m));
        }
        SampleTrace s;
        s.encoder_caches.resize(m);
        for (std::size_t u = 0; u < m; ++u) {
            s.features.push_back(encode(batch[i][u], params.encoders[u], &s.encoder_caches[u]));
            s.unimodal_logits.push_back(unimodal_logits(s.features[u], params.decision, u));
            s.unimodal_probs.push_back(softmax(s.unimodal_logits[u]));
        }
        s.fused_logits = fuse(s.features, params.decision, &s.fusion);
        s.fused_probs = softmax(s.fused_logits);
        trace.samples.push_back(std::move(s));
    }
    return trace;
}

ModelGradients zero_gradients(const ModelParams& params) {
    ModelGradients g;
    for (const auto& enc : params.encoders) g.encoders.push_back(zero_encoder_grads(enc));
    g.decision = zero_decision_grads(params.decision);
    return g;
}

ModelGradients backward(const ForwardTrace& trace, const ModelParams& params,
                        const HeadUpstream& upstream, const RoutingMask& mask) {
    const std::size_t m = params.config.modalities();
    const std::size_t n = trace.batch_size();
    if (!upstream.fused.empty() && upstream.fused.size() != n) {
        throw std::invalid_argument("backward: fused upstream size mismatch");
    }
    if (!upstream.unimodal.empty() && upstream.unimodal.size() != m) {
        throw std::invalid_argument("backward: unimodal upstream modality count mismatch");
    }
    for (const auto& per_mod : upstream.unimodal) {
        if (!per_mod.empty() && per_mod.size() != n) {
            throw std::invalid_argument("backward: unimodal upstream size mismatch");
        }
    }

    ModelGradients grads = zero_gradients(params);
    const bool probes = params.decision.has_probes();

    for (std::size_t i = 0; i < n; ++i) {
        const SampleTrace& s = trace.samples[i];
        if (s.encoder_caches.size() != m || s.features.size() != m) {
            throw std::invalid_argument("backward: trace cache missing for sample " +
                                        std::to_string(i));
        }
        // d(loss)/d(z^u) accumulated across heads, fed through each encoder
        // once per sample.
        std::vector<Vector> feature_grads(m);
        for (std::size_t u = 0; u < m; ++u) {
            feature_grads[u] = Vector(s.features[u].size(), 0.0);
        }
        bool any_encoder_grad = false;

        // Unimodal heads. For concat/sum the head parameters are the
        // decision blocks (routed by unimodal_to_decision); for film/gated
        // they are the probes, which belong to theta^u.
        if (!upstream.unimodal.empty()) {
            for (std::size_t u = 0; u < m; ++u) {
                if (upstream.unimodal[u].empty()) continue;
                const Vector& up = upstream.unimodal[u][i];
                const bool head_params_routed =
                    probes ? mask.unimodal_to_encoder : mask.unimodal_to_decision;
                Vector dz = unimodal_backward(up, s.features[u], params.decision, u,
                                              head_params_routed ? &grads.decision : nullptr);
                if (mask.unimodal_to_encoder) {
                    add_scaled(feature_grads[u], dz);
                    any_encoder_grad = true;
                }
            }
        }

        // Multimodal head.
        if (!upstream.fused.empty()) {
            std::vector<Vector> dz = fuse_backward(
                upstream.fused[i], s.features, params.decision, s.fusion,
                mask.multimodal_to_decision ? &grads.decision : nullptr);
            if (mask.multimodal_to_encoder) {
                for (std::size_t u = 0; u < m; ++u) add_scaled(feature_grads[u], dz[u]);
                any_encoder_grad = true;
            }
        }

        if (any_encoder_grad) {
            for (std::size_t u = 0; u < m; ++u) {
                encoder_backward(feature_grads[u], params.encoders[u], s.encoder_caches[u],
                                 grads.encoders[u]);
            }
        }
    }
    return grads;
}

std::size_t num_groups(const ModelParams& params) { return params.config.modalities() + 1; }

std::vector<BlockRef> parameter_group_blocks(ModelParams& params, std::size_t group) {
    const std::size_t m = params.config.modalities();
    std::vector<BlockRef> blocks;
    auto push_mat = [&blocks](DenseMatrix& mat) {
        blocks.push_back({mat.data().data(), mat.size()});
    };
    auto push_vec = [&blocks](Vector& vec) { blocks.push_back({vec.data(), vec.size()}); };

    if (group < m) {
        for (auto& layer : params.encoders[group].layers) {
            push_mat(layer.weight);
            push_vec(layer.bias);
        }
        if (params.decision.has_probes()) {
            push_mat(params.decision.probe_w[group]);
            push_vec(params.decision.probe_b[group]);
        }
        return blocks;
    }
    if (group != m) {
        throw std::invalid_argument("parameter group out of range: " + std::to_string(group));
    }
    switch (params.decision.kind) {
        case FusionKind::Concat:
        case FusionKind::Sum:
            for (auto& b : params.decision.blocks) push_mat(b);
            push_vec(params.decision.bias);
            break;
        case FusionKind::Film:
            push_mat(params.decision.classifier);
            push_vec(params.decision.bias);
            push_mat(params.decision.film_gamma_w);
            push_vec(params.decision.film_gamma_b);
            push_mat(params.decision.film_shift_w);
            push_vec(params.decision.film_shift_b);
            break;
        case FusionKind::Gated:
            push_mat(params.decision.classifier);
            push_vec(params.decision.bias);
            push_mat(params.decision.gate_weight);
            push_vec(params.decision.gate_bias);
            break;
    }
    return blocks;
}

std::vector<BlockRef> gradient_group_blocks(const ModelParams& params, ModelGradients& grads,
                                            std::size_t group) {
    const std::size_t m = params.config.modalities();
    std::vector<BlockRef> blocks;
    auto push_mat = [&blocks](DenseMatrix& mat) {
        blocks.push_back({mat.data().data(), mat.size()});
    };
    auto push_vec = [&blocks](Vector& vec) { blocks.push_back({vec.data(), vec.size()}); };

    if (group < m) {
        for (auto& layer : grads.encoders[group]) {
            push_mat(layer.weight);
            push_vec(layer.bias);
        }
        if (params.decision.has_probes()) {
            push_mat(grads.decision.probe_w[group]);
            push_vec(grads.decision.probe_b[group]);
        }
        return blocks;
    }
    if (group != m) {
        throw std::invalid_argument("gradient group out of range: " + std::to_string(group));
    }
    switch (params.decision.kind) {
        case FusionKind::Concat:
        case FusionKind::Sum:
            for (auto& b : grads.decision.blocks) push_mat(b);
            push_vec(grads.decision.bias);
            break;
        case FusionKind::Film:
            push_mat(grads.decision.classifier);
            push_vec(grads.decision.bias);
            push_mat(grads.decision.film_gamma_w);
            push_vec(grads.decision.film_gamma_b);
            push_mat(grads.decision.film_shift_w);
            push_vec(grads.decision.film_shift_b);
            break;
        case FusionKind::Gated:
            push_mat(grads.decision.classifier);
            push_vec(grads.decision.bias);
            push_mat(grads.decision.gate_weight);
            push_vec(grads.decision.gate_bias);
            break;
    }
    return blocks;
}

std::size_t group_dim(const ModelParams& params, std::size_t group) {
    auto& mutable_params = const_cast<ModelParams&>(params);
    std::size_t total = 0;
    for (const auto& b : parameter_group_blocks(mutable_params, group)) total += b.size;
    return total;
}

Vector flatten_group(const ModelParams& params, std::size_t group) {
    auto& mutable_params = const_cast<ModelParams&>(params);
    Vector flat;
    for (const auto& b : parameter_group_blocks(mutable_params, group)) {
        flat.insert(flat.end(), b.data, b.data + b.size);
    }
    return flat;
}

Vector flatten_gradient_group(const ModelParams& params, const ModelGradients& grads,
                              std::size_t group) {
    auto& mutable_grads = const_cast<ModelGradients&>(grads);
    Vector flat;
    for (const auto& b : gradient_group_blocks(params, mutable_grads, group)) {
        flat.insert(flat.end(), b.data, b.data + b.size);
    }
    return flat;
}

}  // namespace bmlr
