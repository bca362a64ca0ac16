#include "bmlr/fusion.hpp"

#include <algorithm>
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

DenseMatrix zeros_like(const DenseMatrix& m) { return DenseMatrix(m.rows(), m.cols()); }

void add_into(DenseMatrix& dst, const DenseMatrix& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst.data()[i] += src.data()[i];
}

}  // namespace

FusionKind fusion_from_string(const std::string& name) {
    if (name == "concat") return FusionKind::Concat;
    if (name == "sum") return FusionKind::Sum;
    if (name == "film") return FusionKind::Film;
    if (name == "gated") return FusionKind::Gated;
    throw std::invalid_argument("unknown fusion kind '" + name + "'");
}

std::string to_string(FusionKind kind) {
    switch (kind) {
        case FusionKind::Concat: return "concat";
        case FusionKind::Sum: return "sum";
        case FusionKind::Film: return "film";
        case FusionKind::Gated: return "gated";
    }
    return "?";
}

DecisionParams init_decision(FusionKind kind, std::size_t classes,
                             const std::vector<std::size_t>& feature_dims, Rng& rng) {
    if (classes < 2 || feature_dims.size() < 2) {
        throw std::invalid_argument("init_decision: need >= 2 classes and >= 2 modalities");
    }
    const std::size_t m = feature_dims.size();
    const bool equal_dims =
        std::all_of(feature_dims.begin(), feature_dims.end(),
                    [&](std::size_t d) { return d == feature_dims[0]; });
    if (kind != FusionKind::Concat && !equal_dims) {
        throw std::invalid_argument("init_decision: " + to_string(kind) +
                                    " fusion requires equal feature dims");
    }
    if ((kind == FusionKind::Film || kind == FusionKind::Gated) && m != 2) {
        throw std::invalid_argument("init_decision: " + to_string(kind) +
                                    " fusion requires exactly two modalities");
    }

    DecisionParams p;
    p.kind = kind;
    p.modalities = m;
    p.classes = classes;
    p.bias = Vector(classes, 0.0);

    const std::size_t d = feature_dims[0];
    switch (kind) {
        case FusionKind::Concat:
            for (std::size_t u = 0; u < m; ++u) {
                p.blocks.push_back(xavier_uniform(classes, feature_dims[u], rng));
            }
            break;
        case FusionKind::Sum:
            p.blocks.push_back(xavier_uniform(classes, d, rng));
            break;
        case FusionKind::Film:
            p.classifier = xavier_uniform(classes, d, rng);
            p.film_gamma_w = xavier_uniform(d, d, rng);
            p.film_gamma_b = Vector(d, 1.0);  // identity modulation at init
            p.film_shift_w = xavier_uniform(d, d, rng);
            p.film_shift_b = Vector(d, 0.0);
            break;
        case FusionKind::Gated:
            p.classifier = xavier_uniform(classes, d, rng);
            p.gate_weight = xavier_uniform(d, 2 * d, rng);
            p.gate_bias = Vector(d, 0.0);
            break;
    }
    if (p.has_probes()) {
        for (std::size_t u = 0; u < m; ++u) {
            p.probe_w.push_back(xavier_uniform(classes, feature_dims[u], rng));
            p.probe_b.push_back(Vector(classes, 0.0));
        }
    }
    return p;
}

DecisionGrads zero_decision_grads(const DecisionParams& params) {
    DecisionGrads g;
    for (const auto& b : params.blocks) g.blocks.push_back(zeros_like(b));
    g.bias = Vector(params.bias.size(), 0.0);
    g.classifier = zeros_like(params.classifier);
    g.film_gamma_w = zeros_like(params.film_gamma_w);
    g.film_gamma_b = Vector(params.film_gamma_b.size(), 0.0);
    g.film_shift_w = zeros_like(params.film_shift_w);
    g.film_shift_b = Vector(params.film_shift_b.size(), 0.0);
    g.gate_weight = zeros_like(params.gate_weight);
    g.gate_bias = Vector(params.gate_bias.size(), 0.0);
    for (const auto& w : params.probe_w) g.probe_w.push_back(zeros_like(w));
    for (const auto& b : params.probe_b) g.probe_b.push_back(Vector(b.size(), 0.0));
    return g;
}

Vector sigmoid(const Vector& x) {
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= 0.0) {
            out[i] = 1.0 / (1.0 + std::exp(-x[i]));
        } else {
            const double e = std::exp(x[i]);
            out[i] = e / (1.0 + e);
        }
    }
    return out;
}

Vector unimodal_logits(const Vector& feature, const DecisionParams& params, std::size_t modality) {
    if (modality >= params.modalities) {
        throw std::invalid_argument("unimodal_logits: unknown modality id " +
                                    std::to_string(modality));
    }
    const double inv_m = 1.0 / static_cast<double>(params.modalities);
    switch (params.kind) {
        case FusionKind::Concat:
        case FusionKind::Sum: {
            const DenseMatrix& block =
                params.kind == FusionKind::Concat ? params.blocks[modality] : params.blocks[0];
            Vector out = matvec(block, feature);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += params.bias[i] * inv_m;
            return out;
        }
        case FusionKind::Film:
        case FusionKind::Gated:
            return affine_forward(feature, params.probe_w[modality], params.probe_b[modality]);
    }
    throw std::logic_error("unimodal_logits: unhandled fusion kind");
}

Vector fuse(const std::vector<Vector>& features, const DecisionParams& params,
            FusionCache* cache) {
    if (features.size() != params.modalities) {
        throw std::invalid_argument("fuse: feature count does not match modalities");
    }
    switch (params.kind) {
        case FusionKind::Concat: {
            Vector out = params.bias;
            for (std::size_t u = 0; u < features.size(); ++u) {
                add_scaled(out, matvec(params.blocks[u], features[u]));
            }
            return out;
        }
        case FusionKind::Sum: {
            Vector summed = features[0];
            for (std::size_t u = 1; u < features.size(); ++u) add_scaled(summed, features[u]);
            Vector out = matvec(params.blocks[0], summed);
            add_scaled(out, params.bias);
            return out;
        }
        case FusionKind::Film: {
            Vector gamma = affine_forward(features[0], params.film_gamma_w, params.film_gamma_b);
            Vector shift = affine_forward(features[0], params.film_shift_w, params.film_shift_b);
            Vector modulated(gamma.size());
            for (std::size_t i = 0; i < modulated.size(); ++i) {
                modulated[i] = gamma[i] * features[1][i] + shift[i];
            }
            Vector out = matvec(params.classifier, modulated);
            add_scaled(out, params.bias);
            if (cache) {
                cache->gamma = std::move(gamma);
                cache->shift = std::move(shift);
                cache->modulated = std::move(modulated);
            }
            return out;
        }
        case FusionKind::Gated: {
            Vector cat(features[0].size() + features[1].size());
            std::copy(features[0].begin(), features[0].end(), cat.begin());
            std::copy(features[1].begin(), features[1].end(), cat.begin() + features[0].size());
            Vector gate_pre = affine_forward(cat, params.gate_weight, params.gate_bias);
            Vector gate = sigmoid(gate_pre);
            Vector modulated(gate.size());
            for (std::size_t i = 0; i < modulated.size(); ++i) {
                modulated[i] = gate[i] * features[0][i] + (1.0 - gate[i]) * features[1][i];
            }
            Vector out = matvec(params.classifier, modulated);
            add_scaled(out, params.bias);
            if (cache) {
                cache->gate_pre = std::move(gate_pre);
                cache->gate = std::move(gate);
                cache->modulated = std::move(modulated);
            }
            return out;
        }
    }
    throw std::logic_error("fuse: unhandled fusion kind");
}

std::vector<Vector> fuse_backward(const Vector& upstream, const std::vector<Vector>& features,
                                  const DecisionParams& params, const FusionCache& cache,
                                  DecisionGrads* accum) {
    std::vector<Vector> feature_grads;
    feature_grads.reserve(features.size());
    switch (params.kind) {
        case FusionKind::Concat: {
            for (std::size_t u = 0; u < features.size(); ++u) {
                feature_grads.push_back(matvec_transpose(params.blocks[u], upstream));
                if (accum) add_outer(accum->blocks[u], upstream, features[u]);
            }
            if (accum) add_scaled(accum->bias, upstream);
            return feature_grads;
        }
        case FusionKind::Sum: {
            Vector summed = features[0];
            for (std::size_t u = 1; u < features.size(); ++u) add_scaled(summed, features[u]);
            Vector dz = matvec_transpose(params.blocks[0], upstream);
            if (accum) {
                add_outer(accum->blocks[0], upstream, summed);
                add_scaled(accum->bias, upstream);
            }
            for (std::size_t u = 0; u < features.size(); ++u) feature_grads.push_back(dz);
            return feature_grads;
        }
        case FusionKind::Film: {
            Vector dmod = matvec_transpose(params.classifier, upstream);
            if (accum) {
                add_outer(accum->classifier, upstream, cache.modulated);
                add_scaled(accum->bias, upstream);
            }
            Vector dgamma(dmod.size()), dz1(dmod.size());
            for (std::size_t i = 0; i < dmod.size(); ++i) {
                dgamma[i] = dmod[i] * features[1][i];
                dz1[i] = dmod[i] * cache.gamma[i];
            }
            const Vector& dshift = dmod;
            if (accum) {
                add_outer(accum->film_gamma_w, dgamma, features[0]);
                add_scaled(accum->film_gamma_b, dgamma);
                add_outer(accum->film_shift_w, dshift, features[0]);
                add_scaled(accum->film_shift_b, dshift);
            }
            Vector dz0 = matvec_transpose(params.film_gamma_w, dgamma);
            add_scaled(dz0, matvec_transpose(params.film_shift_w, dshift));
            feature_grads.push_back(std::move(dz0));
            feature_grads.push_back(std::move(dz1));
            return feature_grads;
        }
        case FusionKind::Gated: {
            Vector dmod = matvec_transpose(params.classifier, upstream);
            if (accum) {
                add_outer(accum->classifier, upstream, cache.modulated);
                add_scaled(accum->bias, upstream);
            }
            const std::size_t d = dmod.size();
            Vector dgate(d), dpre(d), dz0(d), dz1(d);
            for (std::size_t i = 0; i < d; ++i) {
                dgate[i] = dmod[i] * (features[0][i] - features[1][i]);
                dpre[i] = dgate[i] * cache.gate[i] * (1.0 - cache.gate[i]);
                dz0[i] = dmod[i] * cache.gate[i];
                dz1[i] = dmod[i] * (1.0 - cache.gate[i]);
            }
            Vector cat(features[0].size() + features[1].size());
            std::copy(features[0].begin(), features[0].end(), cat.begin());
            std::copy(features[1].begin(), features[1].end(), cat.begin() + features[0].size());
            if (accum) {
                add_outer(accum->gate_weight, dpre, cat);
                add_scaled(accum->gate_bias, dpre);
            }
            Vector dcat = matvec_transpose(params.gate_weight, dpre);
            for (std::size_t i = 0; i < features[0].size(); ++i) dz0[i] += dcat[i];
            for (std::size_t i = 0; i < features[1].size(); ++i) {
                dz1[i] += dcat[features[0].size() + i];
            }
            feature_grads.push_back(std::move(dz0));
            feature_grads.push_back(std::move(dz1));
            return feature_grads;
        }
    }
    throw std::logic_error("fuse_backward: unhandled fusion kind");
}

Vector unimodal_backward(const Vector& upstream, const Vector& feature,
                         const DecisionParams& params, std::size_t modality,
                         DecisionGrads* decision_accum) {
    if (modality >= params.modalities) {
        throw std::invalid_argument("unimodal_backward: unknown modality id");
    }
    const double inv_m = 1.0 / static_cast<double>(params.modalities);
    switch (params.kind) {
        case FusionKind::Concat:
        case FusionKind::Sum: {
            const std::size_t block_idx = params.kind == FusionKind::Concat ? modality : 0;
            if (decision_accum) {
                add_outer(decision_accum->blocks[block_idx], upstream, feature);
                add_scaled(decision_accum->bias, upstream, inv_m);
            }
            return matvec_transpose(params.blocks[block_idx], upstream);
        }
        case FusionKind::Film:
        case FusionKind::Gated: {
            if (decision_accum) {
                add_outer(decision_accum->probe_w[modality], upstream, feature);
                add_scaled(decision_accum->probe_b[modality], upstream);
            }
            return matvec_transpose(params.probe_w[modality], upstream);
        }
    }
    throw std::logic_error("unimodal_backward: unhandled fusion kind");
}

}  // namespace bmlr
