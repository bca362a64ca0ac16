#include "bmlr/trainer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "bmlr/ops.hpp"
#include "bmlr/rng.hpp"

namespace bmlr {

MethodKind method_from_string(const std::string& name) {
    if (name == "baseline") return MethodKind::Baseline;
    if (name == "uniform-baseline") return MethodKind::UniformBaseline;
    if (name == "bmlr") return MethodKind::Bmlr;
    if (name == "only-reshape") return MethodKind::OnlyReshape;
    if (name == "only-tpo") return MethodKind::OnlyTpo;
    if (name == "uni-distill") return MethodKind::UniDistill;
    if (name == "vanilla-reshape") return MethodKind::VanillaReshape;
    if (name == "uniform-reshaping") return MethodKind::UniformReshaping;
    throw std::invalid_argument("unknown method '" + name + "'");
}

std::string to_string(MethodKind kind) {
    switch (kind) {
        case MethodKind::Baseline: return "baseline";
        case MethodKind::UniformBaseline: return "uniform-baseline";
        case MethodKind::Bmlr: return "bmlr";
        case MethodKind::OnlyReshape: return "only-reshape";
        case MethodKind::OnlyTpo: return "only-tpo";
        case MethodKind::UniDistill: return "uni-distill";
        case MethodKind::VanillaReshape: return "vanilla-reshape";
        case MethodKind::UniformReshaping: return "uniform-reshaping";
    }
    return "?";
}

bool uses_targeted_routing(MethodKind kind) {
    switch (kind) {
        case MethodKind::Bmlr:
        case MethodKind::OnlyTpo:
        case MethodKind::UniDistill:
        case MethodKind::VanillaReshape:
            return true;
        default:
            return false;
    }
}

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch size must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: learning rate must be positive");
    if (!(uniform_weight >= 0.0)) {
        throw std::invalid_argument("TrainConfig: uniform weight must be >= 0");
    }
    if (!(smoothing_mass >= 0.0 && smoothing_mass < 1.0)) {
        throw std::invalid_argument("TrainConfig: smoothing mass must lie in [0, 1)");
    }
    if (hidden_dims.empty()) {
        throw std::invalid_argument("TrainConfig: encoder needs at least one layer");
    }
    reshape.validate();
}

double unimodal_loss(const std::vector<LabelDistribution>& targets,
                     const std::vector<LabelDistribution>& predicted) {
    if (targets.empty() || targets.size() != predicted.size()) {
        throw std::invalid_argument("unimodal_loss: need aligned, non-empty batches");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        total += cross_entropy(targets[i], predicted[i]);
    }
    return total / static_cast<double>(targets.size());
}

double multimodal_loss(const std::vector<LabelDistribution>& labels,
                       const std::vector<LabelDistribution>& predicted) {
    return unimodal_loss(labels, predicted);
}

namespace {

struct BatchTargets {
    bool has_unimodal = false;
    std::vector<std::vector<LabelDistribution>> unimodal;  // [modality][sample]
    std::vector<long> reshape_counts;
    std::vector<ReshapeDecision> decisions;
};

LabelDistribution smooth_label(const LabelDistribution& y, double mass) {
    if (mass == 0.0) return y;
    const double c = static_cast<double>(y.size());
    Vector p(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) p[i] = (1.0 - mass) * y[i] + mass / c;
    return LabelDistribution(std::move(p));
}

BatchTargets build_targets(MethodKind method, const ForwardTrace& trace,
                           const std::vector<LabelDistribution>& labels,
                           const TrainConfig& cfg) {
    const std::size_t m = trace.samples[0].unimodal_probs.size();
    const std::size_t n = labels.size();
    BatchTargets t;
    t.reshape_counts.assign(m, 0);

    switch (method) {
        case MethodKind::Baseline:
            return t;  // multimodal supervision only
        case MethodKind::UniformBaseline:
        case MethodKind::OnlyTpo: {
            t.has_unimodal = true;
            t.unimodal.assign(m, labels);
            return t;
        }
        case MethodKind::UniformReshaping: {
            t.has_unimodal = true;
            std::vector<LabelDistribution> smoothed;
            smoothed.reserve(n);
            for (const auto& y : labels) smoothed.push_back(smooth_label(y, cfg.smoothing_mass));
            t.unimodal.assign(m, smoothed);
            if (cfg.smoothing_mass > 0.0) {
                t.reshape_counts.assign(m, static_cast<long>(n));
            }
            return t;
        }
        case MethodKind::UniDistill: {
            if (m != 2) {
                throw std::invalid_argument("uni-distill is defined for exactly two modalities");
            }
            t.has_unimodal = true;
            t.unimodal.assign(m, std::vector<LabelDistribution>{});
            for (std::size_t u = 0; u < m; ++u) {
                t.unimodal[u].reserve(n);
                for (std::size_t i = 0; i < n; ++i) {
                    t.unimodal[u].push_back(trace.samples[i].unimodal_probs[1 - u]);
                }
            }
            t.reshape_counts.assign(m, static_cast<long>(n));
            return t;
        }
        case MethodKind::Bmlr:
        case MethodKind::OnlyReshape:
        case MethodKind::VanillaReshape: {
            t.has_unimodal = true;
            t.decisions = reshape_batch(trace, labels, cfg.reshape);
            t.unimodal.assign(m, std::vector<LabelDistribution>{});
            for (std::size_t u = 0; u < m; ++u) {
                t.unimodal[u].reserve(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const ModalityReshape& r = t.decisions[i].modalities[u];
                    if (r.active) {
                        ++t.reshape_counts[u];
                        // Vanilla-reshape keeps the gate but drops the
                        // one-hot component of the active target.
                        t.unimodal[u].push_back(method == MethodKind::VanillaReshape ? r.target
                                                                                     : r.reshaped);
                    } else {
                        t.unimodal[u].push_back(labels[i]);
                    }
                }
            }
            return t;
        }
    }
    throw std::logic_error("build_targets: unhandled method");
}

std::vector<LabelDistribution> one_hot_labels(const Batch& batch, std::size_t classes) {
    std::vector<LabelDistribution> labels;
    labels.reserve(batch.size());
    for (const Sample* s : batch) labels.push_back(LabelDistribution::one_hot(classes, s->label));
    return labels;
}

BatchInputs batch_inputs(const Batch& batch) {
    BatchInputs inputs;
    inputs.reserve(batch.size());
    for (const Sample* s : batch) inputs.push_back(s->inputs);
    return inputs;
}

StepMetrics run_step(const Batch& batch, ModelParams& model, std::vector<AdamState>& states,
                     const TrainConfig& cfg, bool targeted, HeadToggles toggles) {
    if (batch.empty()) {
        throw std::invalid_argument("step: empty batch");
    }
    if (states.size() != num_groups(model)) {
        throw std::invalid_argument("step: need one Adam state per parameter group");
    }
    const std::size_t m = model.config.modalities();
    const std::size_t n = batch.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    ForwardTrace trace = forward(batch_inputs(batch), model);
    std::vector<LabelDistribution> labels = one_hot_labels(batch, model.config.classes);
    BatchTargets targets = build_targets(cfg.method, trace, labels, cfg);

    StepMetrics metrics;
    metrics.reshape_counts = targets.reshape_counts;
    metrics.decisions = std::move(targets.decisions);

    std::vector<LabelDistribution> fused_probs;
    fused_probs.reserve(n);
    for (const auto& s : trace.samples) fused_probs.push_back(s.fused_probs);
    metrics.loss_multimodal = multimodal_loss(labels, fused_probs);

    metrics.loss_unimodal.assign(m, 0.0);
    for (std::size_t u = 0; u < m; ++u) {
        std::vector<LabelDistribution> probs;
        probs.reserve(n);
        for (const auto& s : trace.samples) probs.push_back(s.unimodal_probs[u]);
        const std::vector<LabelDistribution>& tgt =
            targets.has_unimodal ? targets.unimodal[u] : labels;
        metrics.loss_unimodal[u] = unimodal_loss(tgt, probs);
    }
    if (!std::isfinite(metrics.loss_multimodal) || !all_finite(metrics.loss_unimodal)) {
        throw std::runtime_error("step: non-finite loss (method " + to_string(cfg.method) + ")");
    }

    // Softmax + cross-entropy head gradients: (p - target) / batch.
    HeadUpstream upstream;
    if (toggles.multimodal) {
        upstream.fused.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            Vector g(model.config.classes);
            for (std::size_t c = 0; c < g.size(); ++c) {
                g[c] = (trace.samples[i].fused_probs[c] - labels[i][c]) * inv_n;
            }
            upstream.fused.push_back(std::move(g));
        }
    }
    if (toggles.unimodal && targets.has_unimodal) {
        // Joint methods weight the unimodal terms by w^u; targeted routing
        // treats each modality loss as its own objective.
        const double weight = targeted ? 1.0 : cfg.uniform_weight;
        if (weight != 0.0) {
            upstream.unimodal.assign(m, {});
            for (std::size_t u = 0; u < m; ++u) {
                upstream.unimodal[u].reserve(n);
                for (std::size_t i = 0; i < n; ++i) {
                    Vector g(model.config.classes);
                    for (std::size_t c = 0; c < g.size(); ++c) {
                        g[c] = weight * (trace.samples[i].unimodal_probs[u][c] -
                                         targets.unimodal[u][i][c]) *
                               inv_n;
                    }
                    upstream.unimodal[u].push_back(std::move(g));
                }
            }
        }
    }

    const RoutingMask mask = targeted ? RoutingMask::targeted() : RoutingMask::full();
    ModelGradients grads = backward(trace, model, upstream, mask);

    // Each group is flattened block-by-block into one span sharing one Adam
    // state, then written back in the same order.
    for (std::size_t g = 0; g < num_groups(model); ++g) {
        auto pblocks = parameter_group_blocks(model, g);
        auto gblocks = gradient_group_blocks(model, grads, g);
        Vector flat_params, flat_grads;
        flat_params.reserve(states[g].m.size());
        flat_grads.reserve(states[g].m.size());
        for (const auto& blk : pblocks) {
            flat_params.insert(flat_params.end(), blk.data, blk.data + blk.size);
        }
        for (const auto& blk : gblocks) {
            flat_grads.insert(flat_grads.end(), blk.data, blk.data + blk.size);
        }
        adam_step(flat_params, flat_grads, states[g]);
        std::size_t pos = 0;
        for (const auto& blk : pblocks) {
            std::copy(flat_params.begin() + static_cast<std::ptrdiff_t>(pos),
                      flat_params.begin() + static_cast<std::ptrdiff_t>(pos + blk.size), blk.data);
            pos += blk.size;
        }
    }
    return metrics;
}

}  // namespace

StepMetrics tpo_step(const Batch& batch, ModelParams& model, std::vector<AdamState>& states,
                     const TrainConfig& cfg, HeadToggles toggles) {
    if (!uses_targeted_routing(cfg.method)) {
        throw std::invalid_argument("tpo_step: method " + to_string(cfg.method) +
                                    " does not use targeted routing");
    }
    return run_step(batch, model, states, cfg, /*targeted=*/true, toggles);
}

StepMetrics joint_step(const Batch& batch, ModelParams& model, std::vector<AdamState>& states,
                       const TrainConfig& cfg, HeadToggles toggles) {
    if (uses_targeted_routing(cfg.method)) {
        throw std::invalid_argument("joint_step: method " + to_string(cfg.method) +
                                    " uses targeted routing");
    }
    return run_step(batch, model, states, cfg, /*targeted=*/false, toggles);
}

StepFn variant_dispatch(MethodKind kind) {
    if (uses_targeted_routing(kind)) {
        return [](const Batch& batch, ModelParams& model, std::vector<AdamState>& states,
                  const TrainConfig& cfg) { return tpo_step(batch, model, states, cfg); };
    }
    return [](const Batch& batch, ModelParams& model, std::vector<AdamState>& states,
              const TrainConfig& cfg) { return joint_step(batch, model, states, cfg); };
}

EvalMetrics evaluate(const ModelParams& model, const std::vector<const Sample*>& split) {
    if (split.empty()) {
        throw std::invalid_argument("evaluate: empty split");
    }
    const std::size_t m = model.config.modalities();
    ForwardTrace trace = forward(batch_inputs(split), model);
    std::vector<LabelDistribution> labels = one_hot_labels(split, model.config.classes);

    std::vector<LabelDistribution> fused;
    fused.reserve(split.size());
    for (const auto& s : trace.samples) fused.push_back(s.fused_probs);

    EvalMetrics out;
    out.acc_multimodal = accuracy(fused, labels);
    out.loss_multimodal = multimodal_loss(labels, fused);
    for (std::size_t u = 0; u < m; ++u) {
        std::vector<LabelDistribution> probs;
        probs.reserve(split.size());
        for (const auto& s : trace.samples) probs.push_back(s.unimodal_probs[u]);
        out.acc_unimodal.push_back(accuracy(probs, labels));
        out.loss_unimodal.push_back(unimodal_loss(labels, probs));
    }
    out.ratio = modality_ratio(out.acc_unimodal[0], out.acc_unimodal[1]);
    return out;
}

const MetricsRow& RunRecord::final_row() const {
    if (rows.empty()) {
        throw std::logic_error("RunRecord: no rows");
    }
    return rows.back();
}

TrainingAbort::TrainingAbort(const std::string& message, RunRecord partial)
    : std::runtime_error(message), partial_(std::move(partial)) {}

ModelParams init_model_for(const TrainConfig& cfg, const Dataset& dataset) {
    ModelConfig mc;
    mc.classes = dataset.classes;
    mc.input_dims = dataset.feature_dims;
    mc.hidden_dims = cfg.hidden_dims;
    mc.fusion = cfg.fusion;
    Rng init_rng = Rng(cfg.seed).child(0x696e6974);  // init stream
    return init_model(mc, init_rng);
}

RunRecord train(const TrainConfig& cfg, const Dataset& dataset, ModelParams* out_model,
                const ReshapeLogFn& reshape_log) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<const Sample*> train_split = dataset.split(Split::Train);
    std::vector<const Sample*> test_split = dataset.split(Split::Test);
    if (train_split.empty() || test_split.empty()) {
        throw std::invalid_argument("train: dataset needs non-empty train and test splits");
    }

    ModelParams model = init_model_for(cfg, dataset);
    const std::size_t m = model.config.modalities();

    std::vector<AdamState> states;
    for (std::size_t g = 0; g < num_groups(model); ++g) {
        states.emplace_back(group_dim(model, g), cfg.lr);
    }

    StepFn step = variant_dispatch(cfg.method);
    Rng shuffle_rng = Rng(cfg.seed).child(0x73687566);  // shuffle stream

    RunRecord record;
    record.seed = cfg.seed;

    std::vector<std::size_t> order(train_split.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);

        double sum_loss_multi = 0.0;
        std::vector<double> sum_loss_uni(m, 0.0);
        std::vector<long> counts(m, 0);

        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            Batch batch;
            batch.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) batch.push_back(train_split[order[i]]);

            StepMetrics sm;
            try {
                sm = step(batch, model, states, cfg);
            } catch (const std::runtime_error& e) {
                record.aborted = true;
                record.abort_reason = e.what();
                const auto t1 = std::chrono::steady_clock::now();
                record.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
                throw TrainingAbort(e.what(), std::move(record));
            }

            const auto bsz = static_cast<double>(batch.size());
            sum_loss_multi += sm.loss_multimodal * bsz;
            for (std::size_t u = 0; u < m; ++u) {
                sum_loss_uni[u] += sm.loss_unimodal[u] * bsz;
                counts[u] += sm.reshape_counts[u];
            }
            if (reshape_log && !sm.decisions.empty()) {
                for (std::size_t i = start; i < stop; ++i) {
                    const ReshapeDecision& d = sm.decisions[i - start];
                    for (std::size_t u = 0; u < m; ++u) {
                        reshape_log(static_cast<long>(epoch), order[i], u, d.modalities[u]);
                    }
                }
            }
        }

        EvalMetrics eval = evaluate(model, test_split);
        MetricsRow row;
        row.epoch = static_cast<long>(epoch);
        row.loss_multimodal = sum_loss_multi / static_cast<double>(order.size());
        for (std::size_t u = 0; u < m; ++u) {
            row.loss_unimodal.push_back(sum_loss_uni[u] / static_cast<double>(order.size()));
        }
        row.acc_multimodal = eval.acc_multimodal;
        row.acc_unimodal = eval.acc_unimodal;
        row.modality_ratio = eval.ratio;
        row.reshape_counts = counts;
        record.rows.push_back(std::move(row));
    }

    const auto t1 = std::chrono::steady_clock::now();
    record.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    if (out_model) *out_model = std::move(model);
    return record;
}

}  // namespace bmlr
