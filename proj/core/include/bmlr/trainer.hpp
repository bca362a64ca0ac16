#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bmlr/adam.hpp"
#include "bmlr/dataset.hpp"
#include "bmlr/metrics.hpp"
#include "bmlr/model.hpp"
#include "bmlr/reshaper.hpp"

namespace bmlr {

enum class MethodKind {
    Baseline,          // multimodal loss only, joint update
    UniformBaseline,   // L0 + sum_u w^u L^u with one-hot targets, joint update
    Bmlr,              // reshaped labels + targeted parameter optimization
    OnlyReshape,       // reshaped labels, joint update
    OnlyTpo,           // one-hot targets, targeted parameter optimization
    UniDistill,        // cross-modal predictions as targets (T=1, no gate), TPO
    VanillaReshape,    // gated, but the active target drops the one-hot part
    UniformReshaping,  // label smoothing toward uniform, joint update
};

MethodKind method_from_string(const std::string& name);
std::string to_string(MethodKind kind);
bool uses_targeted_routing(MethodKind kind);

struct TrainConfig {
    MethodKind method = MethodKind::Bmlr;
    FusionKind fusion = FusionKind::Concat;
    std::size_t epochs = 40;
    std::size_t batch_size = 64;
    double lr = 5e-4;
    std::uint64_t seed = 1;
    ReshapeConfig reshape;
    double uniform_weight = 1.0;  // w^u in the joint objective
    double smoothing_mass = 0.1;  // s for uniform-reshaping
    std::vector<std::size_t> hidden_dims = {64, 32};

    void validate() const;
};

/// Mean (not sum) cross-entropy over the batch; the sum form is
/// recoverable by scaling the learning rate.
double unimodal_loss(const std::vector<LabelDistribution>& targets,
                     const std::vector<LabelDistribution>& predicted);
double multimodal_loss(const std::vector<LabelDistribution>& labels,
                       const std::vector<LabelDistribution>& predicted);

struct StepMetrics {
    double loss_multimodal = 0.0;
    std::vector<double> loss_unimodal;
    std::vector<long> reshape_counts;
    std::vector<ReshapeDecision> decisions;  // populated by reshaper-based methods
};

/// Test hook: drop one loss head from a step entirely.
struct HeadToggles {
    bool unimodal = true;
    bool multimodal = true;
};

using Batch = std::vector<const Sample*>;

/// Targeted parameter optimization step (Eq.-11-style routing): each
/// encoder is updated only by its modality loss, the decision layer only by
/// the multimodal loss. One Adam state per parameter group.
StepMetrics tpo_step(const Batch& batch, ModelParams& model, std::vector<AdamState>& states,
                     const TrainConfig& cfg, HeadToggles toggles = {});

/// Joint step: every parameter group is updated by the total objective.
StepMetrics joint_step(const Batch& batch, ModelParams& model, std::vector<AdamState>& states,
                       const TrainConfig& cfg, HeadToggles toggles = {});

using StepFn = std::function<StepMetrics(const Batch&, ModelParams&, std::vector<AdamState>&,
                                         const TrainConfig&)>;

/// The per-batch step function for the configured method.
StepFn variant_dispatch(MethodKind kind);

struct EvalMetrics {
    double acc_multimodal = 0.0;
    std::vector<double> acc_unimodal;
    std::optional<double> ratio;  // modality 0 over modality 1
    double loss_multimodal = 0.0;
    std::vector<double> loss_unimodal;
};

/// Frozen-model evaluation with one-hot targets; rejects an empty split.
EvalMetrics evaluate(const ModelParams& model, const std::vector<const Sample*>& split);

struct RunRecord {
    std::uint64_t seed = 0;
    std::vector<MetricsRow> rows;  // one per epoch
    double wall_seconds = 0.0;
    bool aborted = false;
    std::string abort_reason;

    const MetricsRow& final_row() const;
};

/// Raised when a run aborts (non-finite loss or gradient); carries the rows
/// finished so far so callers can flush a partial record.
class TrainingAbort : public std::runtime_error {
public:
    TrainingAbort(const std::string& message, RunRecord partial);
    const RunRecord& partial() const { return partial_; }

private:
    RunRecord partial_;
};

/// Per-(epoch, sample, modality) reshape diagnostics, appended row by row.
using ReshapeLogFn =
    std::function<void(long epoch, std::size_t sample, std::size_t modality,
                       const ModalityReshape& reshape)>;

ModelParams init_model_for(const TrainConfig& cfg, const Dataset& dataset);

/// Algorithm-1-style loop: shuffled minibatches per epoch, per-minibatch
/// reshaping and update, epoch-end evaluation on the test split.
/// Deterministic for a fixed seed.
RunRecord train(const TrainConfig& cfg, const Dataset& dataset, ModelParams* out_model = nullptr,
                const ReshapeLogFn& reshape_log = nullptr);

}  // namespace bmlr
