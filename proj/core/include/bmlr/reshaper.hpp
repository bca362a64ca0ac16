#pragma once

#include <utility>
#include <vector>

#include "bmlr/dense_matrix.hpp"
#include "bmlr/label_distribution.hpp"
#include "bmlr/model.hpp"

namespace bmlr {

struct ReshapeConfig {
    double alpha = 1.0;    // temperature sensitivity
    double beta = 0.2;     // activation threshold, in [0, 1]
    double eps_beta = 1e-6;  // substituted when beta == 0
    double eps_div = 1e-8;   // guards the confidence-ratio denominator

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
    double effective_beta() const { return beta == 0.0 ? eps_beta : beta; }
};

/// Per-modality outcome of reshaping one sample. `temperature` is the
/// clamped distillation temperature of this modality's teacher; 0 marks
/// modalities with no teacher (the intermediate/weak ones beyond two
/// modalities).
struct ModalityReshape {
    double lambda = 1.0;
    bool active = false;
    double temperature = 0.0;
    double intensity = 0.0;
    LabelDistribution target;    // d; equals y when inactive
    LabelDistribution reshaped;  // y-tilde
};

struct ReshapeDecision {
    std::vector<ModalityReshape> modalities;
};

/// Confidence discrepancy lambda^a = (y^T p^a) / max(y^T p^v, eps_div).
/// y must be one-hot; lambda^v is its reciprocal by definition.
double confidence_discrepancy(const LabelDistribution& y, const LabelDistribution& p_a,
                              const LabelDistribution& p_v, double eps_div);

/// Cross-modal soft target: tempered softmax of the other modality's
/// logits at temperature alpha * lambda_other (clamped). The result is a
/// constant: no gradient flows back into the producing modality.
LabelDistribution distill_target(const Vector& other_logits, double alpha, double lambda_other);

/// D = d 1^T: every column equals d, so D y = d for any simplex y.
DenseMatrix reshaping_matrix(const LabelDistribution& d);

/// xi = 1 - 1/lambda when 1 < lambda < 1/beta (strict on both sides),
/// else 0. beta == 0 substitutes eps_beta.
double reshaping_intensity(double lambda, double beta, double eps_beta);

/// y-tilde = xi * d + (1 - xi) * y (the action of xi*D + (1-xi)*I on y).
LabelDistribution reshape_label(const LabelDistribution& y, const LabelDistribution& d,
                                double intensity);

/// Strong/weak modality pair from true-class confidences: strong = argmax,
/// weak = argmin, ties to the lowest index. strong == weak means no usable
/// discrepancy (treated as inactive). Requires >= 3 modalities.
std::pair<std::size_t, std::size_t> select_trimodal_pair(const std::vector<double>& confidences);

/// Full per-sample reshaping from unimodal predictions. Two modalities use
/// the reciprocal-lambda pair; three or more reshape only the strong/weak
/// pair and keep intermediates one-hot.
ReshapeDecision reshape_sample(const LabelDistribution& y,
                               const std::vector<Vector>& unimodal_logits,
                               const std::vector<LabelDistribution>& unimodal_probs,
                               const ReshapeConfig& cfg);

/// reshape_sample over a forward trace; output order matches input order.
std::vector<ReshapeDecision> reshape_batch(const ForwardTrace& trace,
                                           const std::vector<LabelDistribution>& labels,
                                           const ReshapeConfig& cfg);

}  // namespace bmlr
