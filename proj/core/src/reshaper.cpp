#include "bmlr/reshaper.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bmlr/ops.hpp"

namespace bmlr {

void ReshapeConfig::validate() const {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("ReshapeConfig: alpha must be positive");
    }
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("ReshapeConfig: beta must lie in [0, 1]");
    }
    if (!(eps_beta > 0.0 && eps_beta <= 1e-4)) {
        throw std::invalid_argument("ReshapeConfig: eps_beta must lie in (0, 1e-4]");
    }
    if (!(eps_div > 0.0 && eps_div <= 1e-4)) {
        throw std::invalid_argument("ReshapeConfig: eps_div must lie in (0, 1e-4]");
    }
}

double confidence_discrepancy(const LabelDistribution& y, const LabelDistribution& p_a,
                              const LabelDistribution& p_v, double eps_div) {
    if (!y.is_one_hot()) {
        throw std::invalid_argument(
            "confidence_discrepancy: reshaping consumes ground-truth one-hot labels only");
    }
    if (y.size() != p_a.size() || y.size() != p_v.size()) {
        throw std::invalid_argument("confidence_discrepancy: dimension mismatch");
    }
    const std::size_t hot = y.hot_index();
    return p_a[hot] / std::max(p_v[hot], eps_div);
}

LabelDistribution distill_target(const Vector& other_logits, double alpha, double lambda_other) {
    if (!(alpha > 0.0) || !(lambda_other > 0.0)) {
        throw std::invalid_argument("distill_target: alpha and lambda must be positive");
    }
    return tempered_softmax(other_logits, alpha * lambda_other);
}

DenseMatrix reshaping_matrix(const LabelDistribution& d) {
    const std::size_t c = d.size();
    DenseMatrix m(c, c);
    for (std::size_t r = 0; r < c; ++r) {
        for (std::size_t col = 0; col < c; ++col) m(r, col) = d[r];
    }
    return m;
}

double reshaping_intensity(double lambda, double beta, double eps_beta) {
    const double b = beta == 0.0 ? eps_beta : beta;
    if (lambda > 1.0 && lambda < 1.0 / b) {
        return 1.0 - 1.0 / lambda;
    }
    return 0.0;
}

LabelDistribution reshape_label(const LabelDistribution& y, const LabelDistribution& d,
                                double intensity) {
    if (y.size() != d.size()) {
        throw std::invalid_argument("reshape_label: dimension mismatch");
    }
    if (!(intensity >= 0.0 && intensity < 1.0)) {
        throw std::invalid_argument("reshape_label: intensity must lie in [0, 1)");
    }
    if (intensity == 0.0) {
        return y;
    }
    Vector mixed(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        mixed[i] = intensity * d[i] + (1.0 - intensity) * y[i];
    }
    return LabelDistribution(std::move(mixed));
}

std::pair<std::size_t, std::size_t> select_trimodal_pair(const std::vector<double>& confidences) {
    if (confidences.size() < 3) {
        throw std::invalid_argument(
            "select_trimodal_pair: needs >= 3 modalities (use the two-modality path)");
    }
    std::size_t strong = 0, weak = 0;
    for (std::size_t u = 1; u < confidences.size(); ++u) {
        if (confidences[u] > confidences[strong]) strong = u;
        if (confidences[u] < confidences[weak]) weak = u;
    }
    return {strong, weak};
}

namespace {

ModalityReshape make_inactive(double lambda, double temperature, const LabelDistribution& y) {
    ModalityReshape r;
    r.lambda = lambda;
    r.active = false;
    r.temperature = temperature;
    r.intensity = 0.0;
    r.target = y;
    r.reshaped = y;
    return r;
}

}  // namespace

ReshapeDecision reshape_sample(const LabelDistribution& y,
                               const std::vector<Vector>& unimodal_logits,
                               const std::vector<LabelDistribution>& unimodal_probs,
                               const ReshapeConfig& cfg) {
    cfg.validate();
    const std::size_t m = unimodal_logits.size();
    if (m < 2 || unimodal_probs.size() != m) {
        throw std::invalid_argument("reshape_sample: need aligned predictions for >= 2 modalities");
    }

    ReshapeDecision decision;
    decision.modalities.resize(m);

    if (m == 2) {
        const double lambda0 =
            confidence_discrepancy(y, unimodal_probs[0], unimodal_probs[1], cfg.eps_div);
        const double lambdas[2] = {lambda0, 1.0 / lambda0};
        for (std::size_t u = 0; u < 2; ++u) {
            const std::size_t other = 1 - u;
            const double temperature = clamp_temperature(cfg.alpha * lambdas[other]);
            const double xi = reshaping_intensity(lambdas[u], cfg.beta, cfg.eps_beta);
            if (xi > 0.0) {
                ModalityReshape r;
                r.lambda = lambdas[u];
                r.active = true;
                r.temperature = temperature;
                r.intensity = xi;
                r.target = distill_target(unimodal_logits[other], cfg.alpha, lambdas[other]);
                r.reshaped = reshape_label(y, r.target, xi);
                decision.modalities[u] = std::move(r);
            } else {
                decision.modalities[u] = make_inactive(lambdas[u], temperature, y);
            }
        }
        return decision;
    }

    // Three or more modalities: only the strongest/weakest pair carries the
    // discrepancy; intermediates keep their original labels.
    std::vector<double> confidences(m);
    const std::size_t hot = y.hot_index();
    for (std::size_t u = 0; u < m; ++u) confidences[u] = unimodal_probs[u][hot];
    auto [strong, weak] = select_trimodal_pair(confidences);

    for (std::size_t u = 0; u < m; ++u) {
        decision.modalities[u] = make_inactive(1.0, 0.0, y);
    }
    if (strong == weak) {
        return decision;  // no usable discrepancy; everything stays one-hot
    }

    const double lambda_strong = confidences[strong] / std::max(confidences[weak], cfg.eps_div);
    const double lambda_weak = 1.0 / lambda_strong;
    decision.modalities[strong].lambda = lambda_strong;
    decision.modalities[weak].lambda = lambda_weak;
    decision.modalities[strong].temperature = clamp_temperature(cfg.alpha * lambda_weak);

    const double xi = reshaping_intensity(lambda_strong, cfg.beta, cfg.eps_beta);
    if (xi > 0.0) {
        ModalityReshape& r = decision.modalities[strong];
        r.active = true;
        r.intensity = xi;
        r.target = distill_target(unimodal_logits[weak], cfg.alpha, lambda_weak);
        r.reshaped = reshape_label(y, r.target, xi);
    }
    return decision;
}

std::vector<ReshapeDecision> reshape_batch(const ForwardTrace& trace,
                                           const std::vector<LabelDistribution>& labels,
                                           const ReshapeConfig& cfg) {
    if (trace.batch_size() != labels.size()) {
        throw std::invalid_argument("reshape_batch: trace and labels are not aligned (" +
                                    std::to_string(trace.batch_size()) + " vs " +
                                    std::to_string(labels.size()) + ")");
    }
    std::vector<ReshapeDecision> decisions;
    decisions.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        decisions.push_back(reshape_sample(labels[i], trace.samples[i].unimodal_logits,
                                           trace.samples[i].unimodal_probs, cfg));
    }
    return decisions;
}

}  // namespace bmlr
