#include "bmlr/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bmlr {

double clamp_temperature(double t) { return std::clamp(t, kTemperatureMin, kTemperatureMax); }

LabelDistribution softmax(const Vector& logits) {
    if (logits.empty()) {
        throw std::invalid_argument("softmax: empty logits");
    }
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (!std::isfinite(logits[i])) {
            throw std::invalid_argument("softmax: non-finite logit at index " + std::to_string(i));
        }
    }
    const double maxv = *std::max_element(logits.begin(), logits.end());
    Vector p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - maxv);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return LabelDistribution(std::move(p));
}

LabelDistribution tempered_softmax(const Vector& logits, double temperature) {
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("tempered_softmax: temperature must be positive, got " +
                                    std::to_string(temperature));
    }
    const double t = clamp_temperature(temperature);
    if (t == 1.0) {
        return softmax(logits);
    }
    Vector scaled(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) scaled[i] = logits[i] / t;
    return softmax(scaled);
}

double cross_entropy(const LabelDistribution& target, const LabelDistribution& predicted) {
    if (target.size() != predicted.size()) {
        throw std::invalid_argument("cross_entropy: dimension mismatch, target " +
                                    std::to_string(target.size()) + " vs predicted " +
                                    std::to_string(predicted.size()));
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        loss -= target[i] * std::log(std::max(predicted[i], kLogFloor));
    }
    return loss;
}

Vector affine_forward(const Vector& input, const DenseMatrix& weight, const Vector& bias) {
    if (weight.cols() != input.size() || weight.rows() != bias.size()) {
        throw std::invalid_argument("affine_forward: shape mismatch");
    }
    Vector out = matvec(weight, input);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bias[i];
    return out;
}

AffineGrads affine_backward(const Vector& upstream, const Vector& cached_input,
                            const DenseMatrix& weight) {
    if (weight.rows() != upstream.size() || weight.cols() != cached_input.size()) {
        throw std::invalid_argument("affine_backward: shape mismatch");
    }
    AffineGrads g;
    g.input = matvec_transpose(weight, upstream);
    g.weight = DenseMatrix(weight.rows(), weight.cols());
    add_outer(g.weight, upstream, cached_input);
    g.bias = upstream;
    return g;
}

Vector relu_forward(const Vector& input) {
    require_finite(input, "relu_forward");
    Vector out(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] > 0.0 ? input[i] : 0.0;
    return out;
}

Vector relu_backward(const Vector& upstream, const Vector& cached_input) {
    if (upstream.size() != cached_input.size()) {
        throw std::invalid_argument("relu_backward: length mismatch");
    }
    Vector out(upstream.size());
    for (std::size_t i = 0; i < upstream.size(); ++i) {
        out[i] = cached_input[i] > 0.0 ? upstream[i] : 0.0;
    }
    return out;
}

Vector finite_diff_grad(const std::function<double(const Vector&)>& f, const Vector& point,
                        double h) {
    if (!(h >= 1e-7 && h <= 1e-3)) {
        throw std::invalid_argument("finite_diff_grad: h must lie in [1e-7, 1e-3]");
    }
    Vector grad(point.size());
    Vector x = point;
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double orig = x[i];
        x[i] = orig + h;
        const double fp = f(x);
        x[i] = orig - h;
        const double fm = f(x);
        x[i] = orig;
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw std::runtime_error("finite_diff_grad: non-finite evaluation at coordinate " +
                                     std::to_string(i));
        }
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

}  // namespace bmlr
