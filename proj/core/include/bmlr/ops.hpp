#pragma once

#include <functional>

#include "bmlr/dense_matrix.hpp"
#include "bmlr/label_distribution.hpp"

namespace bmlr {

/// Temperatures are clamped to this range before use; the raw value must
/// still be strictly positive.
constexpr double kTemperatureMin = 1e-3;
constexpr double kTemperatureMax = 1e3;

/// Floor applied to predicted probabilities before taking logs.
constexpr double kLogFloor = 1e-12;

double clamp_temperature(double t);

/// Max-subtraction stabilized softmax. Rejects empty or non-finite input.
LabelDistribution softmax(const Vector& logits);

/// softmax(logits / T) with T clamped to [kTemperatureMin, kTemperatureMax].
/// Raw T <= 0 (or NaN) is rejected.
LabelDistribution tempered_softmax(const Vector& logits, double temperature);

/// -sum_i target_i * log(max(predicted_i, kLogFloor)).
double cross_entropy(const LabelDistribution& target, const LabelDistribution& predicted);

// y = W x + b
Vector affine_forward(const Vector& input, const DenseMatrix& weight, const Vector& bias);

struct AffineGrads {
    Vector input;       // W^T upstream
    DenseMatrix weight; // upstream x^T
    Vector bias;        // upstream
};

AffineGrads affine_backward(const Vector& upstream, const Vector& cached_input,
                            const DenseMatrix& weight);

Vector relu_forward(const Vector& input);
/// Masks upstream by positivity of the cached pre-activation input;
/// subgradient at 0 is 0.
Vector relu_backward(const Vector& upstream, const Vector& cached_input);

/// Central finite differences, one coordinate at a time. h must lie in
/// [1e-7, 1e-3]; non-finite function evaluations are rejected.
Vector finite_diff_grad(const std::function<double(const Vector&)>& f, const Vector& point,
                        double h);

}  // namespace bmlr
