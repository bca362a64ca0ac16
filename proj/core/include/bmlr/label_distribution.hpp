#pragma once

#include <cstddef>

#include "bmlr/dense_matrix.hpp"

namespace bmlr {

/// Probability vector over C classes: every entry >= 0, entries sum to 1
/// within 1e-9. Construction validates; downstream code may rely on it.
class LabelDistribution {
public:
    static constexpr double kSumTolerance = 1e-9;

    LabelDistribution() = default;
    /// Validating constructor. Throws std::invalid_argument on violation.
    explicit LabelDistribution(Vector probs);

    static LabelDistribution one_hot(std::size_t classes, std::size_t hot);
    static LabelDistribution uniform(std::size_t classes);

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const Vector& probs() const { return probs_; }

    bool is_one_hot() const;
    /// Index of the hot class; throws if not one-hot.
    std::size_t hot_index() const;
    /// Argmax with ties broken by lowest index.
    std::size_t argmax() const;

private:
    Vector probs_;
};

}  // namespace bmlr
