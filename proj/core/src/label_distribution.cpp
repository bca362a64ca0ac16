#include "bmlr/label_distribution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bmlr {

LabelDistribution::LabelDistribution(Vector probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw std::invalid_argument("LabelDistribution: empty probability vector");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        const double p = probs_[i];
        if (!std::isfinite(p) || p < 0.0) {
            throw std::invalid_argument("LabelDistribution: invalid probability " +
                                        std::to_string(p) + " at index " + std::to_string(i));
        }
        sum += p;
    }
    if (std::fabs(sum - 1.0) > kSumTolerance) {
        throw std::invalid_argument("LabelDistribution: entries sum to " + std::to_string(sum));
    }
}

LabelDistribution LabelDistribution::one_hot(std::size_t classes, std::size_t hot) {
    if (hot >= classes) {
        throw std::invalid_argument("LabelDistribution::one_hot: class index out of range");
    }
    Vector p(classes, 0.0);
    p[hot] = 1.0;
    return LabelDistribution(std::move(p));
}

LabelDistribution LabelDistribution::uniform(std::size_t classes) {
    if (classes == 0) {
        throw std::invalid_argument("LabelDistribution::uniform: zero classes");
    }
    return LabelDistribution(Vector(classes, 1.0 / static_cast<double>(classes)));
}

bool LabelDistribution::is_one_hot() const {
    std::size_t ones = 0;
    for (double p : probs_) {
        if (p == 1.0) {
            ++ones;
        } else if (p != 0.0) {
            return false;
        }
    }
    return ones == 1;
}

std::size_t LabelDistribution::hot_index() const {
    if (!is_one_hot()) {
        throw std::invalid_argument("LabelDistribution: not one-hot");
    }
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        if (probs_[i] == 1.0) return i;
    }
    return 0;  // unreachable
}

std::size_t LabelDistribution::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs_.size(); ++i) {
        if (probs_[i] > probs_[best]) best = i;
    }
    return best;
}

}  // namespace bmlr
