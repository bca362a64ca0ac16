#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bmlr/dense_matrix.hpp"

namespace bmlr {

/// Knobs for the synthetic multimodal classification task. Class means are
/// mutually equidistant points (pairwise distance separation[u], in units
/// of the unit noise std), so separation maps monotonically to attainable
/// accuracy per modality.
struct SyntheticSpec {
    std::size_t classes = 6;
    std::size_t samples_per_class = 100;
    std::vector<std::size_t> feature_dims = {20, 20};  // per modality
    std::vector<double> separations = {2.5, 1.0};      // per modality
    double exclusive_fraction = 0.0;  // rho: informative in only one modality
    double label_noise = 0.0;
    std::uint64_t seed = 1;

    void validate() const;
};

enum class Split { Train, Test };

struct Sample {
    std::vector<Vector> inputs;  // one vector per modality
    std::size_t label = 0;
    Split split = Split::Train;
};

struct Dataset {
    std::size_t classes = 0;
    std::vector<std::size_t> feature_dims;
    std::vector<Sample> samples;

    std::vector<const Sample*> split(Split which) const;
    std::size_t modalities() const { return feature_dims.size(); }
};

bool operator==(const Sample& a, const Sample& b);
bool operator==(const Dataset& a, const Dataset& b);

/// Deterministic generation: a pure function of the spec (seed included).
/// Stratified 90/10 train/test split per class. When a modality's feature
/// dim is smaller than the class count the equidistant means are passed
/// through a random orthonormal projection (documented fallback; pairwise
/// distances are then only approximately equal).
Dataset generate(const SyntheticSpec& spec);

/// CSV with a one-line header starting with the magic token "BMLR-DATA-1".
/// Round-trips bit-exactly.
void save(const Dataset& dataset, const std::filesystem::path& path);
Dataset load(const std::filesystem::path& path);

}  // namespace bmlr
