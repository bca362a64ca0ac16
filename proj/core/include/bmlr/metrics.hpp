#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bmlr/label_distribution.hpp"
#include "bmlr/reshaper.hpp"

namespace bmlr {

/// One evaluation row. The ratio is modality 0 over modality 1 (the
/// audio/visual orientation); the CSV header repeats that so the direction
/// is never ambiguous.
struct MetricsRow {
    long epoch = 0;
    double loss_multimodal = 0.0;
    std::vector<double> loss_unimodal;
    double acc_multimodal = 0.0;
    std::vector<double> acc_unimodal;
    std::optional<double> modality_ratio;
    std::vector<long> reshape_counts;
};

/// Fraction of samples whose argmax matches the label; argmax ties break
/// to the lowest class index. Rejects empty or misaligned input.
double accuracy(const std::vector<LabelDistribution>& predicted,
                const std::vector<LabelDistribution>& labels);

/// Plain quotient; nullopt (reported as "undefined") when the denominator
/// is zero.
std::optional<double> modality_ratio(double acc_strong_axis, double acc_weak_axis);

/// Active-flag totals per modality.
std::vector<long> reshape_counts(const std::vector<ReshapeDecision>& decisions,
                                 std::size_t modalities);

/// counts[true_class][cls] = appearances of cls among the top-k predictions
/// of samples whose ground truth is true_class. Top-k ties break toward
/// lower class indices.
std::vector<std::vector<long>> topk_class_frequency(
    const std::vector<LabelDistribution>& predicted, const std::vector<LabelDistribution>& labels,
    std::size_t k);

enum class ExportFormat { Csv, Json };

/// Fixed column layout, period decimal separator, floats at 6 significant
/// digits: byte-stable across runs for golden-file comparisons.
void export_rows(const std::vector<MetricsRow>& rows, const std::filesystem::path& path,
                 ExportFormat format);

void export_topk(const std::vector<std::vector<long>>& table, const std::filesystem::path& path);

/// Locale-independent formatting, 6 significant digits.
std::string format_double(double v);

std::string metrics_csv_header(std::size_t modalities);
std::string metrics_csv_row(const MetricsRow& row);

}  // namespace bmlr
