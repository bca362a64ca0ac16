#include "bmlr/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace bmlr {

double accuracy(const std::vector<LabelDistribution>& predicted,
                const std::vector<LabelDistribution>& labels) {
    if (predicted.empty() || predicted.size() != labels.size()) {
        throw std::invalid_argument("accuracy: need aligned, non-empty predictions and labels");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i].argmax() == labels[i].hot_index()) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

std::optional<double> modality_ratio(double acc_strong_axis, double acc_weak_axis) {
    if (acc_weak_axis <= 0.0) {
        return std::nullopt;
    }
    return acc_strong_axis / acc_weak_axis;
}

std::vector<long> reshape_counts(const std::vector<ReshapeDecision>& decisions,
                                 std::size_t modalities) {
    std::vector<long> counts(modalities, 0);
    for (const ReshapeDecision& d : decisions) {
        for (std::size_t u = 0; u < std::min(modalities, d.modalities.size()); ++u) {
            if (d.modalities[u].active) ++counts[u];
        }
    }
    return counts;
}

std::vector<std::vector<long>> topk_class_frequency(
    const std::vector<LabelDistribution>& predicted, const std::vector<LabelDistribution>& labels,
    std::size_t k) {
    if (predicted.empty() || predicted.size() != labels.size()) {
        throw std::invalid_argument("topk_class_frequency: need aligned, non-empty input");
    }
    const std::size_t classes = predicted[0].size();
    if (k == 0 || k > classes) {
        throw std::invalid_argument("topk_class_frequency: k must lie in [1, C]");
    }
    std::vector<std::vector<long>> table(classes, std::vector<long>(classes, 0));
    std::vector<std::size_t> order(classes);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return predicted[i][a] > predicted[i][b];
        });
        const std::size_t truth = labels[i].hot_index();
        for (std::size_t j = 0; j < k; ++j) table[truth][order[j]] += 1;
    }
    return table;
}

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

std::string metrics_csv_header(std::size_t modalities) {
    std::string h = "epoch,loss_multimodal";
    for (std::size_t u = 0; u < modalities; ++u) h += ",loss_m" + std::to_string(u);
    h += ",acc_multimodal";
    for (std::size_t u = 0; u < modalities; ++u) h += ",acc_m" + std::to_string(u);
    h += ",ratio_m0_over_m1";
    for (std::size_t u = 0; u < modalities; ++u) h += ",reshape_count_m" + std::to_string(u);
    return h;
}

std::string metrics_csv_row(const MetricsRow& row) {
    std::string line = std::to_string(row.epoch);
    line += "," + format_double(row.loss_multimodal);
    for (double l : row.loss_unimodal) line += "," + format_double(l);
    line += "," + format_double(row.acc_multimodal);
    for (double a : row.acc_unimodal) line += "," + format_double(a);
    line += ",";
    line += row.modality_ratio ? format_double(*row.modality_ratio) : "undefined";
    for (long c : row.reshape_counts) line += "," + std::to_string(c);
    return line;
}

void export_rows(const std::vector<MetricsRow>& rows, const std::filesystem::path& path,
                 ExportFormat format) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("export: cannot open '" + path.string() + "' for writing");
    }
    const std::size_t modalities = rows.empty() ? 2 : rows[0].loss_unimodal.size();
    if (format == ExportFormat::Csv) {
        out << metrics_csv_header(modalities) << '\n';
        for (const MetricsRow& row : rows) out << metrics_csv_row(row) << '\n';
    } else {
        out << "[";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const MetricsRow& r = rows[i];
            out << (i ? ",\n " : "\n ");
            out << "{\"epoch\":" << r.epoch;
            out << ",\"loss_multimodal\":" << format_double(r.loss_multimodal);
            out << ",\"loss_unimodal\":[";
            for (std::size_t u = 0; u < r.loss_unimodal.size(); ++u) {
                out << (u ? "," : "") << format_double(r.loss_unimodal[u]);
            }
            out << "],\"acc_multimodal\":" << format_double(r.acc_multimodal);
            out << ",\"acc_unimodal\":[";
            for (std::size_t u = 0; u < r.acc_unimodal.size(); ++u) {
                out << (u ? "," : "") << format_double(r.acc_unimodal[u]);
            }
            out << "],\"ratio_m0_over_m1\":";
            if (r.modality_ratio) {
                out << format_double(*r.modality_ratio);
            } else {
                out << "null";
            }
            out << ",\"reshape_counts\":[";
            for (std::size_t u = 0; u < r.reshape_counts.size(); ++u) {
                out << (u ? "," : "") << r.reshape_counts[u];
            }
            out << "]}";
        }
        out << (rows.empty() ? "]" : "\n]") << '\n';
    }
    if (!out) {
        throw std::runtime_error("export: write failed for '" + path.string() + "'");
    }
}

void export_topk(const std::vector<std::vector<long>>& table,
                 const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("export_topk: cannot open '" + path.string() + "' for writing");
    }
    out << "true_class,predicted_class,count\n";
    for (std::size_t t = 0; t < table.size(); ++t) {
        for (std::size_t p = 0; p < table[t].size(); ++p) {
            out << t << ',' << p << ',' << table[t][p] << '\n';
        }
    }
    if (!out) {
        throw std::runtime_error("export_topk: write failed for '" + path.string() + "'");
    }
}

}  // namespace bmlr
