#include "bmlr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bmlr/rng.hpp"

namespace bmlr {

void SyntheticSpec::validate() const {
    if (classes < 2) {
        throw std::invalid_argument("SyntheticSpec: need at least two classes");
    }
    if (samples_per_class < 2) {
        throw std::invalid_argument("SyntheticSpec: need at least two samples per class");
    }
    if (feature_dims.size() < 2 || feature_dims.size() != separations.size()) {
        throw std::invalid_argument(
            "SyntheticSpec: feature_dims and separations must list >= 2 modalities");
    }
    for (std::size_t d : feature_dims) {
        if (d == 0) throw std::invalid_argument("SyntheticSpec: zero feature dim");
    }
    for (double s : separations) {
        if (!(s >= 0.0)) throw std::invalid_argument("SyntheticSpec: separation must be >= 0");
    }
    if (!(exclusive_fraction >= 0.0 && exclusive_fraction <= 1.0)) {
        throw std::invalid_argument("SyntheticSpec: exclusive_fraction must lie in [0, 1]");
    }
    if (!(label_noise >= 0.0 && label_noise < 0.5)) {
        throw std::invalid_argument("SyntheticSpec: label_noise must lie in [0, 0.5)");
    }
}

std::vector<const Sample*> Dataset::split(Split which) const {
    std::vector<const Sample*> out;
    for (const Sample& s : samples) {
        if (s.split == which) out.push_back(&s);
    }
    return out;
}

bool operator==(const Sample& a, const Sample& b) {
    return a.label == b.label && a.split == b.split && a.inputs == b.inputs;
}

bool operator==(const Dataset& a, const Dataset& b) {
    return a.classes == b.classes && a.feature_dims == b.feature_dims && a.samples == b.samples;
}

namespace {

// C mutually equidistant points: centered one-hot vertices in R^C, pairwise
// distance sqrt(2), then scaled so the pairwise distance equals `separation`.
std::vector<Vector> simplex_vertices(std::size_t classes, double separation) {
    const double scale = separation / std::sqrt(2.0);
    const double center = 1.0 / static_cast<double>(classes);
    std::vector<Vector> vertices(classes, Vector(classes, 0.0));
    for (std::size_t k = 0; k < classes; ++k) {
        for (std::size_t j = 0; j < classes; ++j) {
            vertices[k][j] = scale * ((k == j ? 1.0 : 0.0) - center);
        }
    }
    return vertices;
}

// Orthonormal columns (Gram-Schmidt on a seeded Gaussian matrix), used when
// the feature dim cannot hold the full simplex.
std::vector<Vector> random_orthonormal_columns(std::size_t rows, std::size_t cols, Rng& rng) {
    std::vector<Vector> q;
    for (std::size_t c = 0; c < cols; ++c) {
        Vector v(rows);
        for (double& x : v) x = rng.gaussian();
        for (const Vector& prev : q) {
            const double proj = dot(prev, v);
            add_scaled(v, prev, -proj);
        }
        double norm = std::sqrt(dot(v, v));
        if (norm < 1e-12) {
            // Degenerate draw; retry deterministically from the stream.
            --c;
            continue;
        }
        for (double& x : v) x /= norm;
        q.push_back(std::move(v));
    }
    return q;
}

std::vector<Vector> class_means(std::size_t classes, std::size_t dim, double separation,
                                Rng& rng) {
    std::vector<Vector> vertices = simplex_vertices(classes, separation);
    std::vector<Vector> means(classes, Vector(dim, 0.0));
    if (dim >= classes) {
        for (std::size_t k = 0; k < classes; ++k) {
            std::copy(vertices[k].begin(), vertices[k].end(), means[k].begin());
        }
        return means;
    }
    // Fallback: project the C-dimensional vertices onto `dim` random
    // orthonormal directions. Equidistance is only approximate here.
    std::vector<Vector> q = random_orthonormal_columns(classes, dim, rng);
    for (std::size_t k = 0; k < classes; ++k) {
        for (std::size_t c = 0; c < dim; ++c) means[k][c] = dot(q[c], vertices[k]);
    }
    return means;
}

}  // namespace

Dataset generate(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t m = spec.feature_dims.size();
    Rng rng = Rng(spec.seed).child(0x64617461);  // data stream

    std::vector<std::vector<Vector>> means(m);
    for (std::size_t u = 0; u < m; ++u) {
        means[u] = class_means(spec.classes, spec.feature_dims[u], spec.separations[u], rng);
    }

    Dataset ds;
    ds.classes = spec.classes;
    ds.feature_dims = spec.feature_dims;

    const std::size_t n = spec.samples_per_class;
    const auto n_test = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(0.1 * static_cast<double>(n))));
    const std::size_t n_train = n - n_test;

    for (std::size_t k = 0; k < spec.classes; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            Sample s;
            s.split = i < n_train ? Split::Train : Split::Test;
            for (std::size_t u = 0; u < m; ++u) {
                Vector x = means[u][k];
                for (double& v : x) v += rng.gaussian();
                s.inputs.push_back(std::move(x));
            }
            if (spec.exclusive_fraction > 0.0 && rng.uniform() < spec.exclusive_fraction) {
                // Resample one modality from the class-marginal mixture so it
                // carries no information about the true class.
                const std::size_t u = rng.index(m);
                const std::size_t other_class = rng.index(spec.classes);
                Vector x = means[u][other_class];
                for (double& v : x) v += rng.gaussian();
                s.inputs[u] = std::move(x);
            }
            s.label = k;
            if (spec.label_noise > 0.0 && rng.uniform() < spec.label_noise) {
                const std::size_t shift = 1 + rng.index(spec.classes - 1);
                s.label = (k + shift) % spec.classes;
            }
            ds.samples.push_back(std::move(s));
        }
    }
    return ds;
}

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

double parse_double(const std::string& field, std::size_t line_no, std::size_t field_no) {
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw std::runtime_error("dataset load: line " + std::to_string(line_no) + ", field " +
                                 std::to_string(field_no) + ": cannot parse '" + field +
                                 "' as a number");
    }
    return v;
}

}  // namespace

void save(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("dataset save: cannot open '" + path.string() + "' for writing");
    }
    std::string line = "BMLR-DATA-1," + std::to_string(dataset.classes) + ",";
    for (std::size_t u = 0; u < dataset.feature_dims.size(); ++u) {
        if (u) line.push_back(';');
        line += std::to_string(dataset.feature_dims[u]);
    }
    out << line << '\n';
    for (const Sample& s : dataset.samples) {
        line.clear();
        line += s.split == Split::Train ? "train" : "test";
        line.push_back(',');
        line += std::to_string(s.label);
        for (const Vector& x : s.inputs) {
            for (double v : x) {
                line.push_back(',');
                append_double(line, v);
            }
        }
        out << line << '\n';
    }
    if (!out) {
        throw std::runtime_error("dataset save: write failed for '" + path.string() + "'");
    }
}

Dataset load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("dataset load: cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("dataset load: '" + path.string() + "' is empty");
    }
    std::vector<std::string> header = split_fields(line);
    if (header.size() != 3 || header[0] != "BMLR-DATA-1") {
        throw std::runtime_error("dataset load: '" + path.string() +
                                 "' does not start with a BMLR-DATA-1 header");
    }
    Dataset ds;
    ds.classes = static_cast<std::size_t>(parse_double(header[1], 1, 2));
    if (ds.classes < 2) {
        throw std::runtime_error("dataset load: header declares fewer than two classes");
    }
    {
        std::stringstream dims(header[2]);
        std::string tok;
        while (std::getline(dims, tok, ';')) {
            const auto d = static_cast<std::size_t>(parse_double(tok, 1, 3));
            if (d == 0) throw std::runtime_error("dataset load: header declares a zero dim");
            ds.feature_dims.push_back(d);
        }
    }
    if (ds.feature_dims.size() < 2) {
        throw std::runtime_error("dataset load: header declares fewer than two modalities");
    }
    std::size_t total_dims = 0;
    for (std::size_t d : ds.feature_dims) total_dims += d;
    const std::size_t expected_fields = 2 + total_dims;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() != expected_fields) {
            throw std::runtime_error(
                "dataset load: line " + std::to_string(line_no) + ": expected " +
                std::to_string(expected_fields) + " fields, got " + std::to_string(fields.size()) +
                " (last valid record: " + std::to_string(ds.samples.size()) + ")");
        }
        Sample s;
        if (fields[0] == "train") {
            s.split = Split::Train;
        } else if (fields[0] == "test") {
            s.split = Split::Test;
        } else {
            throw std::runtime_error("dataset load: line " + std::to_string(line_no) +
                                     ": unknown split '" + fields[0] + "'");
        }
        const auto label = static_cast<std::size_t>(parse_double(fields[1], line_no, 2));
        if (label >= ds.classes) {
            throw std::runtime_error("dataset load: line " + std::to_string(line_no) +
                                     ": label out of range");
        }
        s.label = label;
        std::size_t f = 2;
        for (std::size_t d : ds.feature_dims) {
            Vector x(d);
            for (std::size_t i = 0; i < d; ++i, ++f) {
                x[i] = parse_double(fields[f], line_no, f + 1);
                if (!std::isfinite(x[i])) {
                    throw std::runtime_error("dataset load: line " + std::to_string(line_no) +
                                             ": non-finite feature");
                }
            }
            s.inputs.push_back(std::move(x));
        }
        ds.samples.push_back(std::move(s));
    }
    if (ds.samples.empty()) {
        throw std::runtime_error("dataset load: '" + path.string() + "' holds no samples");
    }
    return ds;
}

}  // namespace bmlr
