#include "bmlr/dense_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bmlr {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Vector data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument("DenseMatrix: data length " + std::to_string(data_.size()) +
                                    " does not match " + std::to_string(rows_) + "x" +
                                    std::to_string(cols_));
    }
    if (!all_finite()) {
        throw std::invalid_argument("DenseMatrix: non-finite entry in initializer");
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool DenseMatrix::all_finite() const { return bmlr::all_finite(data_); }

Vector matvec(const DenseMatrix& w, const Vector& x) {
    if (w.cols() != x.size()) {
        throw std::invalid_argument("matvec: shape mismatch, W is " + std::to_string(w.rows()) +
                                    "x" + std::to_string(w.cols()) + ", x has length " +
                                    std::to_string(x.size()));
    }
    Vector y(w.rows(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < w.cols(); ++c) acc += w(r, c) * x[c];
        y[r] = acc;
    }
    return y;
}

Vector matvec_transpose(const DenseMatrix& w, const Vector& x) {
    if (w.rows() != x.size()) {
        throw std::invalid_argument("matvec_transpose: shape mismatch, W is " +
                                    std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                                    ", x has length " + std::to_string(x.size()));
    }
    Vector y(w.cols(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        const double xr = x[r];
        for (std::size_t c = 0; c < w.cols(); ++c) y[c] += w(r, c) * xr;
    }
    return y;
}

void add_outer(DenseMatrix& w, const Vector& u, const Vector& x) {
    if (w.rows() != u.size() || w.cols() != x.size()) {
        throw std::invalid_argument("add_outer: shape mismatch");
    }
    for (std::size_t r = 0; r < w.rows(); ++r) {
        const double ur = u[r];
        for (std::size_t c = 0; c < w.cols(); ++c) w(r, c) += ur * x[c];
    }
}

void add_scaled(Vector& dst, const Vector& src, double scale) {
    if (dst.size() != src.size()) {
        throw std::invalid_argument("add_scaled: length mismatch");
    }
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: length mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

bool all_finite(const Vector& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void require_finite(const Vector& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw std::runtime_error(std::string(what) + ": non-finite value at index " +
                                     std::to_string(i));
        }
    }
}

}  // namespace bmlr
