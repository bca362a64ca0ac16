#pragma once

#include <cstddef>
#include <vector>

namespace bmlr {

using Vector = std::vector<double>;

/// Row-major dense matrix of doubles. All kernels in this project are
/// desk-scale, so clarity beats blocking/vectorization tricks.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, Vector data);

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Vector& data() { return data_; }
    const Vector& data() const { return data_; }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vector data_;
};

// y = W x
Vector matvec(const DenseMatrix& w, const Vector& x);
// y = W^T x
Vector matvec_transpose(const DenseMatrix& w, const Vector& x);
// W += u x^T
void add_outer(DenseMatrix& w, const Vector& u, const Vector& x);

void add_scaled(Vector& dst, const Vector& src, double scale = 1.0);
double dot(const Vector& a, const Vector& b);

bool all_finite(const Vector& v);
/// Throws std::runtime_error naming the first non-finite index.
void require_finite(const Vector& v, const char* what);

}  // namespace bmlr
