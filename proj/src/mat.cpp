#include "doswap/mat.hpp"

#include <cmath>

namespace doswap {

bool Mat::all_finite() const {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

double Mat::max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

double Mat::frobenius() const {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

Mat Mat::row(int r) const {
    Mat out(1, cols);
    for (int c = 0; c < cols; ++c) out(0, c) = (*this)(r, c);
    return out;
}

Mat Mat::col_as_row(int c) const {
    Mat out(1, rows);
    for (int r = 0; r < rows; ++r) out(0, r) = (*this)(r, c);
    return out;
}

namespace {

inline void matmul_row(const Mat& a, const Mat& b, Mat& out, int i) {
    const int n = a.cols;
    const int p = b.cols;
    for (int j = 0; j < p; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += a(i, k) * b(k, j);
        out(i, j) = acc;
    }
}

}  // namespace

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols != b.rows) throw InvalidInput("matmul: inner dimensions disagree");
    Mat out(a.rows, b.cols);
#pragma omp parallel for schedule(static) if (a.rows > 64)
    for (int i = 0; i < a.rows; ++i) matmul_row(a, b, out, i);
    return out;
}

Mat matmul_reference(const Mat& a, const Mat& b) {
    if (a.cols != b.rows) throw InvalidInput("matmul: inner dimensions disagree");
    Mat out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) matmul_row(a, b, out, i);
    return out;
}

Mat transpose(const Mat& m) {
    Mat out(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) out(j, i) = m(i, j);
    return out;
}

Mat hadamard(const Mat& a, const Mat& b) {
    if (!a.same_shape(b)) throw InvalidInput("hadamard: shape mismatch");
    Mat out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.size(); ++i) out.a[i] = a.a[i] * b.a[i];
    return out;
}

Mat add(const Mat& a, const Mat& b) {
    if (!a.same_shape(b)) throw InvalidInput("add: shape mismatch");
    Mat out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.size(); ++i) out.a[i] = a.a[i] + b.a[i];
    return out;
}

Mat sub(const Mat& a, const Mat& b) {
    if (!a.same_shape(b)) throw InvalidInput("sub: shape mismatch");
    Mat out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.size(); ++i) out.a[i] = a.a[i] - b.a[i];
    return out;
}

Mat scale(const Mat& a, double s) {
    Mat out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.size(); ++i) out.a[i] = a.a[i] * s;
    return out;
}

}  // namespace doswap
