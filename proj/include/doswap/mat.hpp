#pragma once

#include <cstddef>
#include <vector>

#include "doswap/common.hpp"

namespace doswap {

// Dense row-major matrix of doubles. Everything in this project is small
// (node counts <= 64, batches of a few thousand rows), so the priority is
// predictable arithmetic order: the parallel kernels below compute each
// output row exactly as the serial reference does, making results
// bit-identical at any thread count.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0)
        : rows(r), cols(c), a(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {
        if (r < 0 || c < 0) throw InvalidInput("matrix dimensions must be non-negative");
    }

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

    std::size_t size() const { return a.size(); }
    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

    static Mat identity(int d) {
        Mat m(d, d);
        for (int i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }

    bool all_finite() const;
    double max_abs() const;
    double frobenius() const;

    Mat row(int r) const;          // 1 x cols view copy
    Mat col_as_row(int c) const;   // 1 x rows copy of a column
};

// Production kernel: OpenMP over output rows.
Mat matmul(const Mat& a, const Mat& b);
// Serial reference, kept for tests and the benchmark lane. Must produce
// bit-identical output to matmul().
Mat matmul_reference(const Mat& a, const Mat& b);

Mat transpose(const Mat& m);
Mat hadamard(const Mat& a, const Mat& b);
Mat add(const Mat& a, const Mat& b);
Mat sub(const Mat& a, const Mat& b);
Mat scale(const Mat& a, double s);

}  // namespace doswap
