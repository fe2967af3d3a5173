#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ctdrl {

using Vec = std::vector<double>;

// Dense row-major matrix. Everything in this library is tiny (state
// dimension <= 3, a few hundred basis coefficients at most), so a flat
// vector with bounds left to the caller is all we need.
struct Mat {
    int rows = 0;
    int cols = 0;
    Vec data;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// y = A x
inline Vec matvec(const Mat& a, const Vec& x) {
    if (static_cast<int>(x.size()) != a.cols) throw std::invalid_argument("matvec: size mismatch");
    Vec y(static_cast<std::size_t>(a.rows), 0.0);
    for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

// Tr(S^T M S) for M (d x d) and S (d x m): sum over columns c of S_c^T M S_c.
inline double trace_quadratic(const Mat& sigma, const Mat& m) {
    if (sigma.rows != m.rows || m.rows != m.cols) throw std::invalid_argument("trace_quadratic: shape mismatch");
    double tr = 0.0;
    for (int c = 0; c < sigma.cols; ++c) {
        for (int i = 0; i < m.rows; ++i) {
            for (int j = 0; j < m.cols; ++j) {
                tr += sigma(i, c) * m(i, j) * sigma(j, c);
            }
        }
    }
    return tr;
}

}  // namespace ctdrl
