#include "gpseg/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace gpseg {

std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    if (static_cast<int>(a.size()) != n * n)
        throw std::invalid_argument("dense_solve: dimension mismatch");
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
        if (a[p * n + k] == 0.0) throw std::runtime_error("dense_solve: singular matrix");
        if (p != k) {
            for (int j = k; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
            std::swap(b[k], b[p]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double m = a[i * n + k] / a[k * n + k];
            for (int j = k; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
            b[i] -= m * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) b[i] -= a[i * n + j] * b[j];
        b[i] /= a[i * n + i];
    }
    return b;
}

double dense_det(std::vector<double> a, int n) {
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
        if (a[p * n + k] == 0.0) return 0.0;
        if (p != k) {
            for (int j = k; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
            det = -det;
        }
        det *= a[k * n + k];
        for (int i = k + 1; i < n; ++i) {
            const double m = a[i * n + k] / a[k * n + k];
            for (int j = k; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
        }
    }
    return det;
}

std::vector<double> dense_inverse(std::vector<double> a, int n) {
    std::vector<double> inv(n * n, 0.0);
    for (int c = 0; c < n; ++c) {
        std::vector<double> e(n, 0.0);
        e[c] = 1.0;
        auto col = dense_solve(a, e);
        for (int r = 0; r < n; ++r) inv[r * n + c] = col[r];
    }
    return inv;
}

static double norm_inf_rowmajor(const std::vector<double>& a, int n) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += std::abs(a[i * n + j]);
        m = std::max(m, s);
    }
    return m;
}

double dense_cond_inf(const std::vector<double>& a, int n) {
    return norm_inf_rowmajor(a, n) * norm_inf_rowmajor(dense_inverse(a, n), n);
}

}  // namespace gpseg
