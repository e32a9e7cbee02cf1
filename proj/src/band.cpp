#include "gpseg/band.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gpseg {

BandMatrix::BandMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku) {
    if (n < 1 || kl < 0 || ku < 0)
        throw std::invalid_argument("BandMatrix: bad dimensions");
    ld_ = 2 * kl_ + ku_ + 1;
    ab_.assign(static_cast<size_t>(ld_) * n_, 0.0);
}

double& BandMatrix::at(int i, int j) {
    if (!in_band(i, j))
        throw std::out_of_range("BandMatrix::at(" + std::to_string(i) + "," +
                                std::to_string(j) + ") outside band");
    return ab_[static_cast<size_t>(kl_ + ku_ + i - j) + static_cast<size_t>(ld_) * j];
}

double BandMatrix::at(int i, int j) const {
    if (!in_band(i, j)) return 0.0;
    return ab_[static_cast<size_t>(kl_ + ku_ + i - j) + static_cast<size_t>(ld_) * j];
}

void BandMatrix::add(int i, int j, double v) { at(i, j) += v; }

std::vector<double> BandMatrix::multiply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("BandMatrix::multiply: size mismatch");
    std::vector<double> y(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
        const int ilo = std::max(0, j - ku_);
        const int ihi = std::min(n_ - 1, j + kl_);
        for (int i = ilo; i <= ihi; ++i)
            y[i] += ab_[static_cast<size_t>(kl_ + ku_ + i - j) + static_cast<size_t>(ld_) * j] * x[j];
    }
    return y;
}

std::vector<long double> BandMatrix::residual_hp(const std::vector<long double>& x,
                                                 const std::vector<double>& b) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(b.size()) != n_)
        throw std::invalid_argument("BandMatrix::residual_hp: size mismatch");
    std::vector<long double> r(b.begin(), b.end());
    for (int j = 0; j < n_; ++j) {
        const int ilo = std::max(0, j - ku_);
        const int ihi = std::min(n_ - 1, j + kl_);
        for (int i = ilo; i <= ihi; ++i)
            r[i] -= static_cast<long double>(
                        ab_[static_cast<size_t>(kl_ + ku_ + i - j) + static_cast<size_t>(ld_) * j]) *
                    x[j];
    }
    return r;
}

double BandMatrix::norm_inf() const {
    std::vector<double> rowsum(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
        const int ilo = std::max(0, j - ku_);
        const int ihi = std::min(n_ - 1, j + kl_);
        for (int i = ilo; i <= ihi; ++i)
            rowsum[i] += std::abs(ab_[static_cast<size_t>(kl_ + ku_ + i - j) + static_cast<size_t>(ld_) * j]);
    }
    return *std::max_element(rowsum.begin(), rowsum.end());
}

// Banded LU with partial pivoting, following the classic GBTRF layout:
// after factorization, U occupies band rows 0..kl+ku and the multipliers
// occupy rows kl+ku+1..2kl+ku of the storage.
BandLU::BandLU(BandMatrix a) : a_(std::move(a)), piv_(a_.n_) {
    const int n = a_.n_, kl = a_.kl_, ku = a_.ku_, ld = a_.ld_;
    auto entry = [&](int band_row, int col) -> double& {
        return a_.ab_[static_cast<size_t>(band_row) + static_cast<size_t>(ld) * col];
    };
    min_pivot_ = std::numeric_limits<double>::infinity();
    const int kv = kl + ku;  // band row of the diagonal
    for (int j = 0; j < n; ++j) {
        // pivot search in column j, rows j..min(n-1, j+kl)
        const int pmax = std::min(kl, n - 1 - j);
        int p = 0;
        double pval = std::abs(entry(kv, j));
        for (int i = 1; i <= pmax; ++i) {
            const double v = std::abs(entry(kv + i, j));
            if (v > pval) { pval = v; p = i; }
        }
        piv_[j] = j + p;
        if (pval < min_pivot_) { min_pivot_ = pval; min_pivot_row_ = j; }
        if (pval == 0.0)
            throw std::runtime_error("BandLU: exactly singular at pivot row " + std::to_string(j));
        // swap rows j and j+p across columns j..min(n-1, j+kv)
        if (p != 0) {
            const int jhi = std::min(n - 1, j + kv);
            for (int c = j; c <= jhi; ++c)
                std::swap(entry(kv + (j - c), c), entry(kv + (j + p - c), c));
        }
        // eliminate
        const double piv = entry(kv, j);
        for (int i = 1; i <= pmax; ++i) {
            const double m = entry(kv + i, j) / piv;
            entry(kv + i, j) = m;
            const int jhi = std::min(n - 1, j + kv);
            for (int c = j + 1; c <= jhi; ++c)
                entry(kv + (j + i - c), c) -= m * entry(kv + (j - c), c);
        }
    }
}

std::vector<double> BandLU::solve(const std::vector<double>& b) const {
    const int n = a_.n_, kl = a_.kl_, ku = a_.ku_, ld = a_.ld_;
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("BandLU::solve: size mismatch");
    auto entry = [&](int band_row, int col) -> double {
        return a_.ab_[static_cast<size_t>(band_row) + static_cast<size_t>(ld) * col];
    };
    const int kv = kl + ku;
    std::vector<double> x = b;
    // forward: apply P and L
    for (int j = 0; j < n; ++j) {
        if (piv_[j] != j) std::swap(x[j], x[piv_[j]]);
        const int imax = std::min(n - 1, j + kl);
        for (int i = j + 1; i <= imax; ++i)
            x[i] -= entry(kv + i - j, j) * x[j];
    }
    // back substitution with U
    for (int i = n - 1; i >= 0; --i) {
        const int jhi = std::min(n - 1, i + kv);
        for (int j = i + 1; j <= jhi; ++j)
            x[i] -= entry(kv + i - j, j) * x[j];
        x[i] /= entry(kv, i);
    }
    return x;
}

std::vector<double> BandLU::solve_transposed(const std::vector<double>& b) const {
    // PA = LU  =>  A^T x = b  <=>  U^T L^T P x = b
    const int n = a_.n_, kl = a_.kl_, ku = a_.ku_, ld = a_.ld_;
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("BandLU::solve_transposed: size mismatch");
    auto entry = [&](int band_row, int col) -> double {
        return a_.ab_[static_cast<size_t>(band_row) + static_cast<size_t>(ld) * col];
    };
    const int kv = kl + ku;
    std::vector<double> x = b;
    // solve U^T y = b (forward, U^T is lower triangular)
    for (int i = 0; i < n; ++i) {
        const int jlo = std::max(0, i - kv);
        for (int j = jlo; j < i; ++j)
            x[i] -= entry(kv + j - i, i) * x[j];
        x[i] /= entry(kv, i);
    }
    // solve L^T z = y (backward), then x = P^T z
    for (int j = n - 1; j >= 0; --j) {
        const int imax = std::min(n - 1, j + kl);
        for (int i = j + 1; i <= imax; ++i)
            x[j] -= entry(kv + i - j, j) * x[i];
        if (piv_[j] != j) std::swap(x[j], x[piv_[j]]);
    }
    return x;
}

}  // namespace gpseg
