#pragma once

#include <cstddef>
#include <vector>

namespace gpseg {

/// General banded matrix with kl sub- and ku super-diagonals, LAPACK-style
/// band storage (kl extra rows reserved for LU fill-in).
class BandMatrix {
public:
    BandMatrix(int n, int kl, int ku);

    int n() const { return n_; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }

    bool in_band(int i, int j) const {
        return i >= 0 && j >= 0 && i < n_ && j < n_ && j - i <= ku_ && i - j <= kl_;
    }

    double& at(int i, int j);
    double at(int i, int j) const;

    /// Accumulate into entry (i, j); throws if outside the band.
    void add(int i, int j, double v);

    std::vector<double> multiply(const std::vector<double>& x) const;

    /// b - A x accumulated in long double (for iterative refinement).
    std::vector<long double> residual_hp(const std::vector<long double>& x,
                                         const std::vector<double>& b) const;

    /// Infinity norm (max absolute row sum).
    double norm_inf() const;

private:
    friend class BandLU;
    int n_, kl_, ku_, ld_;
    std::vector<double> ab_;  // ab_[band_row + ld_*j], band_row = kl + ku + i - j
};

/// LU factorization with partial pivoting of a banded matrix.
class BandLU {
public:
    explicit BandLU(BandMatrix a);  // factors in place of the copy

    std::vector<double> solve(const std::vector<double>& b) const;

    /// Solve with the transposed matrix (same factorization).
    std::vector<double> solve_transposed(const std::vector<double>& b) const;

    double min_pivot() const { return min_pivot_; }
    int min_pivot_row() const { return min_pivot_row_; }

private:
    BandMatrix a_;
    std::vector<int> piv_;
    double min_pivot_ = 0.0;
    int min_pivot_row_ = -1;
};

}  // namespace gpseg
