#pragma once

#include <vector>

namespace gpseg {

/// Solve a small dense system A x = b (row-major A, n = b.size()) by
/// Gaussian elimination with partial pivoting. Intended for n <= ~16.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b);

/// Determinant of a small dense row-major matrix.
double dense_det(std::vector<double> a, int n);

/// Inverse of a small dense row-major matrix.
std::vector<double> dense_inverse(std::vector<double> a, int n);

/// Infinity-norm condition number estimate via the explicit inverse.
double dense_cond_inf(const std::vector<double>& a, int n);

}  // namespace gpseg
