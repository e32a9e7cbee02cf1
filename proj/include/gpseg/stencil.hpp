#pragma once

#include <array>
#include <string>

#include "gpseg/grid.hpp"

namespace gpseg {

/// How the endpoints of the radial Laplacian are closed.
///   one_sided  - evaluate u'' + (N-1)/r u' with one-sided 3-point stencils
///   regularity - r = 0 only: u'(0) = 0 by symmetry, Delta u(0) = N u''(0)
enum class EndRule { one_sided, regularity };

struct LaplacianBc {
    EndRule inner = EndRule::one_sided;
    EndRule outer = EndRule::one_sided;
};

EndRule end_rule_from_string(const std::string& s);

/// Centered 3-point coefficients for u'' at interior node i (nodes i-1,i,i+1).
/// Exact on quadratics for any spacing.
std::array<double, 3> d2_centered(const RadialGrid& g, int i);

/// Centered 3-point coefficients for u' at interior node i.
std::array<double, 3> d1_centered(const RadialGrid& g, int i);

/// One-sided 3-point coefficients for u' / u'' at node i using nodes
/// i, i+s, i+2s with s = +1 (left end) or s = -1 (right end).
std::array<double, 3> d1_onesided(const RadialGrid& g, int i, int s);
std::array<double, 3> d2_onesided(const RadialGrid& g, int i, int s);

/// Coefficients of the discrete radial Laplacian row at node i, written to
/// out[0..2] over nodes {i-1, i, i+1} (interior), {i, i+1, i+2} (inner end)
/// or {i-2, i-1, i} (outer end). Returns the offset of the first node.
int laplacian_row(const RadialGrid& g, int i, const LaplacianBc& bc,
                  std::array<double, 3>& out);

/// Discrete Delta u = u'' + (N-1)/r u' on u's grid. Second-order accurate on
/// interior nodes; endpoint rows per bc.
GridFunction radial_laplacian(const GridFunction& u, const LaplacianBc& bc);

/// Apply a zero-sum 3-point stencil in differenced form,
///   sum_k c_k u_k = sum_{k != anchor} c_k (u_k - u_anchor),
/// which cuts the rounding floor from eps |u|/h^2 to eps |u'|/h.
template <class S, class T>
T apply_zero_sum(const std::array<S, 3>& c, T u0, T u1, T u2, int anchor) {
    const T u[3] = {u0, u1, u2};
    T s = 0;
    for (int k = 0; k < 3; ++k)
        if (k != anchor) s += static_cast<T>(c[k]) * (u[k] - u[anchor]);
    return s;
}

/// Laplacian row coefficients computed in scalar type T (the residual floor
/// carries the coefficient precision as eps_T |u'| / h).
template <class T>
int laplacian_row_t(const RadialGrid& g, int i, const LaplacianBc& bc,
                    std::array<T, 3>& out) {
    std::array<double, 3> probe{};
    const int j0 = laplacian_row(g, i, bc, probe);  // validates i/bc
    const int N = g.dim();
    if (i == 0 && bc.inner == EndRule::regularity) {
        const T h = static_cast<T>(g.node(1)) - static_cast<T>(g.node(0));
        out = {T(-2.0 * N) / (h * h), T(2.0 * N) / (h * h), T(0)};
        return 0;
    }
    const T ra = static_cast<T>(g.node(j0)), rb = static_cast<T>(g.node(j0 + 1)),
            rc = static_cast<T>(g.node(j0 + 2));
    const T ri = static_cast<T>(g.node(i));
    const T cc = (N == 1) ? T(0) : T(N - 1) / ri;
    // Lagrange derivatives of the quadratic through (ra, rb, rc) at r_i
    const T xa = ra - ri, xb = rb - ri, xc = rc - ri;
    const T d2a = T(2) / ((xa - xb) * (xa - xc));
    const T d2b = T(2) / ((xb - xa) * (xb - xc));
    const T d2c = T(2) / ((xc - xa) * (xc - xb));
    const T d1a = -(xb + xc) / ((xa - xb) * (xa - xc));
    const T d1b = -(xa + xc) / ((xb - xa) * (xb - xc));
    const T d1c = -(xa + xb) / ((xc - xa) * (xc - xb));
    out = {d2a + cc * d1a, d2b + cc * d1b, d2c + cc * d1c};
    return j0;
}

/// Differenced evaluation of the Laplacian row at node i. The long double
/// instantiation backs the high-precision residual path of the stiff solvers.
template <class T>
T laplacian_apply_t(const RadialGrid& g, const std::vector<T>& u, int i,
                    const LaplacianBc& bc) {
    std::array<T, 3> c{};
    const int j0 = laplacian_row_t<T>(g, i, bc, c);
    return apply_zero_sum<T, T>(c, u[j0], u[j0 + 1], u[j0 + 2], i - j0);
}

inline double laplacian_apply(const RadialGrid& g, const std::vector<double>& u,
                              int i, const LaplacianBc& bc) {
    std::array<double, 3> c{};
    const int j0 = laplacian_row(g, i, bc, c);
    return apply_zero_sum<double, double>(c, u[j0], u[j0 + 1], u[j0 + 2], i - j0);
}

}  // namespace gpseg
