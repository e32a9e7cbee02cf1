#include "gpseg/stencil.hpp"

#include <stdexcept>

namespace gpseg {

EndRule end_rule_from_string(const std::string& s) {
    if (s == "one_sided") return EndRule::one_sided;
    if (s == "regularity") return EndRule::regularity;
    throw std::invalid_argument("unknown boundary rule '" + s + "'");
}

std::array<double, 3> d2_centered(const RadialGrid& g, int i) {
    const double hm = g.node(i) - g.node(i - 1);
    const double hp = g.node(i + 1) - g.node(i);
    return {2.0 / (hm * (hm + hp)), -2.0 / (hm * hp), 2.0 / (hp * (hm + hp))};
}

std::array<double, 3> d1_centered(const RadialGrid& g, int i) {
    const double hm = g.node(i) - g.node(i - 1);
    const double hp = g.node(i + 1) - g.node(i);
    return {-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))};
}

std::array<double, 3> d1_onesided(const RadialGrid& g, int i, int s) {
    const double h1 = s * (g.node(i + s) - g.node(i));
    const double h2 = s * (g.node(i + 2 * s) - g.node(i + s));
    const double c0 = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
    const double c1 = (h1 + h2) / (h1 * h2);
    const double c2 = -h1 / (h2 * (h1 + h2));
    return {s * c0, s * c1, s * c2};
}

std::array<double, 3> d2_onesided(const RadialGrid& g, int i, int s) {
    const double h1 = s * (g.node(i + s) - g.node(i));
    const double h2 = s * (g.node(i + 2 * s) - g.node(i + s));
    return {2.0 / (h1 * (h1 + h2)), -2.0 / (h1 * h2), 2.0 / (h2 * (h1 + h2))};
}

int laplacian_row(const RadialGrid& g, int i, const LaplacianBc& bc,
                  std::array<double, 3>& out) {
    const int n = g.size();
    const int N = g.dim();
    if (n < 3) throw std::invalid_argument("laplacian_row: grid needs >= 3 nodes");

    if (i > 0 && i < n - 1) {
        const auto d2 = d2_centered(g, i);
        const auto d1 = d1_centered(g, i);
        const double c = (N - 1) / g.node(i);
        for (int k = 0; k < 3; ++k) out[k] = d2[k] + c * d1[k];
        return i - 1;
    }

    if (i == 0) {
        if (bc.inner == EndRule::regularity) {
            if (g.a() != 0.0)
                throw std::invalid_argument("regularity rule requires a = 0");
            // ghost-symmetric: u'(0)=0, Delta u(0) = N u''(0) = 2N (u1-u0)/h^2
            const double h = g.node(1) - g.node(0);
            out = {-2.0 * N / (h * h), 2.0 * N / (h * h), 0.0};
            return 0;
        }
        if (g.a() == 0.0 && N != 1)
            throw std::invalid_argument("one-sided rule at r = 0 requires N = 1");
        const auto d2 = d2_onesided(g, 0, +1);
        const auto d1 = d1_onesided(g, 0, +1);
        const double c = (N == 1) ? 0.0 : (N - 1) / g.node(0);
        for (int k = 0; k < 3; ++k) out[k] = d2[k] + c * d1[k];
        return 0;
    }

    // outer end
    if (bc.outer == EndRule::regularity)
        throw std::invalid_argument("regularity rule only applies at r = 0");
    const auto d2 = d2_onesided(g, n - 1, -1);
    const auto d1 = d1_onesided(g, n - 1, -1);
    const double c = (N - 1) / g.node(n - 1);
    // one-sided arrays are ordered {i, i-1, i-2}; flip to {i-2, i-1, i}
    out = {d2[2] + c * d1[2], d2[1] + c * d1[1], d2[0] + c * d1[0]};
    return n - 3;
}

GridFunction radial_laplacian(const GridFunction& u, const LaplacianBc& bc) {
    u.validate();
    const RadialGrid& g = *u.grid;
    GridFunction out(u.grid, 0.0);
    for (int i = 0; i < g.size(); ++i)
        out[i] = laplacian_apply(g, u.values, i, bc);
    return out;
}

}  // namespace gpseg
