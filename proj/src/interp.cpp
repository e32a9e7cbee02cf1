#include "gpseg/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpseg/dense.hpp"

namespace gpseg {

double poly_interp(const std::vector<double>& nodes, const std::vector<double>& values,
                   double x, int order) {
    if (order < 0 || order > 3)
        throw std::invalid_argument("poly_interp: order must be 0..3");
    const int n = static_cast<int>(nodes.size());
    if (n < 5 || values.size() != nodes.size())
        throw std::invalid_argument("poly_interp: need >= 5 matching nodes");
    const double tol = 1e-12 * (nodes.back() - nodes.front());
    if (x < nodes.front() - tol || x > nodes.back() + tol)
        throw std::out_of_range("poly_interp: x outside span");
    x = std::clamp(x, nodes.front(), nodes.back());

    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    int j0 = std::clamp(static_cast<int>(it - nodes.begin()) - 3, 0, n - 5);

    double scale = 0.0;
    for (int k = 0; k < 5; ++k) scale = std::max(scale, std::abs(nodes[j0 + k] - x));
    std::vector<double> vmat(25), rhs(5);
    for (int k = 0; k < 5; ++k) {
        const double z = (nodes[j0 + k] - x) / scale;
        double p = 1.0;
        for (int m = 0; m < 5; ++m) {
            vmat[k * 5 + m] = p;
            p *= z;
        }
        rhs[k] = values[j0 + k];
    }
    const auto coeff = dense_solve(std::move(vmat), std::move(rhs));
    static const double factorial[4] = {1.0, 1.0, 2.0, 6.0};
    return coeff[order] * factorial[order] / std::pow(scale, order);
}

double interp_and_derivatives(const GridFunction& u, double r, int order) {
    const RadialGrid& g = *u.grid;
    if (g.size() < 5)
        throw std::invalid_argument("interp_and_derivatives: need >= 5 nodes");
    if (order == 0) {
        const double tol = 1e-12 * (g.b() - g.a());
        if (r >= g.a() - tol && r <= g.b() + tol) {
            const int i = g.locate(std::clamp(r, g.a(), g.b()));
            if (g.node(i) == r) return u[i];
            if (g.node(i + 1) == r) return u[i + 1];
        }
    }
    return poly_interp(g.nodes(), u.values, r, order);
}

}  // namespace gpseg
