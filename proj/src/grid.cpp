#include "gpseg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpseg {

namespace {
// Spacing growth per unit distance from a zone. 0.15 keeps adjacent-cell
// ratios within [1/1.2, 1.2] after equidistribution.
constexpr double kGrowthSlope = 0.15;
}

RadialGrid::RadialGrid(std::vector<double> nodes, int dim)
    : nodes_(std::move(nodes)), dim_(dim) {
    if (dim_ < 1) throw std::invalid_argument("RadialGrid: dim must be >= 1");
    if (nodes_.size() < 2) throw std::invalid_argument("RadialGrid: need at least 2 nodes");
    if (nodes_.front() < 0.0) throw std::invalid_argument("RadialGrid: a must be >= 0");
    for (size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i] > nodes_[i - 1]))
            throw std::invalid_argument("RadialGrid: nodes must be strictly increasing");
}

double RadialGrid::min_spacing() const {
    double m = nodes_[1] - nodes_[0];
    for (size_t i = 2; i < nodes_.size(); ++i)
        m = std::min(m, nodes_[i] - nodes_[i - 1]);
    return m;
}

double RadialGrid::max_spacing_in(double lo, double hi) const {
    double m = 0.0;
    for (size_t i = 1; i < nodes_.size(); ++i)
        if (nodes_[i - 1] >= lo && nodes_[i] <= hi)
            m = std::max(m, nodes_[i] - nodes_[i - 1]);
    return m;
}

int RadialGrid::locate(double r) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    int i = static_cast<int>(it - nodes_.begin()) - 1;
    return std::clamp(i, 0, size() - 2);
}

GridPtr build_grid(double a, double b, int base_count,
                   const std::vector<RefinementZone>& zones, int dim) {
    if (!(a >= 0.0 && a < b)) throw std::invalid_argument("build_grid: need 0 <= a < b");
    if (base_count < 16) throw std::invalid_argument("build_grid: base_count must be >= 16");
    const double h0 = (b - a) / base_count;

    for (const auto& z : zones) {
        if (z.spacing <= 0.0) throw std::invalid_argument("build_grid: zone spacing must be > 0");
        if (z.width <= 0.0) throw std::invalid_argument("build_grid: zone width must be > 0");
        if (z.center - z.width / 2 < a - 1e-12 || z.center + z.width / 2 > b + 1e-12)
            throw std::invalid_argument("build_grid: zone outside [a,b]");
    }

    // Target spacing at r: base spacing capped by each zone's spacing grown
    // geometrically with distance from the zone.
    auto target = [&](double r) {
        double h = h0;
        for (const auto& z : zones) {
            const double lo = z.center - z.width / 2, hi = z.center + z.width / 2;
            double d = 0.0;
            if (r < lo) d = lo - r;
            else if (r > hi) d = r - hi;
            h = std::min(h, z.spacing + kGrowthSlope * d);
        }
        return h;
    };

    // Segment breakpoints at zone edges so cells never straddle them.
    std::vector<double> brk = {a, b};
    for (const auto& z : zones) {
        for (double e : {z.center - z.width / 2, z.center + z.width / 2})
            if (e > a + 1e-14 && e < b - 1e-14) brk.push_back(e);
    }
    std::sort(brk.begin(), brk.end());
    brk.erase(std::unique(brk.begin(), brk.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-14; }),
              brk.end());

    // Per segment, equidistribute the cumulative density Phi(r) = int dr/h(r):
    // cells satisfy int_cell dr/h = Phi_total/m <= 1, so spacing never exceeds
    // the target and adjacent cells keep the geometric ratio.
    std::vector<double> nodes = {a};
    for (size_t s = 0; s + 1 < brk.size(); ++s) {
        const double lo = brk[s], hi = brk[s + 1];
        std::vector<double> rs = {lo}, phis = {0.0};
        double r = lo, phi = 0.0;
        while (r < hi) {
            const double step = std::min(target(r) / 8.0, hi - r);
            phi += step / target(r + step / 2.0);
            r += step;
            rs.push_back(r);
            phis.push_back(phi);
        }
        const int m = std::max(1, static_cast<int>(std::ceil(phi - 1e-12)));
        size_t k = 0;
        for (int j = 1; j < m; ++j) {
            const double tgt = phi * j / m;
            while (k + 1 < phis.size() && phis[k + 1] < tgt) ++k;
            const double frac = (tgt - phis[k]) / (phis[k + 1] - phis[k]);
            nodes.push_back(rs[k] + frac * (rs[k + 1] - rs[k]));
        }
        nodes.push_back(hi);
    }
    return std::make_shared<RadialGrid>(std::move(nodes), dim);
}

GridFunction::GridFunction(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid->size())
        throw std::invalid_argument("GridFunction: value/grid length mismatch");
}

GridFunction::GridFunction(GridPtr g, double fill)
    : grid(std::move(g)), values(static_cast<size_t>(grid->size()), fill) {}

void GridFunction::validate() const {
    if (!grid) throw std::invalid_argument("GridFunction: null grid");
    if (static_cast<int>(values.size()) != grid->size())
        throw std::invalid_argument("GridFunction: value/grid length mismatch");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite value");
}

double GridFunction::norm_inf() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

static void check_same_grid(const GridFunction& x, const GridFunction& y) {
    if (x.size() != y.size() || x.grid.get() != y.grid.get())
        throw std::invalid_argument("GridFunction: operands on different grids");
}

GridFunction operator+(const GridFunction& x, const GridFunction& y) {
    check_same_grid(x, y);
    GridFunction r = x;
    for (int i = 0; i < r.size(); ++i) r[i] += y[i];
    return r;
}

GridFunction operator-(const GridFunction& x, const GridFunction& y) {
    check_same_grid(x, y);
    GridFunction r = x;
    for (int i = 0; i < r.size(); ++i) r[i] -= y[i];
    return r;
}

GridFunction operator*(double s, const GridFunction& x) {
    GridFunction r = x;
    for (int i = 0; i < r.size(); ++i) r[i] *= s;
    return r;
}

}  // namespace gpseg
