#pragma once

#include <memory>
#include <vector>

namespace gpseg {

/// A refinement zone: target local spacing inside [center-width/2, center+width/2].
struct RefinementZone {
    double center;
    double width;
    double spacing;
};

/// Strictly increasing radial nodes on [a,b] with the spatial dimension they
/// discretize. Immutable after construction; shared by grid functions.
class RadialGrid {
public:
    RadialGrid(std::vector<double> nodes, int dim);

    const std::vector<double>& nodes() const { return nodes_; }
    double node(int i) const { return nodes_[i]; }
    int size() const { return static_cast<int>(nodes_.size()); }
    int dim() const { return dim_; }
    double a() const { return nodes_.front(); }
    double b() const { return nodes_.back(); }
    double min_spacing() const;
    double max_spacing_in(double lo, double hi) const;

    /// Index of the last node <= r (clamped to [0, size-2]).
    int locate(double r) const;

private:
    std::vector<double> nodes_;
    int dim_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Graded grid builder. Spacing inside each zone is at most the requested
/// one; outside, cells grow geometrically with ratio <= 1.2 up to the base
/// spacing (b-a)/base_count.
GridPtr build_grid(double a, double b, int base_count,
                   const std::vector<RefinementZone>& zones, int dim);

/// One real value per grid node.
struct GridFunction {
    GridPtr grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(GridPtr g, std::vector<double> v);
    explicit GridFunction(GridPtr g, double fill = 0.0);

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }

    /// Throws unless all values are finite and sizes match the grid.
    void validate() const;

    double norm_inf() const;
};

GridFunction operator+(const GridFunction& x, const GridFunction& y);
GridFunction operator-(const GridFunction& x, const GridFunction& y);
GridFunction operator*(double s, const GridFunction& x);

}  // namespace gpseg
