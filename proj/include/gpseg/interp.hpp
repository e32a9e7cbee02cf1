#pragma once

#include <vector>

#include "gpseg/grid.hpp"

namespace gpseg {

/// Value (order 0) or derivative (order 1..3) of the degree-4 local
/// polynomial through the 5 nodes nearest x, on a raw strictly increasing
/// node array. Error O(h^(5-order)) on smooth data.
double poly_interp(const std::vector<double>& nodes, const std::vector<double>& values,
                   double x, int order);

/// Same on a grid function; exact at grid nodes for order 0.
double interp_and_derivatives(const GridFunction& u, double r, int order);

inline double interp_value(const GridFunction& u, double r) {
    return interp_and_derivatives(u, r, 0);
}

}  // namespace gpseg
