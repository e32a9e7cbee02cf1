#pragma once

#include <optional>
#include <vector>

#include "gpseg/grid.hpp"
#include "gpseg/newton.hpp"
#include "gpseg/nonlinearity.hpp"

namespace gpseg {

/// Ball (inner_radius = 0) or annulus (inner_radius > 0), outer radius 1.
struct Domain {
    double inner_radius = 0.0;
    bool is_ball() const { return inner_radius == 0.0; }
};

/// Grid parameters for the scalar limit problem and the outer family.
/// Spacings below ~1e-4 push the finite-difference rounding floor above the
/// solver tolerances; the defaults keep a safe margin.
struct OuterGridSpec {
    int base_count = 6144;
    double interface_spacing = 1e-3;
    double interface_width = 0.12;
    double boundary_spacing = 1e-3;
    double boundary_width = 0.06;
};

/// Radial nodal profile w of the limit problem, with one sign change at r0:
/// w < 0 inside, w > 0 outside, slope psi0 = w'(r0) > 0.
struct NodalSolution {
    GridFunction w;
    double r0 = 0.0;
    double psi0 = 0.0;
    double psi0_onesided_gap = 0.0;  // relative gap of the two one-sided slopes
    Nonlinearity f = Nonlinearity::power(0.0, 1.0);
    Nonlinearity h = Nonlinearity::power(0.0, 1.0);
    int dim = 3;
    Domain domain;
    NewtonReport newton;
};

/// Scalars extracted at r0 from the outer expansion.
struct OuterBoundaryData {
    double u1p = 0, u2p = 0, u3p = 0;    // u_i'(r0)
    double v1p = 0, v2p = 0, v3p = 0;    // v_i'(r0)
    double u0pp = 0, v0pp = 0;           // u0''(r0), v0''(r0)
    double u0ppp = 0, v0ppp = 0;         // u0'''(r0), v0'''(r0)
};

/// Base profiles and the first three corrections of the u- and v-families,
/// on dedicated grids over [r0,1] and [inner,r0]. The hp copies keep the
/// extended-precision solver output; the delta-expansion remainder tests
/// need differences below double storage granularity.
struct OuterExpansion {
    GridFunction u0, u1, u2, u3;  // on grid_u = [r0, 1]
    GridFunction v0, v1, v2, v3;  // on grid_v = [inner, r0]
    std::vector<long double> u0_hp, u1_hp, u2_hp, u3_hp;
    std::vector<long double> v0_hp, v1_hp, v2_hp, v3_hp;
    OuterBoundaryData boundary_data;
};

struct NondegeneracyReport {
    double sigma_min_w = 0;    // smallest singular value of the reduced operator
    double sigma_min_u0 = 0;
    double sigma_min_v0 = 0;
    double slope_gap = 0;      // u1'(r0) - v1'(r0)
    bool pass = false;
    std::string failed_condition;
};

/// One member of the outer family u_delta / v_delta_tilde.
struct OuterFamily {
    GridFunction u;  // on the expansion's grid_u
    GridFunction v;  // on grid_v
    std::vector<long double> u_hp, v_hp;
    bool u_positive = true;
    bool v_positive = true;
    NewtonReport newton_u, newton_v;
};

/// F(w) = f(w+) - h(-w-), the right side of the limit equation; reduced
/// variant uses f only.
double limit_rhs(const Nonlinearity& f, const Nonlinearity& h, double w);
double limit_rhs_derivative(const Nonlinearity& f, const Nonlinearity& h, double w);

struct ShootingBracket {
    double amplitude_lo = 1e-2;  // |w(0)| or |w'(a)| search range
    double amplitude_hi = 1e3;
};

/// Solve the scalar limit problem for the one-sign-change nodal profile.
/// A shooting pass brackets the branch; a Newton BVP solve on the graded
/// grid polishes it. init may carry a bracket or a full initial guess.
NodalSolution solve_limit_problem(const Nonlinearity& f, const Nonlinearity& h,
                                  int dim, const Domain& domain,
                                  const OuterGridSpec& gs = {},
                                  const std::optional<ShootingBracket>& bracket = {},
                                  const std::optional<GridFunction>& init = {},
                                  bool reduced_form = false);

/// Solve the six linear correction problems and extract the boundary data.
OuterExpansion compute_corrections(const NodalSolution& sol,
                                   const OuterGridSpec& gs = {});

/// sigma_min of the three linearized operators plus the slope gap.
NondegeneracyReport check_nondegeneracy(const NodalSolution& sol,
                                        const OuterExpansion& exp);

/// Solve the boundary-perturbed problems with data delta / delta_tilde at
/// r0, seeded from u0 + delta u1, v0 + delta_tilde v1.
OuterFamily solve_outer_family(const NodalSolution& sol, const OuterExpansion& exp,
                               double delta, double delta_tilde);

/// -Delta + q with Dirichlet unknowns eliminated (the reduced discretization
/// whose singular values are meaningful at the 1/h^2 row scale).
BandMatrix schrodinger_operator(const GridPtr& grid, const std::vector<double>& q,
                                bool inner_regularity);

/// Smallest singular value and an operator-norm estimate of a banded matrix
/// via inverse/forward power iteration on A^T A. Used by the nondegeneracy
/// gate; exposed for the dense-oracle cross check.
std::pair<double, double> sigma_min_and_norm(const BandMatrix& a,
                                             int iterations = 200);

}  // namespace gpseg
