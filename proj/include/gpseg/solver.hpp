#pragma once

#include <utility>

#include "gpseg/assembly.hpp"
#include "gpseg/grid.hpp"
#include "gpseg/newton.hpp"
#include "gpseg/nonlinearity.hpp"
#include "gpseg/stencil.hpp"

namespace gpseg {

/// Graded mesh for the finite-g solve: layer zones of spacing g^-1/4 / 20
/// around r0 and g^-1/4 / 10 at the outer boundary, widths capped to the
/// domain like the cutoff edges.
GridPtr build_solver_grid(double g, double r0, double domain_a, double domain_b,
                          double edge_scale, int dim, int base_count = 512);

/// Discrete two-component system on a radial grid (interleaved unknowns).
class GpSystem {
public:
    GpSystem(GridPtr grid, const Nonlinearity& f, const Nonlinearity& h, double g);

    const RadialGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    double g() const { return g_; }
    const Nonlinearity& f() const { return f_; }
    const Nonlinearity& h() const { return h_; }
    int size() const { return 2 * grid_->size(); }

    std::vector<double> residual(const std::vector<double>& x) const;
    std::vector<long double> residual_hp(const std::vector<long double>& x) const;
    BandMatrix jacobian(const std::vector<double>& x) const;

    /// Linearization about an arbitrary base pair (Prop-4.2-type rows with
    /// the same boundary closures as the nonlinear system).
    BandMatrix linearized(const std::vector<double>& ub,
                          const std::vector<double>& vb) const;

private:
    GridPtr grid_;
    Nonlinearity f_, h_;
    double g_;
    LaplacianBc bc_;
    template <class T>
    std::vector<T> residual_t(const std::vector<T>& x) const;
};

/// Linearized solve/apply about a frozen base pair.
class LinearizedOperator {
public:
    LinearizedOperator(const GpSystem& sys, std::vector<double> u_base,
                       std::vector<double> v_base);

    /// L(phi, psi) as a matrix application (boundary rows included).
    std::pair<std::vector<double>, std::vector<double>>
    apply(const std::vector<double>& phi, const std::vector<double>& psi) const;

    /// Solve L(phi, psi) = (F, H) with homogeneous boundary rows.
    std::pair<std::vector<double>, std::vector<double>>
    solve(const std::vector<double>& F, const std::vector<double>& H) const;

    double min_pivot() const;

private:
    const GpSystem* sys_;
    std::vector<double> ub_, vb_;
    BandMatrix mat_;
    std::unique_ptr<BandLU> lu_;
};

/// Quadratic remainder N of the expansion about (u_ap, v_ap) (all six terms
/// of each component).
std::pair<std::vector<double>, std::vector<double>>
nonlinear_residual_N(const std::vector<double>& u_ap, const std::vector<double>& v_ap,
                     const std::vector<double>& phi, const std::vector<double>& psi,
                     const Nonlinearity& f, const Nonlinearity& h, double g);

struct GPSolution {
    double g = 0;
    GridFunction u, v;
    NewtonReport report;
    double min_u = 0, min_v = 0;  // interior positivity margins
    double correction_norm1 = 0;  // ||(u - u_ap, v - v_ap)||_1
    double interface_radius = 0;  // crossing of u = v near r0
    // sup-error diagnostics against the limit profile live in the sweep fits
};

/// Sample the glued approximation on the solver grid (exact piecewise
/// evaluation, no interpolation through the union grid).
std::pair<std::vector<double>, std::vector<double>>
sample_approximation(const ApproximateSolution& ap, const RadialGrid& grid);

/// Full Newton solve of the system seeded at (u_ap, v_ap). An explicit seed
/// overrides the glued pair (continuation fallback along the ladder).
GPSolution newton_full(const GpSystem& sys, const ApproximateSolution& ap,
                       double tol = 1e-10, int max_iter = 25,
                       const std::vector<double>* useed_override = nullptr,
                       const std::vector<double>* vseed_override = nullptr);

/// One application of the fixed-point map: solve
/// L(phi_bar, psi_bar) = -R - N(phi, psi) about (u_ap, v_ap).
std::pair<std::vector<double>, std::vector<double>>
picard_step(const GpSystem& sys, const LinearizedOperator& lin,
            const std::vector<double>& u_ap, const std::vector<double>& v_ap,
            const std::vector<double>& phi, const std::vector<double>& psi,
            const Nonlinearity& f, const Nonlinearity& h);

/// Picard iteration from (u_ap, v_ap); returns the solution and iterations.
GPSolution picard_full(const GpSystem& sys, const ApproximateSolution& ap,
                       double tol = 1e-10, int max_iter = 400);

}  // namespace gpseg
