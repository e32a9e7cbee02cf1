#include "gpseg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpseg/interp.hpp"
#include "gpseg/stencil.hpp"
#include "gpseg/util.hpp"

namespace gpseg {

GridPtr build_solver_grid(double g, double r0, double domain_a, double domain_b,
                          double edge_scale, int dim, int base_count) {
    const double g4 = std::pow(g, -0.25);
    const double lng = std::log(g);
    const double room = std::min(r0 - domain_a, domain_b - r0);
    const double layer_half =
        std::min(3.0 * edge_scale * lng * g4, 0.45 * room * 2.0);
    const double boundary_width =
        std::min(2.0 * edge_scale * lng * g4, 0.4 * (domain_b - r0));
    // layer spacing tightens to ~g^-1/2 so the discretization error stays
    // below the g^-3/4-sized construction correction
    const double layer_spacing = std::min(g4 / 20.0, 0.5 / std::sqrt(g));
    const double boundary_spacing = std::min(g4 / 10.0, 1.0 / std::sqrt(g));
    std::vector<RefinementZone> zones;
    zones.push_back({r0, std::min(2.0 * layer_half, 1.8 * room), layer_spacing});
    zones.push_back({domain_b - boundary_width / 2, boundary_width, boundary_spacing});
    return build_grid(domain_a, domain_b, base_count, zones, dim);
}

GpSystem::GpSystem(GridPtr grid, const Nonlinearity& f, const Nonlinearity& h, double g)
    : grid_(std::move(grid)),
      f_(f),
      h_(h),
      g_(g),
      bc_{grid_->a() == 0.0 ? EndRule::regularity : EndRule::one_sided,
          EndRule::one_sided} {}

template <class T>
std::vector<T> GpSystem::residual_t(const std::vector<T>& x) const {
    const RadialGrid& gr = *grid_;
    const int n = gr.size();
    std::vector<T> u(n), v(n);
    for (int i = 0; i < n; ++i) {
        u[i] = x[2 * i];
        v[i] = x[2 * i + 1];
    }
    const T gg = static_cast<T>(g_);
    std::vector<T> res(2 * n);
    auto fval = [&](T w) {
        if constexpr (std::is_same_v<T, long double>)
            return f_.f_hp(w);
        else
            return f_.f(w);
    };
    auto hval = [&](T w) {
        if constexpr (std::is_same_v<T, long double>)
            return h_.f_hp(w);
        else
            return h_.f(w);
    };
    const bool ball = gr.a() == 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == n - 1 || (i == 0 && !ball)) {
            res[2 * i] = u[i];
            res[2 * i + 1] = v[i];
            continue;
        }
        const T lap_u = laplacian_apply_t<T>(gr, u, i, bc_);
        const T lap_v = laplacian_apply_t<T>(gr, v, i, bc_);
        res[2 * i] = -lap_u + fval(u[i]) + gg * u[i] * v[i] * v[i];
        res[2 * i + 1] = -lap_v + hval(v[i]) + gg * v[i] * u[i] * u[i];
    }
    return res;
}

std::vector<double> GpSystem::residual(const std::vector<double>& x) const {
    return residual_t<double>(x);
}

std::vector<long double> GpSystem::residual_hp(const std::vector<long double>& x) const {
    return residual_t<long double>(x);
}

BandMatrix GpSystem::jacobian(const std::vector<double>& x) const {
    const RadialGrid& gr = *grid_;
    const int n = gr.size();
    BandMatrix jac(2 * n, 4, 4);
    const bool ball = gr.a() == 0.0;
    std::array<double, 3> c{};
    for (int i = 0; i < n; ++i) {
        const double u = x[2 * i], v = x[2 * i + 1];
        if (i == n - 1 || (i == 0 && !ball)) {
            jac.add(2 * i, 2 * i, 1.0);
            jac.add(2 * i + 1, 2 * i + 1, 1.0);
            continue;
        }
        const int j0 = laplacian_row(gr, i, bc_, c);
        for (int k = 0; k < 3; ++k) {
            if (c[k] == 0.0) continue;
            jac.add(2 * i, 2 * (j0 + k), -c[k]);
            jac.add(2 * i + 1, 2 * (j0 + k) + 1, -c[k]);
        }
        jac.add(2 * i, 2 * i, f_.df(u) + g_ * v * v);
        jac.add(2 * i, 2 * i + 1, 2.0 * g_ * u * v);
        jac.add(2 * i + 1, 2 * i + 1, h_.df(v) + g_ * u * u);
        jac.add(2 * i + 1, 2 * i, 2.0 * g_ * u * v);
    }
    return jac;
}

BandMatrix GpSystem::linearized(const std::vector<double>& ub,
                                const std::vector<double>& vb) const {
    const int n = grid_->size();
    std::vector<double> x(2 * n);
    for (int i = 0; i < n; ++i) {
        x[2 * i] = ub[i];
        x[2 * i + 1] = vb[i];
    }
    return jacobian(x);
}

LinearizedOperator::LinearizedOperator(const GpSystem& sys, std::vector<double> u_base,
                                       std::vector<double> v_base)
    : sys_(&sys),
      ub_(std::move(u_base)),
      vb_(std::move(v_base)),
      mat_(sys.linearized(ub_, vb_)) {
    lu_ = std::make_unique<BandLU>(mat_);
}

std::pair<std::vector<double>, std::vector<double>>
LinearizedOperator::apply(const std::vector<double>& phi,
                          const std::vector<double>& psi) const {
    const int n = sys_->grid().size();
    std::vector<double> x(2 * n);
    for (int i = 0; i < n; ++i) {
        x[2 * i] = phi[i];
        x[2 * i + 1] = psi[i];
    }
    auto y = mat_.multiply(x);
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = y[2 * i];
        b[i] = y[2 * i + 1];
    }
    return {std::move(a), std::move(b)};
}

std::pair<std::vector<double>, std::vector<double>>
LinearizedOperator::solve(const std::vector<double>& F,
                          const std::vector<double>& H) const {
    const RadialGrid& gr = sys_->grid();
    const int n = gr.size();
    const bool ball = gr.a() == 0.0;
    std::vector<double> rhs(2 * n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (i == n - 1 || (i == 0 && !ball)) continue;  // homogeneous boundary rows
        rhs[2 * i] = F[i];
        rhs[2 * i + 1] = H[i];
    }
    auto x = lu_->solve(rhs);
    // one refinement pass
    std::vector<long double> xl(x.begin(), x.end());
    auto r = mat_.residual_hp(xl, rhs);
    std::vector<double> rd(r.begin(), r.end());
    auto dx = lu_->solve(rd);
    for (int i = 0; i < 2 * n; ++i) xl[i] += dx[i];
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = static_cast<double>(xl[2 * i]);
        b[i] = static_cast<double>(xl[2 * i + 1]);
    }
    return {std::move(a), std::move(b)};
}

double LinearizedOperator::min_pivot() const { return lu_->min_pivot(); }

std::pair<std::vector<double>, std::vector<double>>
nonlinear_residual_N(const std::vector<double>& u_ap, const std::vector<double>& v_ap,
                     const std::vector<double>& phi, const std::vector<double>& psi,
                     const Nonlinearity& f, const Nonlinearity& h, double g) {
    const size_t n = u_ap.size();
    std::vector<double> N1(n), N2(n);
    for (size_t i = 0; i < n; ++i) {
        const double u = u_ap[i], v = v_ap[i], p = phi[i], q = psi[i];
        N1[i] = f.f(u + p) - f.f(u) - f.df(u) * p + g * u * q * q + g * q * q * p +
                2.0 * g * v * p * q;
        N2[i] = h.f(v + q) - h.f(v) - h.df(v) * q + g * v * p * p + g * p * p * q +
                2.0 * g * u * p * q;
    }
    return {std::move(N1), std::move(N2)};
}

std::pair<std::vector<double>, std::vector<double>>
sample_approximation(const ApproximateSolution& ap, const RadialGrid& grid) {
    const int n = grid.size();
    std::vector<double> u(n), v(n);
    for (int i = 0; i < n; ++i) {
        const double r = grid.node(i);
        const double z = ap.cutoff.zeta(r);
        if (z >= 1.0) {
            u[i] = ap.outer->u(r);
            v[i] = ap.outer->v(r);
        } else if (z <= 0.0) {
            u[i] = ap.inner->u(r);
            v[i] = ap.inner->v(r);
        } else {
            const double ui = ap.inner->u(r), vi = ap.inner->v(r);
            u[i] = ui + z * (ap.outer->u(r) - ui);
            v[i] = vi + z * (ap.outer->v(r) - vi);
        }
    }
    u[n - 1] = 0.0;
    v[n - 1] = 0.0;
    if (grid.a() > 0.0) {
        u[0] = 0.0;
        v[0] = 0.0;
    }
    return {std::move(u), std::move(v)};
}

namespace {

double interface_crossing(const RadialGrid& gr, const std::vector<double>& u,
                          const std::vector<double>& v, double r0) {
    // u - v changes sign once near r0
    std::vector<double> d(gr.size());
    for (int i = 0; i < gr.size(); ++i) d[i] = u[i] - v[i];
    int best = -1;
    double best_dist = 1e30;
    for (int i = 0; i + 1 < gr.size(); ++i) {
        if (d[i] == 0.0 || d[i + 1] == 0.0) continue;
        if ((d[i] > 0) != (d[i + 1] > 0)) {
            const double mid = 0.5 * (gr.node(i) + gr.node(i + 1));
            if (std::abs(mid - r0) < best_dist) {
                best_dist = std::abs(mid - r0);
                best = i;
            }
        }
    }
    if (best < 0) return std::numeric_limits<double>::quiet_NaN();
    const double x0 = gr.node(best), x1 = gr.node(best + 1);
    return x0 - d[best] * (x1 - x0) / (d[best + 1] - d[best]);
}

}  // namespace

GPSolution newton_full(const GpSystem& sys, const ApproximateSolution& ap, double tol,
                       int max_iter, const std::vector<double>* useed_override,
                       const std::vector<double>* vseed_override) {
    const RadialGrid& gr = sys.grid();
    auto [useed, vseed] = sample_approximation(ap, gr);
    if (useed_override && vseed_override) {
        useed = *useed_override;
        vseed = *vseed_override;
    }
    const int n = gr.size();
    std::vector<double> x0(2 * n);
    for (int i = 0; i < n; ++i) {
        x0[2 * i] = useed[i];
        x0[2 * i + 1] = vseed[i];
    }

    NewtonProblem prob;
    prob.residual = [&sys](const std::vector<double>& x) { return sys.residual(x); };
    prob.residual_hp = [&sys](const std::vector<long double>& x) {
        return sys.residual_hp(x);
    };
    prob.jacobian = [&sys](const std::vector<double>& x) { return sys.jacobian(x); };
    NewtonOptions opt;
    opt.tol = tol;
    opt.stall_tol = 10.0 * tol;
    opt.max_iter = max_iter;
    auto [x, rep] = newton_solve(prob, std::move(x0), opt);

    GPSolution sol;
    sol.g = sys.g();
    sol.report = rep;
    std::vector<double> u(n), v(n);
    for (int i = 0; i < n; ++i) {
        u[i] = x[2 * i];
        v[i] = x[2 * i + 1];
    }
    sol.min_u = 1e300;
    sol.min_v = 1e300;
    for (int i = 1; i + 1 < n; ++i) {
        sol.min_u = std::min(sol.min_u, u[i]);
        sol.min_v = std::min(sol.min_v, v[i]);
    }
    // ||(u,v) - (u_ap, v_ap)||_1 of the final correction
    {
        GridFunction du(sys.grid_ptr(), 0.0), dv(sys.grid_ptr(), 0.0);
        for (int i = 0; i < n; ++i) {
            du[i] = u[i] - useed[i];
            dv[i] = v[i] - vseed[i];
        }
        WeightedNormEvaluator ev{0.5, sys.g(), ap.cutoff.r0};
        sol.correction_norm1 = weighted_norm(du, dv, 1, ev);
    }
    sol.interface_radius = interface_crossing(gr, u, v, ap.cutoff.r0);
    sol.u = GridFunction(sys.grid_ptr(), std::move(u));
    sol.v = GridFunction(sys.grid_ptr(), std::move(v));
    return sol;
}

std::pair<std::vector<double>, std::vector<double>>
picard_step(const GpSystem& sys, const LinearizedOperator& lin,
            const std::vector<double>& u_ap, const std::vector<double>& v_ap,
            const std::vector<double>& phi, const std::vector<double>& psi,
            const Nonlinearity& f, const Nonlinearity& h) {
    const RadialGrid& gr = sys.grid();
    const int n = gr.size();
    // discrete remainder of the seed
    std::vector<double> x(2 * n);
    for (int i = 0; i < n; ++i) {
        x[2 * i] = u_ap[i];
        x[2 * i + 1] = v_ap[i];
    }
    auto R = sys.residual(x);
    auto [N1, N2] = nonlinear_residual_N(u_ap, v_ap, phi, psi, f, h, sys.g());
    std::vector<double> F(n), H(n);
    for (int i = 0; i < n; ++i) {
        F[i] = -R[2 * i] - N1[i];
        H[i] = -R[2 * i + 1] - N2[i];
    }
    return lin.solve(F, H);
}

GPSolution picard_full(const GpSystem& sys, const ApproximateSolution& ap, double tol,
                       int max_iter) {
    const RadialGrid& gr = sys.grid();
    const int n = gr.size();
    auto [u_ap, v_ap] = sample_approximation(ap, gr);
    LinearizedOperator lin(sys, u_ap, v_ap);

    // the double-precision residual floor caps what the iteration can show
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        scale = std::max({scale, std::abs(u_ap[i]), std::abs(v_ap[i])});
    const double h_min = gr.min_spacing();
    const double floor = 4.0 * 2.3e-16 * scale / (h_min * h_min);
    tol = std::max(tol, 10.0 * floor);

    std::vector<double> phi(n, 0.0), psi(n, 0.0);
    GPSolution sol;
    sol.g = sys.g();
    std::vector<double> x(2 * n);
    double rnorm = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        auto [phin, psin] = picard_step(sys, lin, u_ap, v_ap, phi, psi, sys.f(), sys.h());
        double step = 0.0;
        for (int i = 0; i < n; ++i) {
            step = std::max({step, std::abs(phin[i] - phi[i]), std::abs(psin[i] - psi[i])});
        }
        phi = std::move(phin);
        psi = std::move(psin);
        for (int i = 0; i < n; ++i) {
            x[2 * i] = u_ap[i] + phi[i];
            x[2 * i + 1] = v_ap[i] + psi[i];
        }
        rnorm = sup_norm(sys.residual(x));
        sol.report.residual_history.push_back(rnorm);
        if (rnorm <= tol) break;
        if (step == 0.0) break;
    }
    sol.report.iterations = it + 1;
    sol.report.final_residual = rnorm;
    sol.report.converged = rnorm <= tol;
    if (!sol.report.converged)
        throw NewtonError("picard_full: no convergence (residual " +
                              std::to_string(rnorm) + ")",
                          sol.report);
    std::vector<double> u(n), v(n);
    for (int i = 0; i < n; ++i) {
        u[i] = x[2 * i];
        v[i] = x[2 * i + 1];
    }
    sol.min_u = 1e300;
    sol.min_v = 1e300;
    for (int i = 1; i + 1 < n; ++i) {
        sol.min_u = std::min(sol.min_u, u[i]);
        sol.min_v = std::min(sol.min_v, v[i]);
    }
    sol.interface_radius = interface_crossing(gr, u, v, ap.cutoff.r0);
    sol.u = GridFunction(sys.grid_ptr(), std::move(u));
    sol.v = GridFunction(sys.grid_ptr(), std::move(v));
    return sol;
}

}  // namespace gpseg
