#include "gpseg/outer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "gpseg/dense.hpp"
#include "gpseg/interp.hpp"
#include "gpseg/stencil.hpp"
#include "gpseg/util.hpp"

namespace gpseg {

double limit_rhs(const Nonlinearity& f, const Nonlinearity& h, double w) {
    // Delta w = f(w+) - h(-w-)
    return w >= 0.0 ? f.f(w) : -h.f(-w);
}

double limit_rhs_derivative(const Nonlinearity& f, const Nonlinearity& h, double w) {
    return w >= 0.0 ? f.df(w) : h.df(-w);
}

namespace {

struct Trajectory {
    std::vector<double> r, w, wp;
    int sign_changes = 0;
    double second_zero = std::numeric_limits<double>::infinity();
    double first_zero = std::numeric_limits<double>::infinity();
};

// RK4 on w'' = F(w) - (N-1)/r w', recording the path and interior zeros.
Trajectory integrate_radial(const std::function<double(double)>& F, int dim,
                            double r_start, double w0, double wp0, double r_end,
                            int n_steps) {
    Trajectory tr;
    tr.r.reserve(n_steps + 1);
    auto rhs = [&](double r, double w, double wp, double& dw, double& dwp) {
        dw = wp;
        dwp = F(w) - (dim - 1) / r * wp;
    };
    double r = r_start, w = w0, wp = wp0;
    const double dr = (r_end - r_start) / n_steps;
    tr.r.push_back(r);
    tr.w.push_back(w);
    tr.wp.push_back(wp);
    for (int k = 0; k < n_steps; ++k) {
        double k1w, k1p, k2w, k2p, k3w, k3p, k4w, k4p;
        rhs(r, w, wp, k1w, k1p);
        rhs(r + dr / 2, w + dr / 2 * k1w, wp + dr / 2 * k1p, k2w, k2p);
        rhs(r + dr / 2, w + dr / 2 * k2w, wp + dr / 2 * k2p, k3w, k3p);
        rhs(r + dr, w + dr * k3w, wp + dr * k3p, k4w, k4p);
        const double w_new = w + dr / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
        const double wp_new = wp + dr / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
        const double r_new = r + dr;
        if (w != 0.0 && w_new != 0.0 && (w > 0) != (w_new > 0)) {
            ++tr.sign_changes;
            const double z = r - w * dr / (w_new - w);
            if (tr.sign_changes == 1) tr.first_zero = z;
            if (tr.sign_changes == 2) tr.second_zero = z;
        }
        r = r_new;
        w = w_new;
        wp = wp_new;
        tr.r.push_back(r);
        tr.w.push_back(w);
        tr.wp.push_back(wp);
        if (!std::isfinite(w) || std::abs(w) > 1e8) break;
        if (tr.sign_changes >= 2) break;
    }
    return tr;
}

double hermite_eval(const Trajectory& tr, double r) {
    auto it = std::upper_bound(tr.r.begin(), tr.r.end(), r);
    int i = static_cast<int>(it - tr.r.begin()) - 1;
    i = std::clamp(i, 0, static_cast<int>(tr.r.size()) - 2);
    const double h = tr.r[i + 1] - tr.r[i];
    const double t = (r - tr.r[i]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * tr.w[i] + h10 * h * tr.wp[i] + h01 * tr.w[i + 1] + h11 * h * tr.wp[i + 1];
}

// Shooting map for the nodal branch: amplitude -> radius of the second zero.
// Ball: w(0) = -amp, w'(0) = 0.  Annulus: w(a) = 0, w'(a) = -amp.
Trajectory shoot(const std::function<double(double)>& F, int dim,
                 const Domain& dom, double amp, int n_steps) {
    if (dom.is_ball()) {
        const double r0 = 1e-7;
        const double w0 = -amp + F(-amp) * r0 * r0 / (2.0 * dim);
        const double wp0 = F(-amp) * r0 / dim;
        return integrate_radial(F, dim, r0, w0, wp0, 1.6, n_steps);
    }
    return integrate_radial(F, dim, dom.inner_radius, 0.0, -amp, 1.6, n_steps);
}

// Newton BVP for the limit problem on a graded grid. Residuals run in long
// double so the attainable floor sits well under the tolerances even at
// |w| ~ 40 on layer-refined meshes.
GridFunction solve_limit_bvp(const std::function<double(double)>& F,
                             const std::function<long double(long double)>& F_hp,
                             const std::function<double(double)>& dF,
                             const GridPtr& grid, const Domain& dom,
                             std::vector<double> seed, NewtonReport& rep_out,
                             std::vector<long double>* hp_out = nullptr) {
    const RadialGrid& g = *grid;
    const int n = g.size();
    const LaplacianBc bc{dom.is_ball() ? EndRule::regularity : EndRule::one_sided,
                         EndRule::one_sided};
    auto residual = [&, grid](const std::vector<double>& w) {
        std::vector<double> res(n);
        if (dom.is_ball())
            res[0] = laplacian_apply(g, w, 0, bc) - F(w[0]);
        else
            res[0] = w[0];
        for (int i = 1; i < n - 1; ++i)
            res[i] = laplacian_apply(g, w, i, bc) - F(w[i]);
        res[n - 1] = w[n - 1];
        return res;
    };
    auto residual_hp = [&, grid](const std::vector<long double>& w) {
        std::vector<long double> res(n);
        if (dom.is_ball())
            res[0] = laplacian_apply_t<long double>(g, w, 0, bc) - F_hp(w[0]);
        else
            res[0] = w[0];
        for (int i = 1; i < n - 1; ++i)
            res[i] = laplacian_apply_t<long double>(g, w, i, bc) - F_hp(w[i]);
        res[n - 1] = w[n - 1];
        return res;
    };
    auto jacobian = [&, grid](const std::vector<double>& w) {
        BandMatrix jac(n, 2, 2);
        std::array<double, 3> c{};
        if (dom.is_ball()) {
            const int j0 = laplacian_row(g, 0, bc, c);
            for (int k = 0; k < 3; ++k)
                if (c[k] != 0.0) jac.add(0, j0 + k, c[k]);
            jac.add(0, 0, -dF(w[0]));
        } else {
            jac.add(0, 0, 1.0);
        }
        for (int i = 1; i < n - 1; ++i) {
            const int j0 = laplacian_row(g, i, bc, c);
            for (int k = 0; k < 3; ++k) jac.add(i, j0 + k, c[k]);
            jac.add(i, i, -dF(w[i]));
        }
        jac.add(n - 1, n - 1, 1.0);
        return jac;
    };
    NewtonOptions opt;
    const double scale = std::max(1.0, sup_norm(seed));
    opt.tol = 1e-13 * scale;
    opt.stall_tol = 1e-9 * scale;
    opt.max_iter = 60;
    auto [w, rep] = newton_solve_hp({residual, jacobian, residual_hp}, std::move(seed), opt);
    rep_out = rep;
    if (hp_out) *hp_out = w;
    std::vector<double> wd(w.begin(), w.end());
    return GridFunction(grid, std::move(wd));
}

struct InterfaceData {
    double r0, psi0, gap;
};

InterfaceData extract_interface(const GridFunction& w) {
    const RadialGrid& g = *w.grid;
    const int n = g.size();
    // locate the single sign change; values at solver-noise level (e.g. the
    // Dirichlet endpoints) do not count
    const double tiny = 1e-11 * w.norm_inf();
    int cross = -1;
    int changes = 0;
    for (int i = 0; i + 1 < n; ++i) {
        if (std::abs(w[i]) > tiny && std::abs(w[i + 1]) > tiny &&
            (w[i] > 0) != (w[i + 1] > 0)) {
            ++changes;
            cross = i;
        }
    }
    if (changes == 0) throw std::runtime_error("extract_interface: no sign change found");
    if (changes > 1) throw std::runtime_error("extract_interface: more than one sign change");

    // quartic refinement of the zero via the local interpolant
    double lo = g.node(cross), hi = g.node(cross + 1);
    double r0 = lo - w[cross] * (hi - lo) / (w[cross + 1] - w[cross]);
    for (int it = 0; it < 60; ++it) {
        const double val = interp_and_derivatives(w, r0, 0);
        const double der = interp_and_derivatives(w, r0, 1);
        const double step = val / der;
        r0 -= step;
        r0 = std::clamp(r0, lo, hi);
        if (std::abs(step) < 1e-15 * std::max(1.0, r0)) break;
    }

    // one-sided quartic slope fits on 5 nodes from each side
    auto onesided_slope = [&](bool left) {
        int j0 = left ? cross - 4 : cross + 1;
        j0 = std::clamp(j0, 0, n - 5);
        std::vector<double> a(25), rhs(5);
        double scale = 0.0;
        for (int k = 0; k < 5; ++k)
            scale = std::max(scale, std::abs(g.node(j0 + k) - r0));
        for (int k = 0; k < 5; ++k) {
            const double z = (g.node(j0 + k) - r0) / scale;
            double p = 1.0;
            for (int m = 0; m < 5; ++m) {
                a[k * 5 + m] = p;
                p *= z;
            }
            rhs[k] = w[j0 + k];
        }
        return dense_solve(std::move(a), std::move(rhs))[1] / scale;
    };
    const double sl = onesided_slope(true);
    const double sr = onesided_slope(false);
    const double psi0 = 0.5 * (sl + sr);
    if (psi0 < 1e-8)
        throw std::runtime_error("extract_interface: degenerate interface slope");
    InterfaceData d;
    d.r0 = r0;
    d.psi0 = psi0;
    d.gap = std::abs(sl - sr) / std::abs(psi0);
    return d;
}

std::vector<RefinementZone> limit_zones(const OuterGridSpec& gs, double r0_est,
                                        double a, double b) {
    std::vector<RefinementZone> z;
    const double w = gs.interface_width;
    double c = std::clamp(r0_est, a + w / 2, b - w / 2);
    z.push_back({c, w, gs.interface_spacing});
    z.push_back({b - gs.boundary_width / 2, gs.boundary_width, gs.boundary_spacing});
    if (a > 0.0)
        z.push_back({a + gs.boundary_width / 2, gs.boundary_width, gs.boundary_spacing});
    return z;
}

}  // namespace

NodalSolution solve_limit_problem(const Nonlinearity& f, const Nonlinearity& h,
                                  int dim, const Domain& domain,
                                  const OuterGridSpec& gs,
                                  const std::optional<ShootingBracket>& bracket,
                                  const std::optional<GridFunction>& init,
                                  bool reduced_form) {
    if (std::abs(f.f(0.0)) > 0.0 || std::abs(h.f(0.0)) > 0.0)
        throw std::invalid_argument("solve_limit_problem: f(0) = h(0) = 0 required");
    if (f.derivative_probe() > 1e-4 || h.derivative_probe() > 1e-4)
        throw std::invalid_argument("solve_limit_problem: derivative evaluators inconsistent");

    auto F = [&](double w) {
        return reduced_form ? f.f(w) : limit_rhs(f, h, w);
    };
    auto F_hp = [&](long double w) -> long double {
        if (reduced_form) return f.f_hp(w);
        return w >= 0 ? f.f_hp(w) : -h.f_hp(-w);
    };
    auto dF = [&](double w) {
        return reduced_form ? f.df(w) : limit_rhs_derivative(f, h, w);
    };

    double r0_est;
    Trajectory best;
    if (!init) {
        // bracket the branch on the amplitude axis, then bisect on the
        // radius of the second zero
        const ShootingBracket br = bracket.value_or(ShootingBracket{});
        const int n_steps = 20000;
        const int n_scan_steps = 6000;  // bracketing only needs coarse shots
        const int n_scan = 120;
        double alo = -1, ahi = -1;
        double prev_amp = 0, prev_rho = 0;
        for (int k = 0; k <= n_scan; ++k) {
            const double amp = br.amplitude_lo *
                               std::pow(br.amplitude_hi / br.amplitude_lo,
                                        static_cast<double>(k) / n_scan);
            const auto tr = shoot(F, dim, domain, amp, n_scan_steps);
            const double rho = tr.second_zero;
            if (std::isfinite(rho) && k > 0 && std::isfinite(prev_rho) &&
                (prev_rho - 1.0) * (rho - 1.0) <= 0.0) {
                alo = prev_amp;
                ahi = amp;
                break;
            }
            prev_amp = amp;
            prev_rho = rho;
        }
        if (alo < 0)
            throw std::runtime_error(
                "solve_limit_problem: no one-sign-change branch in the bracket");
        double side = shoot(F, dim, domain, alo, n_steps).second_zero - 1.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (alo + ahi);
            const double rho = shoot(F, dim, domain, mid, n_steps).second_zero - 1.0;
            if (side * rho <= 0.0) {
                ahi = mid;
            } else {
                alo = mid;
                side = rho;
            }
        }
        best = shoot(F, dim, domain, 0.5 * (alo + ahi), n_steps);
        if (!std::isfinite(best.first_zero))
            throw std::runtime_error("solve_limit_problem: shooting lost the sign change");
        r0_est = best.first_zero;
    } else {
        GridFunction w = *init;
        r0_est = extract_interface(w).r0;
    }

    const double a = domain.inner_radius;
    auto grid = build_grid(a, 1.0, gs.base_count, limit_zones(gs, r0_est, a, 1.0), dim);

    std::vector<double> seed(grid->size());
    for (int i = 0; i < grid->size(); ++i) {
        const double r = grid->node(i);
        seed[i] = init ? interp_value(*init, std::clamp(r, init->grid->a(), init->grid->b()))
                       : hermite_eval(best, r);
    }
    seed.back() = 0.0;

    NodalSolution sol{GridFunction(grid, 0.0), 0, 0, 0, f, h, dim, domain, {}};
    sol.w = solve_limit_bvp(F, F_hp, dF, grid, domain, std::move(seed), sol.newton);
    const auto iface = extract_interface(sol.w);
    sol.r0 = iface.r0;
    sol.psi0 = iface.psi0;
    sol.psi0_onesided_gap = iface.gap;
    if (iface.gap > 1e-6)
        throw std::runtime_error("solve_limit_problem: one-sided slopes disagree (gap " +
                                 std::to_string(iface.gap) + ")");
    return sol;
}

namespace {

// Linear BVP (Delta - q) x = rhs with Dirichlet data; inner end gets the
// regularity row for a ball grid starting at 0, Dirichlet otherwise.
// Boundary unknowns are set exactly; the reduced system is refined with
// long double residuals.
GridFunction solve_linear_bvp(const GridPtr& grid, const std::vector<double>& q,
                              const std::vector<double>& rhs, double val_inner,
                              double val_outer, bool inner_regularity,
                              std::vector<long double>* hp_out = nullptr) {
    const RadialGrid& g = *grid;
    const int n = g.size();
    const LaplacianBc bc{inner_regularity ? EndRule::regularity : EndRule::one_sided,
                         EndRule::one_sided};
    // retained unknowns: [lo, n-2]; boundary values substituted exactly
    const int lo = inner_regularity ? 0 : 1;
    const int m = n - 1 - lo;
    BandMatrix mat(m, 2, 2);
    std::vector<double> b(m, 0.0);
    std::array<double, 3> c{};
    for (int i = lo; i < n - 1; ++i) {
        const int j0 = laplacian_row(g, i, bc, c);
        b[i - lo] = rhs[i];
        for (int k = 0; k < 3; ++k) {
            const int j = j0 + k;
            if (c[k] == 0.0) continue;
            if (j < lo)
                b[i - lo] -= c[k] * val_inner;
            else if (j > n - 2)
                b[i - lo] -= c[k] * val_outer;
            else
                mat.add(i - lo, j - lo, c[k]);
        }
        mat.add(i - lo, i - lo, -q[i]);
    }
    BandLU lu(mat);
    std::vector<double> xd = lu.solve(b);

    // iterative refinement against the long double rows; the double matrix
    // only preconditions
    std::vector<long double> full(n);
    full[0] = inner_regularity ? static_cast<long double>(xd[0])
                               : static_cast<long double>(val_inner);
    for (int i = lo; i < n - 1; ++i) full[i] = xd[i - lo];
    full[n - 1] = val_outer;
    std::array<long double, 3> cl{};
    for (int pass = 0; pass < 4; ++pass) {
        std::vector<double> r(m);
        for (int i = lo; i < n - 1; ++i) {
            const int j0 = laplacian_row_t<long double>(g, i, bc, cl);
            long double acc = static_cast<long double>(rhs[i]) +
                              static_cast<long double>(q[i]) * full[i];
            acc -= apply_zero_sum<long double, long double>(
                cl, full[j0], full[j0 + 1], full[j0 + 2], i - j0);
            r[i - lo] = static_cast<double>(acc);
        }
        auto dx = lu.solve(r);
        for (int i = lo; i < n - 1; ++i) full[i] += dx[i - lo];
    }
    if (hp_out) *hp_out = full;
    std::vector<double> out(full.begin(), full.end());
    return GridFunction(grid, std::move(out));
}

}  // namespace

OuterExpansion compute_corrections(const NodalSolution& sol, const OuterGridSpec& gs) {
    const double r0 = sol.r0;
    const double a = sol.domain.inner_radius;
    const int dim = sol.dim;

    // base counts scale with the interval so the node density (and with it
    // the rounding floor) matches the full-domain grid
    const int count_u = std::max(512, static_cast<int>(gs.base_count * (1.0 - r0)));
    const int count_v = std::max(512, static_cast<int>(gs.base_count * (r0 - a)));
    auto grid_u = build_grid(
        r0, 1.0, count_u,
        {{r0 + gs.interface_width / 4, gs.interface_width / 2, gs.interface_spacing},
         {1.0 - gs.boundary_width / 2, gs.boundary_width, gs.boundary_spacing}},
        dim);
    auto grid_v = build_grid(
        a, r0, count_v,
        {{r0 - gs.interface_width / 4, gs.interface_width / 2, gs.interface_spacing}},
        dim);

    OuterExpansion ex;
    const Nonlinearity& f = sol.f;
    const Nonlinearity& h = sol.h;

    // u0, v0: the delta = 0 members, re-solved on their own grids from the
    // restriction of w
    {
        const int nu = grid_u->size();
        std::vector<double> seed(nu);
        for (int i = 0; i < nu; ++i)
            seed[i] = std::max(0.0, interp_value(sol.w, grid_u->node(i)));
        seed.front() = 0.0;
        seed.back() = 0.0;
        NewtonReport rep;
        auto F = [&](double u) { return f.f(u); };
        auto F_hp = [&](long double u) { return f.f_hp(u); };
        auto dF = [&](double u) { return f.df(u); };
        Domain sub{r0};  // Dirichlet at both ends
        ex.u0 = solve_limit_bvp(F, F_hp, dF, grid_u, sub, std::move(seed), rep, &ex.u0_hp);
    }
    {
        const int nv = grid_v->size();
        std::vector<double> seed(nv);
        for (int i = 0; i < nv; ++i)
            seed[i] = std::max(0.0, -interp_value(sol.w, grid_v->node(i)));
        seed.back() = 0.0;
        NewtonReport rep;
        auto F = [&](double v) { return h.f(v); };
        auto F_hp = [&](long double v) { return h.f_hp(v); };
        auto dF = [&](double v) { return h.df(v); };
        ex.v0 = solve_limit_bvp(F, F_hp, dF, grid_v, sol.domain, std::move(seed), rep, &ex.v0_hp);
    }

    const int nu = grid_u->size(), nv = grid_v->size();
    const bool ball = sol.domain.is_ball();

    auto qu = std::vector<double>(nu);
    for (int i = 0; i < nu; ++i) qu[i] = f.df(ex.u0[i]);
    auto qv = std::vector<double>(nv);
    for (int i = 0; i < nv; ++i) qv[i] = h.df(ex.v0[i]);

    std::vector<double> zero_u(nu, 0.0), zero_v(nv, 0.0);

    // first order: Delta u1 = f'(u0) u1, u1(r0) = 1, u1(1) = 0
    ex.u1 = solve_linear_bvp(grid_u, qu, zero_u, 1.0, 0.0, false, &ex.u1_hp);
    ex.v1 = solve_linear_bvp(grid_v, qv, zero_v, 0.0, 1.0, ball, &ex.v1_hp);
    // second order: rhs (1/2) f''(u0) u1^2, zero boundary data
    std::vector<double> rhs_u(nu), rhs_v(nv);
    for (int i = 0; i < nu; ++i) rhs_u[i] = 0.5 * f.d2f(ex.u0[i]) * ex.u1[i] * ex.u1[i];
    for (int i = 0; i < nv; ++i) rhs_v[i] = 0.5 * h.d2f(ex.v0[i]) * ex.v1[i] * ex.v1[i];
    ex.u2 = solve_linear_bvp(grid_u, qu, rhs_u, 0.0, 0.0, false, &ex.u2_hp);
    ex.v2 = solve_linear_bvp(grid_v, qv, rhs_v, 0.0, 0.0, ball, &ex.v2_hp);
    // third order: rhs f''(u0) u1 u2 + (1/6) f'''(u0) u1^3
    for (int i = 0; i < nu; ++i)
        rhs_u[i] = f.d2f(ex.u0[i]) * ex.u1[i] * ex.u2[i] +
                   f.d3f(ex.u0[i]) * ex.u1[i] * ex.u1[i] * ex.u1[i] / 6.0;
    for (int i = 0; i < nv; ++i)
        rhs_v[i] = h.d2f(ex.v0[i]) * ex.v1[i] * ex.v2[i] +
                   h.d3f(ex.v0[i]) * ex.v1[i] * ex.v1[i] * ex.v1[i] / 6.0;
    ex.u3 = solve_linear_bvp(grid_u, qu, rhs_u, 0.0, 0.0, false, &ex.u3_hp);
    ex.v3 = solve_linear_bvp(grid_v, qv, rhs_v, 0.0, 0.0, ball, &ex.v3_hp);

    OuterBoundaryData& bd = ex.boundary_data;
    bd.u1p = interp_and_derivatives(ex.u1, r0, 1);
    bd.u2p = interp_and_derivatives(ex.u2, r0, 1);
    bd.u3p = interp_and_derivatives(ex.u3, r0, 1);
    bd.v1p = interp_and_derivatives(ex.v1, r0, 1);
    bd.v2p = interp_and_derivatives(ex.v2, r0, 1);
    bd.v3p = interp_and_derivatives(ex.v3, r0, 1);
    bd.u0pp = interp_and_derivatives(ex.u0, r0, 2);
    bd.v0pp = interp_and_derivatives(ex.v0, r0, 2);
    bd.u0ppp = interp_and_derivatives(ex.u0, r0, 3);
    bd.v0ppp = interp_and_derivatives(ex.v0, r0, 3);
    return ex;
}

std::pair<double, double> sigma_min_and_norm(const BandMatrix& a, int iterations) {
    const int n = a.n();
    BandLU lu(a);
    Rng rng(0x5eedull);
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);

    auto normalize = [&](std::vector<double>& v) {
        double s = 0.0;
        for (double t : v) s += t * t;
        s = std::sqrt(s);
        for (double& t : v) t /= s;
        return s;
    };
    normalize(x);

    // power iteration on (A^T A)^{-1}; the Rayleigh estimate |A x| converges
    // quadratically in the subspace error, so it stays accurate even when
    // the two smallest singular values are close
    auto rayleigh = [&]() {
        auto ax = a.multiply(x);
        double s = 0.0;
        for (double t : ax) s += t * t;
        return std::sqrt(s);
    };
    double sigma_min = rayleigh();
    int stable = 0;
    const int max_it = std::max(iterations, 50000);
    for (int it = 0; it < max_it && stable < 5; ++it) {
        auto y = lu.solve_transposed(x);
        y = lu.solve(y);
        normalize(y);
        x.swap(y);
        const double s = rayleigh();
        stable = (std::abs(s - sigma_min) <= 1e-14 * s) ? stable + 1 : 0;
        sigma_min = s;
    }

    // power iteration on A^T A for the norm
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.uniform(-1.0, 1.0);
    normalize(z);
    double top = 0.0;
    for (int it = 0; it < 60; ++it) {
        auto y = a.multiply(z);
        std::vector<double> w(n, 0.0);
        // A^T y
        for (int i = 0; i < n; ++i) {
            const int jlo = std::max(0, i - a.kl());
            const int jhi = std::min(n - 1, i + a.ku());
            for (int j = jlo; j <= jhi; ++j) w[j] += a.at(i, j) * y[i];
        }
        top = normalize(w);
        z.swap(w);
    }
    return {sigma_min, std::sqrt(top)};
}

BandMatrix schrodinger_operator(const GridPtr& grid, const std::vector<double>& q,
                                bool inner_regularity) {
    // -Delta + q with Dirichlet unknowns eliminated (outer end always, inner
    // end unless the regularity row applies). Keeping only interior rows
    // avoids the O(1) boundary rows polluting the singular values of the
    // 1/h^2-scaled operator.
    const RadialGrid& g = *grid;
    const int n = g.size();
    const LaplacianBc bc{inner_regularity ? EndRule::regularity : EndRule::one_sided,
                         EndRule::one_sided};
    const int lo = inner_regularity ? 0 : 1;  // first retained node
    const int m = n - 1 - lo;                 // retained: lo .. n-2
    BandMatrix mat(m, 2, 2);
    std::array<double, 3> c{};
    for (int i = lo; i < n - 1; ++i) {
        const int j0 = laplacian_row(g, i, bc, c);
        for (int k = 0; k < 3; ++k) {
            const int j = j0 + k;
            if (j < lo || j > n - 2 || c[k] == 0.0) continue;
            mat.add(i - lo, j - lo, -c[k]);
        }
        mat.add(i - lo, i - lo, q[i]);
    }
    return mat;
}

NondegeneracyReport check_nondegeneracy(const NodalSolution& sol,
                                        const OuterExpansion& exp) {
    NondegeneracyReport rep;
    const bool ball = sol.domain.is_ball();

    double norm_w = 0, norm_u = 0, norm_v = 0;
    {
        const int n = sol.w.grid->size();
        std::vector<double> q(n);
        for (int i = 0; i < n; ++i)
            q[i] = limit_rhs_derivative(sol.f, sol.h, sol.w[i]);
        std::tie(rep.sigma_min_w, norm_w) =
            sigma_min_and_norm(schrodinger_operator(sol.w.grid, q, ball));
    }
    {
        const int n = exp.u0.grid->size();
        std::vector<double> q(n);
        for (int i = 0; i < n; ++i) q[i] = sol.f.df(exp.u0[i]);
        std::tie(rep.sigma_min_u0, norm_u) =
            sigma_min_and_norm(schrodinger_operator(exp.u0.grid, q, false));
    }
    {
        const int n = exp.v0.grid->size();
        std::vector<double> q(n);
        for (int i = 0; i < n; ++i) q[i] = sol.h.df(exp.v0[i]);
        std::tie(rep.sigma_min_v0, norm_v) =
            sigma_min_and_norm(schrodinger_operator(exp.v0.grid, q, ball));
    }
    rep.slope_gap = exp.boundary_data.u1p - exp.boundary_data.v1p;

    rep.pass = true;
    if (rep.sigma_min_w < 1e-8 * norm_w) {
        rep.pass = false;
        rep.failed_condition = "w is radially degenerate (sigma_min_w below gate)";
    } else if (rep.sigma_min_u0 < 1e-8 * norm_u) {
        rep.pass = false;
        rep.failed_condition = "u0 = w+ is degenerate on its support";
    } else if (rep.sigma_min_v0 < 1e-8 * norm_v) {
        rep.pass = false;
        rep.failed_condition = "v0 = -w- is degenerate on its support";
    } else if (std::abs(rep.slope_gap) < 1e-10) {
        rep.pass = false;
        rep.failed_condition = "u1'(r0) = v1'(r0): matching systems would be singular";
    }
    return rep;
}

namespace {
inline double ex_seed(double c0, double c1, double c2, double c3, double d) {
    return c0 + d * (c1 + d * (c2 + d * c3));
}
}  // namespace

OuterFamily solve_outer_family(const NodalSolution& sol, const OuterExpansion& exp,
                               double delta, double delta_tilde) {
    const double cap = 0.1 * sol.psi0;
    if (std::abs(delta) > cap || std::abs(delta_tilde) > cap)
        throw std::invalid_argument("solve_outer_family: |delta| above 0.1 psi0");

    OuterFamily fam;
    const bool ball = sol.domain.is_ball();

    {
        const GridPtr& grid = exp.u0.grid;
        const int n = grid->size();
        std::vector<double> seed(n);
        for (int i = 0; i < n; ++i)
            seed[i] = ex_seed(exp.u0[i], exp.u1[i], exp.u2[i], exp.u3[i], delta);
        auto F = [&](double u) { return sol.f.f(u); };
        auto dF = [&](double u) { return sol.f.df(u); };
        const RadialGrid& g = *grid;
        auto residual = [&, grid](const std::vector<double>& u) {
            std::vector<double> res(n);
            res[0] = u[0] - delta;
            for (int i = 1; i < n - 1; ++i)
                res[i] = laplacian_apply(g, u, i, {EndRule::one_sided, EndRule::one_sided}) - F(u[i]);
            res[n - 1] = u[n - 1];
            return res;
        };
        auto residual_hp = [&, grid](const std::vector<long double>& u) {
            std::vector<long double> res(n);
            res[0] = u[0] - static_cast<long double>(delta);
            for (int i = 1; i < n - 1; ++i)
                res[i] = laplacian_apply_t<long double>(g, u, i, {EndRule::one_sided, EndRule::one_sided}) -
                         sol.f.f_hp(u[i]);
            res[n - 1] = u[n - 1];
            return res;
        };
        auto jacobian = [&, grid](const std::vector<double>& u) {
            BandMatrix jac(n, 2, 2);
            std::array<double, 3> c{};
            jac.add(0, 0, 1.0);
            for (int i = 1; i < n - 1; ++i) {
                const int j0 = laplacian_row(g, i, {EndRule::one_sided, EndRule::one_sided}, c);
                for (int k = 0; k < 3; ++k) jac.add(i, j0 + k, c[k]);
                jac.add(i, i, -dF(u[i]));
            }
            jac.add(n - 1, n - 1, 1.0);
            return jac;
        };
        NewtonOptions opt;
        const double scale = std::max(1.0, sup_norm(seed));
        opt.tol = 1e-14 * scale;
        opt.stall_tol = 1e-9 * scale;
        auto [u, rep] = newton_solve_hp({residual, jacobian, residual_hp}, std::move(seed), opt);
        fam.newton_u = rep;
        fam.u_hp = u;
        fam.u = GridFunction(grid, std::vector<double>(u.begin(), u.end()));
    }
    {
        const GridPtr& grid = exp.v0.grid;
        const RadialGrid& g = *grid;
        const int n = grid->size();
        std::vector<double> seed(n);
        for (int i = 0; i < n; ++i)
            seed[i] = ex_seed(exp.v0[i], exp.v1[i], exp.v2[i], exp.v3[i], delta_tilde);
        auto F = [&](double v) { return sol.h.f(v); };
        auto dF = [&](double v) { return sol.h.df(v); };
        const LaplacianBc bc{ball ? EndRule::regularity : EndRule::one_sided,
                             EndRule::one_sided};
        auto residual = [&, grid](const std::vector<double>& v) {
            std::vector<double> res(n);
            if (ball)
                res[0] = laplacian_apply(g, v, 0, bc) - F(v[0]);
            else
                res[0] = v[0];
            for (int i = 1; i < n - 1; ++i)
                res[i] = laplacian_apply(g, v, i, bc) - F(v[i]);
            res[n - 1] = v[n - 1] - delta_tilde;
            return res;
        };
        auto residual_hp = [&, grid](const std::vector<long double>& v) {
            std::vector<long double> res(n);
            if (ball)
                res[0] = laplacian_apply_t<long double>(g, v, 0, bc) - sol.h.f_hp(v[0]);
            else
                res[0] = v[0];
            for (int i = 1; i < n - 1; ++i)
                res[i] = laplacian_apply_t<long double>(g, v, i, bc) - sol.h.f_hp(v[i]);
            res[n - 1] = v[n - 1] - static_cast<long double>(delta_tilde);
            return res;
        };
        auto jacobian = [&, grid](const std::vector<double>& v) {
            BandMatrix jac(n, 2, 2);
            std::array<double, 3> c{};
            if (ball) {
                const int j0 = laplacian_row(g, 0, bc, c);
                for (int k = 0; k < 3; ++k)
                    if (c[k] != 0.0) jac.add(0, j0 + k, c[k]);
                jac.add(0, 0, -dF(v[0]));
            } else {
                jac.add(0, 0, 1.0);
            }
            for (int i = 1; i < n - 1; ++i) {
                const int j0 = laplacian_row(g, i, bc, c);
                for (int k = 0; k < 3; ++k) jac.add(i, j0 + k, c[k]);
                jac.add(i, i, -dF(v[i]));
            }
            jac.add(n - 1, n - 1, 1.0);
            return jac;
        };
        NewtonOptions opt;
        const double scale = std::max(1.0, sup_norm(seed));
        opt.tol = 1e-14 * scale;
        opt.stall_tol = 1e-9 * scale;
        auto [v, rep] = newton_solve_hp({residual, jacobian, residual_hp}, std::move(seed), opt);
        fam.newton_v = rep;
        fam.v_hp = v;
        fam.v = GridFunction(grid, std::vector<double>(v.begin(), v.end()));
    }

    if (delta >= 0.0)
        for (int i = 1; i + 1 < fam.u.size(); ++i)
            if (fam.u[i] <= 0.0) fam.u_positive = false;
    if (delta_tilde >= 0.0)
        for (int i = 0; i + 1 < fam.v.size(); ++i)
            if (fam.v[i] <= 0.0) fam.v_positive = false;
    return fam;
}

}  // namespace gpseg
