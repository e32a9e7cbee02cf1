#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpseg/band.hpp"
#include "gpseg/dense.hpp"
#include "gpseg/grid.hpp"
#include "gpseg/interp.hpp"
#include "gpseg/newton.hpp"
#include "gpseg/stencil.hpp"
#include "gpseg/util.hpp"

using namespace gpseg;

namespace {

GridFunction sample(const GridPtr& g, double (*fn)(double)) {
    GridFunction u(g, 0.0);
    for (int i = 0; i < g->size(); ++i) u[i] = fn(g->node(i));
    return u;
}

}  // namespace

TEST_CASE("build_grid: no zones gives uniform nodes") {
    auto g = build_grid(0.0, 1.0, 64, {}, 3);
    CHECK(g->size() == 65);
    for (int i = 0; i < g->size(); ++i)
        CHECK(g->node(i) == doctest::Approx(i / 64.0).epsilon(1e-13));
}

TEST_CASE("build_grid: refinement zone forces the node count") {
    auto g = build_grid(0.0, 1.0, 64, {{0.5, 0.1, 1e-3}}, 3);
    int inside = 0;
    for (int i = 0; i < g->size(); ++i)
        if (g->node(i) >= 0.45 && g->node(i) <= 0.55) ++inside;
    CHECK(inside >= 100);
    CHECK(g->max_spacing_in(0.45, 0.55) <= 1e-3 * (1 + 1e-12));
}

TEST_CASE("build_grid: two zones, monotone nodes, max-spacing scan") {
    auto g = build_grid(0.0, 1.0, 64, {{0.5, 0.08, 5e-4}, {0.97, 0.06, 1e-3}}, 2);
    const auto& n = g->nodes();
    for (size_t i = 1; i < n.size(); ++i) CHECK(n[i] > n[i - 1]);
    CHECK(g->max_spacing_in(0.46, 0.54) <= 5e-4 * (1 + 1e-12));
    CHECK(g->max_spacing_in(0.94, 1.0) <= 1e-3 * (1 + 1e-12));
    // geometric transition between adjacent cells
    for (size_t i = 2; i < n.size(); ++i) {
        const double ratio = (n[i] - n[i - 1]) / (n[i - 1] - n[i - 2]);
        CHECK(ratio <= 1.2 + 1e-9);
        CHECK(ratio >= 1.0 / 1.2 - 1e-9);
    }
    CHECK(g->min_spacing() > 0.0);
}

TEST_CASE("build_grid: rejects bad zones") {
    CHECK_THROWS(build_grid(0.0, 1.0, 64, {{1.5, 0.1, 1e-3}}, 3));
    CHECK_THROWS(build_grid(0.0, 1.0, 64, {{0.5, 0.1, -1e-3}}, 3));
    CHECK_THROWS(build_grid(0.0, 1.0, 8, {}, 3));
}

TEST_CASE("radial_laplacian: constants are harmonic") {
    auto g = build_grid(0.0, 1.0, 64, {{0.5, 0.1, 1e-3}}, 3);
    auto u = sample(g, +[](double) { return 1.0; });
    auto lap = radial_laplacian(u, {EndRule::regularity, EndRule::one_sided});
    CHECK(lap.norm_inf() <= 1e-9);
}

TEST_CASE("radial_laplacian: exact on r^2 for N = 3 on a graded grid") {
    auto g = build_grid(0.0, 1.0, 48, {{0.3, 0.1, 2e-3}}, 3);
    auto u = sample(g, +[](double r) { return r * r; });
    auto lap = radial_laplacian(u, {EndRule::regularity, EndRule::one_sided});
    for (int i = 0; i < g->size(); ++i)
        CHECK(lap[i] == doctest::Approx(6.0).epsilon(1e-8));
}

TEST_CASE("radial_laplacian: exact on {1, r, r^2} away from the center row") {
    auto g = build_grid(0.2, 1.0, 48, {{0.6, 0.1, 1e-3}}, 5);
    auto u1 = sample(g, +[](double) { return 1.0; });
    auto ur = sample(g, +[](double r) { return r; });
    auto ur2 = sample(g, +[](double r) { return r * r; });
    LaplacianBc bc;  // one-sided at both ends (annulus-type grid)
    auto l1 = radial_laplacian(u1, bc);
    auto lr = radial_laplacian(ur, bc);
    auto lr2 = radial_laplacian(ur2, bc);
    const int N = 5;
    for (int i = 0; i < g->size(); ++i) {
        const double r = g->node(i);
        CHECK(std::abs(l1[i]) <= 1e-9);
        CHECK(lr[i] == doctest::Approx((N - 1) / r).epsilon(1e-9));
        CHECK(lr2[i] == doctest::Approx(2.0 + 2.0 * (N - 1)).epsilon(1e-9));
    }
}

TEST_CASE("radial_laplacian: slope-2 error on r^4, N = 2, uniform grids") {
    double err[2];
    for (int k = 0; k < 2; ++k) {
        const int base = 64 << k;
        auto g = build_grid(0.0, 1.0, base, {}, 2);
        auto u = sample(g, +[](double r) { return r * r * r * r; });
        auto lap = radial_laplacian(u, {EndRule::regularity, EndRule::one_sided});
        double e = 0.0;
        for (int i = 1; i + 1 < g->size(); ++i) {
            const double r = g->node(i);
            e = std::max(e, std::abs(lap[i] - 16.0 * r * r));
        }
        err[k] = e;
    }
    const double order = std::log2(err[0] / err[1]);
    CHECK(order == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("radial_laplacian: rejects unknown bc kinds and bad grids") {
    CHECK_THROWS(end_rule_from_string("periodic"));
    CHECK(end_rule_from_string("regularity") == EndRule::regularity);
    auto g = build_grid(0.2, 1.0, 16, {}, 3);
    auto u = sample(g, +[](double r) { return r; });
    // regularity away from r = 0 is invalid
    CHECK_THROWS(radial_laplacian(u, {EndRule::regularity, EndRule::one_sided}));
    GridFunction bad;
    bad.grid = g;
    bad.values.assign(3, 0.0);
    CHECK_THROWS(radial_laplacian(bad, {}));
}

TEST_CASE("banded LU matches a dense solve, including the transpose") {
    Rng rng(42);
    const int n = 40, kl = 3, ku = 2;
    BandMatrix a(n, kl, ku);
    std::vector<double> dense(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) {
            const double v = rng.uniform(-1.0, 1.0) + (i == j ? 3.0 : 0.0);
            a.at(i, j) = v;
            dense[i * n + j] = v;
        }
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) b[i] = rng.uniform(-1.0, 1.0);

    BandLU lu(a);
    auto x = lu.solve(b);
    auto xd = dense_solve(dense, b);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xd[i]).epsilon(1e-10));

    auto xt = lu.solve_transposed(b);
    std::vector<double> dt(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dt[i * n + j] = dense[j * n + i];
    auto xtd = dense_solve(dt, b);
    for (int i = 0; i < n; ++i) CHECK(xt[i] == doctest::Approx(xtd[i]).epsilon(1e-10));
}

namespace {

// -u'' = 0 with u(0) = 0, u(1) = 1 as a Newton problem
NewtonProblem linear_line_problem(const GridPtr& g) {
    const RadialGrid& gr = *g;
    const int n = gr.size();
    NewtonProblem p;
    p.residual = [&gr, n](const std::vector<double>& u) {
        std::vector<double> res(n);
        res[0] = u[0];
        for (int i = 1; i < n - 1; ++i) {
            auto c = d2_centered(gr, i);
            res[i] = apply_zero_sum(c, u[i - 1], u[i], u[i + 1], 1);
        }
        res[n - 1] = u[n - 1] - 1.0;
        return res;
    };
    p.jacobian = [&gr, n](const std::vector<double>&) {
        BandMatrix jac(n, 2, 2);
        jac.add(0, 0, 1.0);
        for (int i = 1; i < n - 1; ++i) {
            auto c = d2_centered(gr, i);
            jac.add(i, i - 1, c[0]);
            jac.add(i, i, c[1]);
            jac.add(i, i + 1, c[2]);
        }
        jac.add(n - 1, n - 1, 1.0);
        return jac;
    };
    return p;
}

}  // namespace

TEST_CASE("newton_solve: linear problem converges in exactly one undamped step") {
    auto g = build_grid(0.0, 1.0, 32, {}, 1);
    auto p = linear_line_problem(g);
    std::vector<double> x0(g->size(), 0.0);
    auto [x, rep] = newton_solve(p, x0, {});
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.total_backtracks == 0);
    CHECK(rep.residual_history.size() == static_cast<size_t>(rep.iterations) + 1);
    for (int i = 0; i < g->size(); ++i)
        CHECK(x[i] == doctest::Approx(g->node(i)).epsilon(1e-11));
}

TEST_CASE("newton_solve: manufactured nonlinear BVP converges quadratically") {
    // Delta w = -w^3 + s(r) in N = 1 with w(r) = sin(pi r) manufactured
    auto g = build_grid(0.0, 1.0, 200, {}, 1);
    const RadialGrid& gr = *g;
    const int n = gr.size();
    auto forcing = [](double r) {
        const double w = std::sin(M_PI * r);
        return -M_PI * M_PI * w + w * w * w;
    };
    NewtonProblem p;
    p.residual = [&gr, n, forcing](const std::vector<double>& u) {
        std::vector<double> res(n);
        res[0] = u[0];
        for (int i = 1; i < n - 1; ++i) {
            auto c = d2_centered(gr, i);
            res[i] = apply_zero_sum(c, u[i - 1], u[i], u[i + 1], 1) + u[i] * u[i] * u[i] -
                     forcing(gr.node(i));
        }
        res[n - 1] = u[n - 1];
        return res;
    };
    p.jacobian = [&gr, n](const std::vector<double>& u) {
        BandMatrix jac(n, 2, 2);
        jac.add(0, 0, 1.0);
        for (int i = 1; i < n - 1; ++i) {
            auto c = d2_centered(gr, i);
            jac.add(i, i - 1, c[0]);
            jac.add(i, i, c[1] + 3.0 * u[i] * u[i]);
            jac.add(i, i + 1, c[2]);
        }
        jac.add(n - 1, n - 1, 1.0);
        return jac;
    };
    NewtonOptions opt;
    opt.tol = 1e-9;
    std::vector<double> x0(n, 0.0);
    auto [x, rep] = newton_solve(p, x0, opt);
    CHECK(rep.converged);
    // residual history contracts at least quadratically once in the basin
    const auto& h = rep.residual_history;
    REQUIRE(h.size() >= 3);
    bool quadratic_tail = false;
    for (size_t k = 0; k + 1 < h.size(); ++k)
        if (h[k] < 1e-2 && h[k + 1] <= 10.0 * h[k] * h[k]) quadratic_tail = true;
    CHECK(quadratic_tail);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(x[i] - std::sin(M_PI * gr.node(i))));
    CHECK(err < 5e-4);  // O(h^2)
}

TEST_CASE("newton_solve: finite-difference probe flags an inconsistent jacobian") {
    auto g = build_grid(0.0, 1.0, 32, {}, 1);
    auto p = linear_line_problem(g);
    auto good_jac = p.jacobian;
    p.jacobian = [good_jac](const std::vector<double>& u) {
        BandMatrix jac = good_jac(u);
        for (int i = 1; i < jac.n() - 1; ++i) jac.at(i, i) *= 1.1;  // 10 percent off
        return jac;
    };
    NewtonOptions opt;
    opt.fd_check = true;
    std::vector<double> x0(g->size(), 0.0);
    CHECK_THROWS_AS(newton_solve(p, x0, opt), NewtonError);
}

TEST_CASE("interp_and_derivatives: polynomials reproduced exactly") {
    auto g = build_grid(0.0, 1.0, 50, {}, 3);
    auto u = sample(g, +[](double r) { return r * r * r; });
    CHECK(interp_and_derivatives(u, 0.5, 2) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(interp_and_derivatives(u, g->node(17), 0) == u[17]);
    CHECK_THROWS(interp_and_derivatives(u, 1.5, 0));
    CHECK_THROWS(interp_and_derivatives(u, 0.5, 4));
}

TEST_CASE("interp_and_derivatives: first derivative of sin at O(h^4)") {
    double err[2];
    for (int k = 0; k < 2; ++k) {
        auto g = build_grid(0.0, 1.0, 40 << k, {}, 3);
        auto u = sample(g, +[](double r) { return std::sin(r); });
        err[k] = std::abs(interp_and_derivatives(u, 0.3, 1) - std::cos(0.3));
    }
    CHECK(err[0] < 1e-7);
    const double order = std::log2(err[0] / err[1]);
    CHECK(order >= 3.5);
}

TEST_CASE("grid functions reject mismatched lengths") {
    auto g = build_grid(0.0, 1.0, 32, {}, 3);
    CHECK_THROWS(GridFunction(g, std::vector<double>(5, 0.0)));
    auto u = sample(g, +[](double r) { return r; });
    auto g2 = build_grid(0.0, 1.0, 48, {}, 3);
    auto v = sample(g2, +[](double r) { return r; });
    CHECK_THROWS(u + v);
}
