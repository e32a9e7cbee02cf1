#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpseg/interp.hpp"
#include "gpseg/outer.hpp"
#include "gpseg/stencil.hpp"
#include "gpseg/util.hpp"
#include "oracles.hpp"

using namespace gpseg;

namespace {

const Nonlinearity kCubicMinus = Nonlinearity::power(0.0, 1.0);  // f(u) = -u^3

struct Fixture {
    NodalSolution sol;
    OuterExpansion exp;
};

const Fixture& default_fixture() {
    static Fixture fx = [] {
        Fixture f{solve_limit_problem(kCubicMinus, kCubicMinus, 3, {}), {}};
        f.exp = compute_corrections(f.sol);
        return f;
    }();
    return fx;
}

}  // namespace

TEST_CASE("limit problem: BVP solution matches an independent shooting oracle") {
    const auto& [sol, exp] = default_fixture();
    CHECK(sol.newton.converged);

    // Independent oracle: high-resolution RK4 shooting with bisection on w(0)
    auto rhs = [](double w) { return -w * w * w; };
    oracle::RadialShoot oracle_shoot(rhs, 3, 400000);
    const double alpha = oracle_shoot.bisect_nodal_amplitude(1e-2, 1e3, 1e-13);
    const auto traj = oracle_shoot.run(alpha);

    for (double r : {0.05, 0.2, 0.4, 0.55, 0.7, 0.9}) {
        const double w_oracle = traj.eval(r);
        const double w_bvp = interp_value(sol.w, r);
        CHECK(w_bvp == doctest::Approx(w_oracle).epsilon(2e-6).scale(std::abs(alpha)));
    }
    CHECK(sol.r0 == doctest::Approx(traj.first_zero).epsilon(1e-6));
}

TEST_CASE("limit problem: sign convention (r - r0) w(r) > 0 away from r0") {
    const auto& [sol, exp] = default_fixture();
    const auto& g = *sol.w.grid;
    const double pad = 2.0 * g.max_spacing_in(sol.r0 - 0.05, sol.r0 + 0.05);
    for (int i = 0; i < g.size(); ++i) {
        const double r = g.node(i);
        if (std::abs(r - sol.r0) > pad && r > g.a() && r < g.b())
            CHECK((r - sol.r0) * sol.w[i] > 0.0);
    }
    CHECK(sol.psi0 > 0.0);
    CHECK(sol.psi0_onesided_gap < 1e-6);
}

TEST_CASE("limit problem: odd f = h makes eqlimit and its reduced form agree") {
    const auto& [sol, exp] = default_fixture();
    auto sol_red = solve_limit_problem(kCubicMinus, kCubicMinus, 3, {}, {}, {}, {}, true);
    CHECK(sol_red.r0 == doctest::Approx(sol.r0).epsilon(1e-10));
    double gap = 0.0;
    for (int i = 0; i < sol.w.size(); ++i)
        gap = std::max(gap, std::abs(sol.w[i] - interp_value(sol_red.w, sol.w.grid->node(i))));
    CHECK(gap < 1e-8 * sol.w.norm_inf());
}

TEST_CASE("limit problem: annulus pipeline") {
    Domain ann{0.3};
    auto sol = solve_limit_problem(kCubicMinus, kCubicMinus, 3, ann);
    CHECK(sol.newton.converged);
    CHECK(sol.r0 > 0.3);
    CHECK(sol.r0 < 1.0);
    CHECK(sol.w[0] == doctest::Approx(0.0).scale(1e-9));
    auto exp = compute_corrections(sol);
    auto rep = check_nondegeneracy(sol, exp);
    CHECK(rep.pass);
}

TEST_CASE("corrections: imposed boundary values hold exactly") {
    const auto& [sol, exp] = default_fixture();
    CHECK(exp.u1[0] == 1.0);
    CHECK(exp.u1[exp.u1.size() - 1] == 0.0);
    CHECK(exp.u2[0] == 0.0);
    CHECK(exp.u3[0] == 0.0);
    CHECK(exp.v1[exp.v1.size() - 1] == 1.0);
    CHECK(exp.v2[exp.v2.size() - 1] == 0.0);
}

TEST_CASE("corrections: u0''(r0) agrees with the ODE identity") {
    const auto& [sol, exp] = default_fixture();
    // u0'' = f(u0) - (N-1)/r u0' evaluated at r0 where u0 = 0
    const double identity = -(sol.dim - 1) / sol.r0 * sol.psi0;
    CHECK(exp.boundary_data.u0pp == doctest::Approx(identity).epsilon(1e-4));
    const double identity_v = (sol.dim - 1) / sol.r0 * sol.psi0;
    CHECK(exp.boundary_data.v0pp == doctest::Approx(identity_v).epsilon(1e-4));
}

TEST_CASE("corrections: u0'''(r0) matches the differentiated-ODE identity") {
    const auto& [sol, exp] = default_fixture();
    const double n1 = sol.dim - 1;
    const double identity =
        (sol.f.df(0.0) + n1 / (sol.r0 * sol.r0) + (n1 / sol.r0) * (n1 / sol.r0)) * sol.psi0;
    CHECK(exp.boundary_data.u0ppp == doctest::Approx(identity).epsilon(5e-3));
}

TEST_CASE("nondegeneracy: default configuration passes all three gates") {
    const auto& [sol, exp] = default_fixture();
    auto rep = check_nondegeneracy(sol, exp);
    CHECK(rep.pass);
    CHECK(rep.sigma_min_w > 0.0);
    CHECK(rep.sigma_min_u0 > 0.0);
    CHECK(rep.sigma_min_v0 > 0.0);
    CHECK(rep.slope_gap != 0.0);
}

TEST_CASE("nondegeneracy: symmetrized slopes are flagged") {
    const auto& [sol, exp] = default_fixture();
    OuterExpansion tweaked = exp;
    tweaked.boundary_data.v1p = tweaked.boundary_data.u1p;
    auto rep = check_nondegeneracy(sol, tweaked);
    CHECK_FALSE(rep.pass);
    CHECK(rep.failed_condition.find("u1'") != std::string::npos);
}

TEST_CASE("nondegeneracy: sigma_min matches a dense eigensolver oracle") {
    // coarse grid so the dense solve stays small
    auto grid = build_grid(0.0, 1.0, 150, {}, 3);
    const int n = grid->size();
    std::vector<double> q(n);
    // strongly indefinite potential, similar in kind to -3 w^2 shifted
    for (int i = 0; i < n; ++i) q[i] = -250.0 + 40.0 * std::sin(3.0 * grid->node(i));

    BandMatrix a = schrodinger_operator(grid, q, true);
    auto [smin, nrm] = sigma_min_and_norm(a, 400);

    const int m = a.n();
    std::vector<double> dense(m * m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = std::max(0, i - 2); j <= std::min(m - 1, i + 2); ++j)
            dense[i * m + j] = a.at(i, j);
    const double smin_dense = oracle::dense_sigma_min(dense, m);
    CHECK(smin == doctest::Approx(smin_dense).epsilon(1e-8));
}

TEST_CASE("outer family: delta = 0 returns the base profiles") {
    const auto& [sol, exp] = default_fixture();
    auto fam = solve_outer_family(sol, exp, 0.0, 0.0);
    CHECK((fam.u - exp.u0).norm_inf() < 1e-8);
    CHECK((fam.v - exp.v0).norm_inf() < 1e-8);
}

TEST_CASE("outer family: boundary row is exact and positivity holds") {
    const auto& [sol, exp] = default_fixture();
    const double d = 0.05;
    auto fam = solve_outer_family(sol, exp, d, d / 2);
    CHECK(fam.u[0] == doctest::Approx(d).epsilon(1e-13));
    CHECK(fam.v[fam.v.size() - 1] == doctest::Approx(d / 2).epsilon(1e-13));
    CHECK(fam.u_positive);
    CHECK(fam.v_positive);
    CHECK_THROWS(solve_outer_family(sol, exp, 10.0 * sol.psi0, 0.0));
}

TEST_CASE("outer family: k-term truncations drop at order k+1") {
    const auto& [sol, exp] = default_fixture();
    const std::vector<double> deltas = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    std::vector<double> e1, e2, e3;
    for (double d : deltas) {
        auto fam = solve_outer_family(sol, exp, d, 0.0);
        long double m1 = 0, m2 = 0, m3 = 0;
        const long double dl = d;
        for (size_t i = 0; i < fam.u_hp.size(); ++i) {
            const long double base = exp.u0_hp[i];
            m1 = std::max(m1, std::abs(fam.u_hp[i] - base - dl * exp.u1_hp[i]));
            m2 = std::max(m2, std::abs(fam.u_hp[i] - base - dl * exp.u1_hp[i] -
                                       dl * dl * exp.u2_hp[i]));
            m3 = std::max(m3, std::abs(fam.u_hp[i] - base - dl * exp.u1_hp[i] -
                                       dl * dl * exp.u2_hp[i] - dl * dl * dl * exp.u3_hp[i]));
        }
        e1.push_back(static_cast<double>(m1));
        e2.push_back(static_cast<double>(m2));
        e3.push_back(static_cast<double>(m3));
    }
    CHECK(loglog_slope(deltas, e1) >= 1.7);
    CHECK(loglog_slope(deltas, e2) >= 2.7);
    CHECK(loglog_slope(deltas, e3) >= 3.7);
}

TEST_CASE("outer family: (u0 + delta u1) differs from the family at O(delta^2)") {
    const auto& [sol, exp] = default_fixture();
    const std::vector<double> deltas = {3e-2, 1e-2, 3e-3};
    std::vector<double> errs;
    for (double d : deltas) {
        auto fam = solve_outer_family(sol, exp, d, 0.0);
        double m = 0;
        for (int i = 0; i < fam.u.size(); ++i)
            m = std::max(m, std::abs(fam.u[i] - exp.u0[i] - d * exp.u1[i]));
        errs.push_back(m);
    }
    CHECK(loglog_slope(deltas, errs) >= 1.9);
}
