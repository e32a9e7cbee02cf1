#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpseg/pipeline.hpp"
#include "gpseg/util.hpp"

using namespace gpseg;

namespace {

Pipeline& shared_pipeline() {
    static Pipeline pipe{PipelineConfig{}};
    return pipe;
}

}  // namespace

TEST_CASE("cutoff: edge values, symmetry, derivative bounds") {
    auto& pipe = shared_pipeline();
    const double r0 = pipe.outer().sol.r0;
    const double rho = pipe.inner().edge_scale;
    for (double g : {1e4, 1e6, 1e8}) {
        auto c = build_cutoff(g, r0, 0.0, 1.0, rho);
        CHECK(c.zeta(r0) == 0.0);
        CHECK(c.zeta(1.0) == 1.0);
        CHECK(c.zeta(0.0) == 1.0);
        // symmetric in |r - r0|
        CHECK(c.zeta(r0 + 0.6 * c.outer_edge) ==
              doctest::Approx(c.zeta(r0 - 0.6 * c.outer_edge)).epsilon(1e-14));
        CHECK(c.inner_edge == doctest::Approx(rho * std::log(g) * std::pow(g, -0.25)));
    }
    // |zeta'| |ln g| g^-1/4 is uniform across the ladder (spread <= 1.01)
    std::vector<double> bound;
    for (double g : {1e4, 1e6, 1e8}) {
        auto c = build_cutoff(g, r0, 0.0, 1.0, rho);
        bound.push_back(c.max_dzeta * std::log(g) * std::pow(g, -0.25));
    }
    const double spread = *std::max_element(bound.begin(), bound.end()) /
                          *std::min_element(bound.begin(), bound.end());
    CHECK(spread <= 1.01);
    CHECK_THROWS(build_cutoff(5.0, r0, 0.0, 1.0, rho));       // g below e^2
    CHECK_THROWS(build_cutoff(1e4, r0, 0.0, 1.0, 100.0));     // edges out of domain
}

TEST_CASE("assemble: gluing identities at the zeta extremes") {
    auto& pipe = shared_pipeline();
    auto c = pipe.construct(1e6);
    const auto& gr = *c.ap.grid;
    int checked_inner = 0, checked_outer = 0;
    for (int i = 0; i < gr.size(); ++i) {
        const double r = gr.node(i);
        const double z = c.ap.cutoff.zeta(r);
        if (z <= 0.0) {
            CHECK(c.ap.u_ap[i] == c.ap.inner->u(r));
            CHECK(c.ap.v_ap[i] == c.ap.inner->v(r));
            ++checked_inner;
        } else if (z >= 1.0 && ++checked_outer) {
            CHECK(c.ap.u_ap[i] == c.ap.outer->u(r));
            CHECK(c.ap.v_ap[i] == c.ap.outer->v(r));
        }
        if (checked_inner > 40 && checked_outer > 40) break;
    }
    CHECK(checked_inner > 0);
    CHECK(checked_outer > 0);
    // continuity across the blend: no jumps beyond neighbour-scale variation
    for (int i = 1; i + 1 < gr.size(); ++i) {
        const double dz = c.ap.cutoff.dzeta(gr.node(i));
        if (dz == 0.0) continue;
        const double h = gr.node(i + 1) - gr.node(i);
        const double jump = std::abs(c.ap.u_ap[i + 1] - c.ap.u_ap[i]);
        CHECK(jump <= 100.0 * h * (std::abs(c.ap.inner->du(gr.node(i))) +
                                   std::abs(dz) * c.ap.overlap_gap_u + 1.0));
    }
}

TEST_CASE("overlap gap scales like |ln g|^4 / g") {
    auto& pipe = shared_pipeline();
    std::vector<double> gs = {1e4, 1e6, 1e8};
    std::vector<double> ovl;
    for (double g : gs) {
        auto c = pipe.construct(g);
        ovl.push_back(std::max(c.ap.overlap_gap_u, c.ap.overlap_gap_v) /
                      std::pow(std::log(g), 4.0));
    }
    CHECK(loglog_slope(gs, ovl) == doctest::Approx(-1.0).epsilon(0.15));
}

TEST_CASE("remainder: outer rows at solver tolerance, inner zone scaled") {
    auto& pipe = shared_pipeline();
    auto c = pipe.construct(1e6);
    CHECK(c.remainder.zero_outside <=
          1e3 * std::max(c.family->newton_u.final_residual,
                         c.family->newton_v.final_residual));
    CHECK(c.remainder.sup_core > 0.0);
    CHECK(std::isfinite(c.remainder.exp_tail_check));
}

TEST_CASE("weighted norms: explicit values and overflow guard") {
    auto grid = build_grid(0.0, 1.0, 64, {}, 3);
    const double r0 = 0.5, g = 1e8, gamma = 0.5;
    WeightedNormEvaluator ev{gamma, g, r0};

    GridFunction zero(grid, 0.0), one(grid, 1.0);
    CHECK(weighted_norm(zero, zero, 0, ev) == 0.0);
    CHECK(weighted_norm(zero, zero, 1, ev) == 0.0);
    CHECK(weighted_norm(zero, zero, 2, ev) == 0.0);

    // pair supported at one node r = r0 + g^-1/4: w2 weight is exactly 2
    GridFunction spike(grid, 0.0);
    const double s = std::pow(g, -0.25);
    // build a grid containing that node exactly
    std::vector<double> nodes = {0.0, 0.25, r0, r0 + s, 0.75, 1.0};
    auto g2 = std::make_shared<RadialGrid>(nodes, 3);
    GridFunction sp(g2, 0.0), z2(g2, 0.0);
    sp[3] = 3.0;
    CHECK(weighted_norm(sp, z2, 2, ev) == doctest::Approx(6.0).epsilon(1e-12));
    // second component weighted with the mirrored orientation
    CHECK(weighted_norm(z2, sp, 2, ev) ==
          doctest::Approx(3.0 * std::exp(std::pow(g, 0.25) * s)).epsilon(1e-12));

    // exponential overflow rejected (needs g^(1/4) |s| > 700)
    GridFunction ones(g2, 1.0);
    WeightedNormEvaluator ev_huge{gamma, 1e16, r0};
    CHECK_THROWS_AS(weighted_norm(ones, ones, 1, ev_huge), std::overflow_error);

    // constants: i = 1 weight of the first component is 1 on s >= 0
    std::vector<double> right = {r0, 0.6, 0.7, 1.0};
    auto g3 = std::make_shared<RadialGrid>(right, 3);
    GridFunction c1(g3, 1.0), zz(g3, 0.0);
    CHECK(weighted_norm(c1, zz, 1, ev) == doctest::Approx(1.0));

    // pointwise weight inequalities w1 <= w2 and w0 <= w2
    Rng rng(9);
    for (int k = 0; k < 200; ++k) {
        const double ss = rng.uniform(-0.5, 0.5);
        CHECK(log_weight(1, ss, g, gamma) <= log_weight(2, ss, g, gamma) + 1e-15);
        CHECK(log_weight(0, ss, g, gamma) <= log_weight(2, ss, g, gamma) + 1e-15);
    }
}

TEST_CASE("verify_s2_s3 gaps shrink along the ladder") {
    auto& pipe = shared_pipeline();
    std::vector<double> gs = {1e4, 1e6, 1e8};
    std::vector<double> s2, s3;
    for (double g : gs) {
        auto c = pipe.construct(g);
        s2.push_back(c.s2s3.gap_s2_u);
        s3.push_back(c.s2s3.gap_s3_u);
    }
    CHECK(loglog_slope(gs, s2) == doctest::Approx(-0.5).epsilon(0.1 / 0.5));
    CHECK(loglog_slope(gs, s3) == doctest::Approx(-0.25).epsilon(0.1 / 0.25));
}
