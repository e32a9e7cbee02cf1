#include "gpseg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "gpseg/interp.hpp"
#include "gpseg/util.hpp"

namespace gpseg {

Pipeline::Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.g_list.empty()) throw std::invalid_argument("Pipeline: empty g list");
    for (double g : cfg_.g_list)
        if (!(g >= 1e3)) throw std::invalid_argument("Pipeline: g must be >= 1e3");
    if (!(cfg_.gamma > 0.0 && cfg_.gamma < 1.0))
        throw std::invalid_argument("Pipeline: gamma must lie in (0,1)");
}

const OuterStage& Pipeline::outer() {
    if (!outer_) {
        OuterStage st{solve_limit_problem(cfg_.f, cfg_.h, cfg_.dim, cfg_.domain,
                                          cfg_.outer_grid),
                      {}, {}};
        st.exp = compute_corrections(st.sol, cfg_.outer_grid);
        st.nondegeneracy = check_nondegeneracy(st.sol, st.exp);
        if (!st.nondegeneracy.pass)
            throw std::runtime_error("pipeline: nondegeneracy gate failed: " +
                                     st.nondegeneracy.failed_condition);
        outer_ = std::move(st);
    }
    return *outer_;
}

const InnerStage& Pipeline::inner() {
    if (!inner_) {
        const OuterStage& st = outer();
        const double g_min = *std::min_element(cfg_.g_list.begin(), cfg_.g_list.end());
        const double g_max = *std::max_element(cfg_.g_list.begin(), cfg_.g_list.end());
        InnerStage in;
        in.edge_scale = fit_edge_scale(g_min, st.sol.r0, cfg_.domain.inner_radius, 1.0,
                                       cfg_.cutoff_margin);

        // truncation: cover the blend zone in t units plus the translation
        // xi and the fit windows; bound xi from the closed form before the
        // profile is even solved (k <= psi0 T is crude but enough here)
        const double lngmax = std::log(g_max);
        const double slope_gap = std::abs(st.exp.boundary_data.u1p - st.exp.boundary_data.v1p);
        const double slope_sum = std::abs(st.exp.boundary_data.u1p + st.exp.boundary_data.v1p);
        // |xi| g^{1/4} <= (|k| (|u1p+v1p|) + 2 |b0|) / (psi0 gap); use a
        // generous placeholder for k and b0 of a few sqrt(psi0)
        const double kb = 4.0 * std::sqrt(st.sol.psi0) * (1.0 + slope_sum);
        const double xi_bound = kb / (st.sol.psi0 * slope_gap) + 1.0;
        const double t_needed = 1.3 * (2.0 * in.edge_scale * lngmax + xi_bound) + 5.0;
        in.T = std::max(cfg_.profile_T_min, t_needed);
        in.n_nodes = static_cast<int>(2.0 * in.T / cfg_.profile_spacing) + 1;
        in.profile = std::make_shared<BlowupProfile>(
            solve_profile(st.sol.psi0, in.T, in.n_nodes));
        auto corr = std::make_shared<InnerCorrections>(
            compute_phi0(*in.profile, st.sol.r0, cfg_.dim));
        // build the phi1 block cache once; per-g constructions copy it
        compute_phi1(*in.profile, *corr, cfg_.f.df(0.0), cfg_.h.df(0.0), 1e6, 1.0,
                     0.0, 0.0, 0.0);
        in.base_corr = corr;
        inner_ = std::move(in);
    }
    return *inner_;
}

MatchingInputs Pipeline::base_inputs() {
    const OuterStage& st = outer();
    const InnerStage& in = inner();
    MatchingInputs mi;
    mi.psi0 = in.profile->psi0;
    mi.k = in.profile->k;
    mi.b0 = in.base_corr->b0;
    const auto& bd = st.exp.boundary_data;
    mi.u1p = bd.u1p;
    mi.u2p = bd.u2p;
    mi.u3p = bd.u3p;
    mi.v1p = bd.v1p;
    mi.v2p = bd.v2p;
    mi.v3p = bd.v3p;
    mi.u0pp = bd.u0pp;
    mi.v0pp = bd.v0pp;
    mi.u0ppp = bd.u0ppp;
    mi.v0ppp = bd.v0ppp;
    mi.f_prime0 = cfg_.f.df(0.0);
    mi.h_prime0 = cfg_.h.df(0.0);
    mi.r0 = st.sol.r0;
    mi.dim = cfg_.dim;
    return mi;
}

Construction Pipeline::construct(double g) {
    const OuterStage& st = outer();
    const InnerStage& in = inner();

    Construction c;
    c.g = g;
    c.inputs = base_inputs();
    c.inputs.g = g;
    c.o1 = solve_order1(c.inputs);

    // phi1's (a1, b1) depend on B0 which the second system produces; the
    // coupling is O(g^-1/2) so a short fixed point settles it
    auto corr = std::make_shared<InnerCorrections>(*in.base_corr);
    double A0 = 0.0, B0 = 0.0;
    const double mu = 1.0 + c.o1.mu1;
    for (int it = 0; it < 25; ++it) {
        compute_phi1(*in.profile, *corr, c.inputs.f_prime0, c.inputs.h_prime0, g, mu,
                     c.o1.xi, A0, B0);
        c.inputs.a1 = corr->a1;
        c.inputs.b1 = corr->b1;
        c.o2 = solve_order2(c.inputs, c.o1);
        c.phi1_iterations = it + 1;
        if (std::abs(c.o2.B0 - B0) <= 1e-14 * std::max(1.0, std::abs(c.o2.B0)) &&
            std::abs(c.o2.A0 - A0) <= 1e-14 * std::max(1.0, std::abs(c.o2.A0)))
            break;
        A0 = c.o2.A0;
        B0 = c.o2.B0;
    }
    c.o3 = solve_order3(c.inputs, c.o1, c.o2);
    c.params = combine(c.o1, c.o2, c.o3);
    c.corr = corr;

    c.family = std::make_shared<OuterFamily>(
        solve_outer_family(st.sol, st.exp, c.params.delta(), c.params.delta_tilde()));

    auto cutoff = build_cutoff(g, st.sol.r0, cfg_.domain.inner_radius, 1.0,
                               in.edge_scale);
    auto outer_eval = std::make_shared<OuterEvaluator>(c.family, st.sol.r0);
    auto inner_eval = std::make_shared<InnerEvaluator>(
        in.profile, corr, c.params, g, c.inputs.f_prime0, c.inputs.h_prime0);
    c.ap = assemble(outer_eval, inner_eval, cutoff);
    c.remainder = compute_remainder(c.ap, cfg_.f, cfg_.h);
    c.s2s3 = verify_s2_s3(c.inputs, c.params);
    return c;
}

GridPtr Pipeline::solver_grid(double g) {
    auto it = solver_grids_.find(g);
    if (it != solver_grids_.end()) return it->second;
    const OuterStage& st = outer();
    auto grid = build_solver_grid(g, st.sol.r0, cfg_.domain.inner_radius, 1.0,
                                  inner().edge_scale, cfg_.dim, cfg_.solver_base_count);
    solver_grids_[g] = grid;
    return grid;
}

GPSolution Pipeline::solve(const Construction& c) {
    GpSystem sys(solver_grid(c.g), cfg_.f, cfg_.h, c.g);
    return newton_full(sys, c.ap, cfg_.gp_tol, cfg_.gp_max_iter);
}

GPSolution Pipeline::solve_picard(const Construction& c) {
    GpSystem sys(solver_grid(c.g), cfg_.f, cfg_.h, c.g);
    return picard_full(sys, c.ap, cfg_.gp_tol);
}

namespace {

RateReport fit_rate(const std::vector<double>& gs, const std::vector<double>& errs) {
    RateReport r;
    r.g_list = gs;
    r.errors = errs;
    std::vector<double> lx, ly;
    for (size_t i = 0; i < gs.size(); ++i) {
        if (errs[i] > 0.0) {
            lx.push_back(std::log(gs[i]));
            ly.push_back(std::log(errs[i]));
        }
    }
    if (lx.size() >= 2) {
        auto ab = linear_fit(lx, ly);
        r.fitted_slope = ab.second;
        r.fit_residual = linear_fit_residual(lx, ly, ab.first, ab.second);
    }
    return r;
}

}  // namespace

SweepResult run_sweep(Pipeline& pipe, int threads) {
    const auto& cfg = pipe.config();
    const auto& st = pipe.outer();
    pipe.inner();  // materialize the shared stages before any parallel work
    SweepResult out;
    std::vector<double> gs = cfg.g_list;
    std::sort(gs.begin(), gs.end());
    for (double g : gs) pipe.solver_grid(g);

    std::vector<Construction> cons(gs.size());
    std::vector<GPSolution> sols(gs.size());
    {
        std::atomic<size_t> next{0};
        auto worker = [&]() {
            for (size_t i = next.fetch_add(1); i < gs.size(); i = next.fetch_add(1)) {
                cons[i] = pipe.construct(gs[i]);
                try {
                    sols[i] = pipe.solve(cons[i]);
                } catch (const NewtonError&) {
                    // continuation fallback: reuse the nearest smaller
                    // converged ladder point as a secondary seed
                    size_t j = i;
                    while (j > 0 && sols[--j].u.size() == 0) {
                    }
                    if (j >= i || sols[j].u.size() == 0) throw;
                    GpSystem sys(pipe.solver_grid(gs[i]), cfg.f, cfg.h, gs[i]);
                    const RadialGrid& gr = sys.grid();
                    std::vector<double> us(gr.size()), vs(gr.size());
                    for (int m = 0; m < gr.size(); ++m) {
                        us[m] = interp_value(sols[j].u, gr.node(m));
                        vs[m] = interp_value(sols[j].v, gr.node(m));
                    }
                    sols[i] = newton_full(sys, cons[i].ap, cfg.gp_tol, cfg.gp_max_iter,
                                          &us, &vs);
                }
            }
        };
        const int nw = std::max(1, std::min<int>(threads, static_cast<int>(gs.size())));
        std::vector<std::thread> pool;
        for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
    }

    std::vector<double> err_u, err_v, err_in, corr1, drift, overlap, rem;
    for (size_t gi = 0; gi < gs.size(); ++gi) {
        const double g = gs[gi];
        auto& c = cons[gi];
        auto& sol = sols[gi];

        const RadialGrid& gr = *sol.u.grid;
        const double r0 = st.sol.r0;
        const double xi = c.params.xi;
        double eu = 0, ev = 0, ei = 0;
        const double g4 = std::pow(g, -0.25);
        const double inner_halfwidth = 3.0 * g4;
        for (int i = 0; i < gr.size(); ++i) {
            const double r = gr.node(i);
            const double w = interp_value(st.sol.w, r);
            eu = std::max(eu, std::abs(sol.u[i] - std::max(w, 0.0)));
            ev = std::max(ev, std::abs(sol.v[i] - std::max(-w, 0.0)));
            if (std::abs(r - r0 - xi) <= inner_halfwidth) {
                const double t = std::pow(g, 0.25) * (r - r0 - xi);
                const double uref = g4 * c.ap.inner->profile().eval(
                                             c.ap.inner->profile().U, t, 0);
                ei = std::max(ei, std::abs(sol.u[i] - uref));
            }
        }
        err_u.push_back(eu);
        err_v.push_back(ev);
        err_in.push_back(ei);
        corr1.push_back(sol.correction_norm1);
        drift.push_back(std::abs(sol.interface_radius - r0 - xi));
        const double lng4 = std::pow(std::log(g), 4.0);
        overlap.push_back(std::max(c.ap.overlap_gap_u, c.ap.overlap_gap_v) / lng4);
        rem.push_back(c.remainder.sup_core / lng4);

        out.constructions.push_back(std::move(c));
        out.solutions.push_back(std::move(sol));
    }
    out.rate_u = fit_rate(gs, err_u);
    out.rate_v = fit_rate(gs, err_v);
    out.rate_inner = fit_rate(gs, err_in);
    out.correction = fit_rate(gs, corr1);
    out.interface_drift = fit_rate(gs, drift);
    out.overlap = fit_rate(gs, overlap);
    out.remainder = fit_rate(gs, rem);
    return out;
}

std::vector<double> linear_apriori_probe(Pipeline& pipe, const Construction& c,
                                         int n_probes, uint64_t seed) {
    const auto& cfg = pipe.config();
    GpSystem sys(pipe.solver_grid(c.g), cfg.f, cfg.h, c.g);
    const RadialGrid& gr = sys.grid();
    const int n = gr.size();
    auto [u_ap, v_ap] = sample_approximation(c.ap, gr);
    LinearizedOperator lin(sys, u_ap, v_ap);

    const double r0 = c.ap.cutoff.r0;
    const double g4 = std::pow(c.g, -0.25);
    WeightedNormEvaluator ev{cfg.gamma, c.g, r0};

    Rng rng(seed);
    std::vector<double> ratios;
    for (int p = 0; p < n_probes; ++p) {
        GridFunction F(sys.grid_ptr(), 0.0), H(sys.grid_ptr(), 0.0);
        // mixture of layer-scale bumps near r0 and O(1) bumps on the correct
        // sides, built so that both weighted norms stay finite
        for (int b = 0; b < 3; ++b) {
            const double cF = r0 + g4 * rng.uniform(-2.0, 2.0);
            const double wF = g4 * rng.uniform(0.5, 1.5);
            const double aF = rng.uniform(-1.0, 1.0);
            const double cH = r0 + g4 * rng.uniform(-2.0, 2.0);
            const double wH = g4 * rng.uniform(0.5, 1.5);
            const double aH = rng.uniform(-1.0, 1.0);
            for (int i = 0; i < n; ++i) {
                const double r = gr.node(i);
                const double zF = (r - cF) / wF, zH = (r - cH) / wH;
                F[i] += aF * std::exp(-zF * zF);
                H[i] += aH * std::exp(-zH * zH);
            }
        }
        // outer-side smooth component (weight w2 is polynomial there)
        const double cu = rng.uniform(r0 + 0.2 * (1.0 - r0), r0 + 0.8 * (1.0 - r0));
        const double cv = rng.uniform(0.2 * r0, 0.8 * r0);
        const double au = rng.uniform(-1.0, 1.0), av = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < n; ++i) {
            const double r = gr.node(i);
            const double zu = (r - cu) / (0.1 * (1.0 - r0));
            const double zv = (r - cv) / (0.1 * r0);
            F[i] += au * std::exp(-zu * zu);
            H[i] += av * std::exp(-zv * zv);
        }
        auto [phi, psi] = lin.solve(F.values, H.values);
        GridFunction phig(sys.grid_ptr(), std::move(phi));
        GridFunction psig(sys.grid_ptr(), std::move(psi));
        const double n1 = weighted_norm(phig, psig, 1, ev);
        const double n2 = weighted_norm(F, H, 2, ev);
        ratios.push_back(n1 / (g4 * n2));
    }
    return ratios;
}

}  // namespace gpseg
