#include "gpseg/report.hpp"

#include <algorithm>
#include <cstdarg>
#include <ctime>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gpseg/interp.hpp"
#include "gpseg/util.hpp"

namespace gpseg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json rate_json(const RateReport& r) {
    return {{"g_list", r.g_list},
            {"errors", r.errors},
            {"fitted_slope", r.fitted_slope},
            {"fit_residual", r.fit_residual}};
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<const std::vector<double>*>& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (size_t c = 0; c < columns.size(); ++c)
        out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    const size_t rows = data.empty() ? 0 : data[0]->size();
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < data.size(); ++c)
            out << fmt17((*data[c])[r]) << (c + 1 < data.size() ? "," : "\n");
}

// ---------------------------------------------------------------------------
// Acceptance criteria

namespace {

CriterionResult criterion(int id, std::string name, bool pass, double value,
                          std::string detail) {
    return {id, std::move(name), pass, value, std::move(detail)};
}

char buf_[256];
std::string fmt(const char* f, ...) {
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf_, sizeof(buf_), f, ap);
    va_end(ap);
    return buf_;
}

}  // namespace

AcceptanceReport run_acceptance(const ExperimentConfig& cfg,
                                const AcceptanceOptions& opt) {
    AcceptanceReport rep;
    const PipelineConfig& pc = cfg.pipeline;

    // 1. profile symmetry and phase stability
    {
        auto p = solve_profile(1.0, cfg.blowup_T, cfg.blowup_n_nodes);
        auto p2 = solve_profile(1.0, cfg.blowup_T, 2 * cfg.blowup_n_nodes);
        auto p3 = solve_profile(1.0, cfg.blowup_T + 2.0,
                                cfg.blowup_n_nodes * (cfg.blowup_T + 2.0) / cfg.blowup_T);
        const double drel = std::max(std::abs(p2.k - p.k), std::abs(p3.k - p.k)) /
                            std::abs(p.k);
        const bool pass = p.symmetry_defect <= 1e-8 && p.k > 0.0 && drel <= 1e-7;
        rep.criteria.push_back(criterion(
            1, "profile symmetry and phase", pass, drel,
            fmt("sym=%.2e, k=%.9f, refinement drift=%.2e rel", p.symmetry_defect, p.k,
                drel)));
    }

    // 2. scaling covariance: the mu = 2 orbit member 2 U(2t)
    {
        auto base = solve_profile(1.0, 2.0 * cfg.blowup_T, 2 * cfg.blowup_n_nodes);
        auto scaled = solve_profile(4.0, cfg.blowup_T, cfg.blowup_n_nodes);
        double gap = 0.0;
        for (int j = 0; j < scaled.n; ++j) {
            gap = std::max(gap, std::abs(scaled.U[j] -
                                         2.0 * base.eval(base.U, 2.0 * scaled.t[j])));
            gap = std::max(gap, std::abs(scaled.V[j] -
                                         2.0 * base.eval(base.V, 2.0 * scaled.t[j])));
        }
        rep.criteria.push_back(criterion(2, "profile scaling covariance", gap <= 1e-6,
                                         gap, fmt("sup gap vs 2 U(2t): %.2e", gap)));
    }

    // 3. growth solver vs the quadrature formulas
    {
        auto p = solve_profile(1.0, cfg.blowup_T, cfg.blowup_n_nodes);
        GrowthSolver solver(p);
        Rng rng(pc.seed ^ 0xacc3ull);
        double worst_b = 0, worst_sum = 0;
        for (int probe = 0; probe < 5; ++probe) {
            std::vector<double> H(p.n, 0.0), Ht(p.n, 0.0);
            for (int nb = 0; nb < 3; ++nb) {
                const double cH = rng.uniform(-2.5, 2.5), wH = rng.uniform(0.3, 0.8);
                const double aH = rng.uniform(-2.0, 2.0);
                const double cT = rng.uniform(-2.5, 2.5), wT = rng.uniform(0.3, 0.8);
                const double aT = rng.uniform(-2.0, 2.0);
                for (int j = 0; j < p.n; ++j) {
                    const double zH = (p.t[j] - cH) / wH, zT = (p.t[j] - cT) / wT;
                    H[j] += aH * std::exp(-zH * zH);
                    Ht[j] += aT * std::exp(-zT * zT);
                }
            }
            auto sol = solver.solve(H, Ht);
            worst_b = std::max(worst_b, std::abs(sol.b_fit - solver.b_integral(H, Ht)));
            worst_sum = std::max(worst_sum, std::abs(sol.a_plus + sol.a_minus -
                                                     solver.sum_integral(H, Ht)));
        }
        const double worst = std::max(worst_b, worst_sum);
        rep.criteria.push_back(criterion(
            3, "growth solver integral formulas", worst <= 1e-6, worst,
            fmt("max |b gap|=%.2e, max |a sum gap|=%.2e over 5 probes", worst_b,
                worst_sum)));
    }

    Pipeline pipe{pc};

    // 4. outer expansion order
    {
        const auto& st = pipe.outer();
        const std::vector<double> deltas = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
        std::vector<double> errs;
        for (double d : deltas) {
            auto fam = solve_outer_family(st.sol, st.exp, d, 0.0);
            long double m = 0;
            const long double dl = d;
            for (size_t i = 0; i < fam.u_hp.size(); ++i) {
                const long double diff =
                    fam.u_hp[i] - st.exp.u0_hp[i] - dl * st.exp.u1_hp[i] -
                    dl * dl * st.exp.u2_hp[i] - dl * dl * dl * st.exp.u3_hp[i];
                m = std::max(m, std::abs(diff));
            }
            errs.push_back(static_cast<double>(m));
        }
        const double slope = loglog_slope(deltas, errs);
        rep.criteria.push_back(criterion(4, "outer expansion order", slope >= 3.7,
                                         slope, fmt("residual slope %.3f", slope)));
    }

    // 5. matching closed forms
    {
        Rng rng(pc.seed ^ 0x5eedull);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            MatchingInputs in;
            in.psi0 = rng.uniform(0.5, 60.0);
            in.k = rng.uniform(0.1, 5.0);
            in.b0 = rng.uniform(-2.0, 2.0);
            in.u1p = rng.uniform(-10.0, -2.0);
            in.v1p = rng.uniform(0.5, 5.0);
            in.r0 = rng.uniform(0.2, 0.8);
            in.dim = 3;
            in.g = std::pow(10.0, rng.uniform(4.0, 8.0));
            auto num = solve_order1(in);
            auto cf = order1_closed_form(in);
            auto rel = [](double a, double b) {
                return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
            };
            worst = std::max({worst, rel(num.xi, cf.xi), rel(num.mu1, cf.mu1),
                              rel(num.delta1, cf.delta1),
                              rel(num.delta_tilde1, cf.delta_tilde1)});
        }
        rep.criteria.push_back(criterion(5, "matching closed forms", worst <= 1e-12,
                                         worst,
                                         fmt("max relative gap %.2e over 10 draws", worst)));
    }

    // 6-8 share the construct ladder; 9-12 add solves
    std::vector<double> gs = pc.g_list;
    std::sort(gs.begin(), gs.end());
    std::vector<Construction> cons;
    for (double g : gs) cons.push_back(pipe.construct(g));

    // 6. matching magnitude laws
    {
        std::vector<double> d1, d2, d3;
        for (const auto& c : cons) {
            d1.push_back(std::abs(c.params.delta1));
            d2.push_back(std::abs(c.params.delta2));
            d3.push_back(std::abs(c.params.delta3));
        }
        const double s1 = loglog_slope(gs, d1);
        const double s2 = loglog_slope(gs, d2);
        const double s3 = loglog_slope(gs, d3);
        const bool pass = std::abs(s1 + 0.25) <= 0.05 && std::abs(s2 + 0.50) <= 0.05 &&
                          std::abs(s3 + 0.75) <= 0.05;
        rep.criteria.push_back(criterion(
            6, "matching magnitude laws", pass, s2,
            fmt("slopes %.3f / %.3f / %.3f (targets -.25/-.50/-.75)", s1, s2, s3)));
    }

    // 7. overlap estimate
    {
        std::vector<double> ovl;
        for (const auto& c : cons) {
            const double l4 = std::pow(std::log(c.g), 4.0);
            ovl.push_back(std::max(c.ap.overlap_gap_u, c.ap.overlap_gap_v) / l4);
        }
        const double slope = loglog_slope(gs, ovl);
        rep.criteria.push_back(criterion(7, "overlap estimate", std::abs(slope + 1.0) <= 0.15,
                                         slope, fmt("|ln g|^-4 overlap slope %.3f", slope)));
    }

    // 8. remainder scaling
    {
        std::vector<double> rem, rem2;
        double worst_zero = 0.0, worst_tol = 0.0;
        for (const auto& c : cons) {
            rem.push_back(c.remainder.sup_core / std::pow(std::log(c.g), 4.0));
            rem2.push_back(c.remainder.sup_core / std::pow(std::log(c.g), 2.0));
            worst_zero = std::max(worst_zero, c.remainder.zero_outside);
            worst_tol = std::max(
                worst_tol, std::max(c.family->newton_u.final_residual,
                                    c.family->newton_v.final_residual));
        }
        const double slope = loglog_slope(gs, rem);
        const double slope2 = loglog_slope(gs, rem2);
        const bool zero_ok = worst_zero <= 10.0 * worst_tol;
        const bool pass = std::abs(slope + 0.5) <= 0.1 && zero_ok;
        rep.criteria.push_back(criterion(
            8, "remainder scaling", pass, slope,
            fmt("|ln g|^-4 slope %.3f (|ln g|^-2 slope %.3f); zero-outside %.2e vs 10x tol %.2e",
                slope, slope2, worst_zero, 10.0 * worst_tol)));
    }

    if (opt.quick) return rep;

    // 9-11 need the nonlinear solves
    std::vector<GPSolution> sols;
    for (const auto& c : cons) sols.push_back(pipe.solve(c));

    // 9. Newton convergence from the seed
    {
        int worst_it = 0;
        double worst_res = 0.0, worst_min = 1e300;
        for (const auto& s : sols) {
            worst_it = std::max(worst_it, s.report.iterations);
            worst_res = std::max(worst_res, s.report.final_residual);
            worst_min = std::min({worst_min, s.min_u, s.min_v});
        }
        // far-tail values sit at sub-underflow noise around zero; positivity
        // is gated relative to the solution scale
        const bool pass = worst_it <= 6 && worst_res <= 1e-9 && worst_min >= -1e-12;
        rep.criteria.push_back(criterion(
            9, "Newton convergence from the seed", pass, static_cast<double>(worst_it),
            fmt("max iterations %d, max residual %.2e, min component %.1e", worst_it,
                worst_res, worst_min)));
    }

    // 10. solution rates
    {
        const auto& st = pipe.outer();
        std::vector<double> eu, ev, ei;
        for (size_t i = 0; i < sols.size(); ++i) {
            const auto& s = sols[i];
            const auto& c = cons[i];
            const RadialGrid& gr = *s.u.grid;
            double mu = 0, mv = 0, mi = 0;
            const double g4 = std::pow(c.g, -0.25);
            for (int j = 0; j < gr.size(); ++j) {
                const double r = gr.node(j);
                const double w = interp_value(st.sol.w, r);
                mu = std::max(mu, std::abs(s.u[j] - std::max(w, 0.0)));
                mv = std::max(mv, std::abs(s.v[j] - std::max(-w, 0.0)));
                if (std::abs(r - st.sol.r0 - c.params.xi) <= 3.0 * g4) {
                    const double t = std::pow(c.g, 0.25) * (r - st.sol.r0 - c.params.xi);
                    const double uref =
                        g4 * c.ap.inner->profile().eval(c.ap.inner->profile().U, t);
                    mi = std::max(mi, std::abs(s.u[j] - uref));
                }
            }
            eu.push_back(mu);
            ev.push_back(mv);
            ei.push_back(mi);
        }
        const double su = loglog_slope(gs, eu);
        const double sv = loglog_slope(gs, ev);
        const double si = loglog_slope(gs, ei);
        // a large fit residual flags a pre-asymptotic ladder
        std::vector<double> lx, ly;
        for (size_t i = 0; i < gs.size(); ++i) {
            lx.push_back(std::log(gs[i]));
            ly.push_back(std::log(eu[i]));
        }
        auto ab = linear_fit(lx, ly);
        const double fit_res = linear_fit_residual(lx, ly, ab.first, ab.second);
        const bool pass = std::abs(su + 0.25) <= 0.05 && std::abs(sv + 0.25) <= 0.05 &&
                          std::abs(si + 0.5) <= 0.1;
        std::string detail = fmt("slopes u %.3f, v %.3f (target -0.25); inner %.3f (target -0.5)",
                                 su, sv, si);
        if (fit_res > 1.0) detail += " [pre-asymptotic: extend the ladder]";
        rep.criteria.push_back(criterion(10, "solution convergence rates", pass, su,
                                         std::move(detail)));
    }

    // 11. final-correction ball
    {
        std::vector<double> n1;
        for (const auto& s : sols) n1.push_back(s.correction_norm1);
        const double slope = loglog_slope(gs, n1);
        rep.criteria.push_back(criterion(11, "final-correction ball",
                                         std::abs(slope + 0.75) <= 0.15, slope,
                                         fmt("||.||_1 correction slope %.3f", slope)));
    }

    // 12. linear a-priori probe
    {
        std::vector<double> maxima;
        for (const auto& c : cons) {
            auto ratios = linear_apriori_probe(pipe, c, 20, pc.seed ^ 0xab0ull);
            maxima.push_back(*std::max_element(ratios.begin(), ratios.end()));
        }
        const double grow = maxima.back() / maxima.front();
        rep.criteria.push_back(criterion(
            12, "linear a-priori probe", grow <= 2.0, grow,
            fmt("ratio max at g_max / g_min = %.3f (max %.3e, min-g max %.3e)", grow,
                maxima.back(), maxima.front())));
    }

    return rep;
}

// ---------------------------------------------------------------------------
// CLI stages

namespace {

std::string outdir(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    return cfg.output_dir;
}

json construction_json(const Construction& c) {
    json j;
    j["g"] = c.g;
    j["xi"] = c.params.xi;
    j["mu1"] = c.params.mu1;
    j["delta1"] = c.params.delta1;
    j["delta2"] = c.params.delta2;
    j["delta3"] = c.params.delta3;
    j["delta_tilde1"] = c.params.delta_tilde1;
    j["delta_tilde2"] = c.params.delta_tilde2;
    j["delta_tilde3"] = c.params.delta_tilde3;
    j["A0"] = c.params.A0;
    j["B0"] = c.params.B0;
    j["A1"] = c.params.A1;
    j["B1"] = c.params.B1;
    j["a1"] = c.inputs.a1;
    j["b1"] = c.inputs.b1;
    j["overlap_gap_u"] = c.ap.overlap_gap_u;
    j["overlap_gap_v"] = c.ap.overlap_gap_v;
    j["remainder_sup_core"] = c.remainder.sup_core;
    j["remainder_sup_inner"] = c.remainder.sup_inner;
    j["remainder_weighted"] = c.remainder.sup_inner_weighted;
    j["remainder_zero_outside"] = c.remainder.zero_outside;
    j["remainder_exp_tail"] = c.remainder.exp_tail_check;
    j["s2_gap_u"] = c.s2s3.gap_s2_u;
    j["s2_gap_v"] = c.s2s3.gap_s2_v;
    j["s3_gap_u"] = c.s2s3.gap_s3_u;
    j["s3_gap_v"] = c.s2s3.gap_s3_v;
    j["phi1_iterations"] = c.phi1_iterations;
    return j;
}

json outer_json(const OuterStage& st) {
    json j;
    j["r0"] = st.sol.r0;
    j["psi0"] = st.sol.psi0;
    j["psi0_onesided_gap"] = st.sol.psi0_onesided_gap;
    j["u1p"] = st.exp.boundary_data.u1p;
    j["u2p"] = st.exp.boundary_data.u2p;
    j["u3p"] = st.exp.boundary_data.u3p;
    j["v1p"] = st.exp.boundary_data.v1p;
    j["v2p"] = st.exp.boundary_data.v2p;
    j["v3p"] = st.exp.boundary_data.v3p;
    j["u0pp"] = st.exp.boundary_data.u0pp;
    j["v0pp"] = st.exp.boundary_data.v0pp;
    j["u0ppp"] = st.exp.boundary_data.u0ppp;
    j["v0ppp"] = st.exp.boundary_data.v0ppp;
    j["sigma_min_w"] = st.nondegeneracy.sigma_min_w;
    j["sigma_min_u0"] = st.nondegeneracy.sigma_min_u0;
    j["sigma_min_v0"] = st.nondegeneracy.sigma_min_v0;
    j["slope_gap"] = st.nondegeneracy.slope_gap;
    j["nondegenerate"] = st.nondegeneracy.pass;
    return j;
}

json profile_json(const InnerStage& in) {
    json j;
    j["T"] = in.T;
    j["n_nodes"] = in.n_nodes;
    j["edge_scale"] = in.edge_scale;
    j["psi0"] = in.profile->psi0;
    j["k"] = in.profile->k;
    j["b0"] = in.base_corr->b0;
    j["symmetry_defect"] = in.profile->symmetry_defect;
    j["k_check_gap"] = in.profile->k_check_gap;
    j["residual"] = in.profile->residual;
    return j;
}

std::string g_tag(double g) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0e", g);
    return buf;
}

}  // namespace

RunArtifacts run_profile_stage(const ExperimentConfig& cfg) {
    RunArtifacts art;
    const std::string dir = outdir(cfg);
    char name[128];
    std::snprintf(name, sizeof(name), "%s/profile_T%g_n%d.csv", dir.c_str(),
                  cfg.blowup_T, cfg.blowup_n_nodes);
    if (!fs::exists(name)) {
        auto p = solve_profile(1.0, cfg.blowup_T, cfg.blowup_n_nodes);
        write_csv(name, {"t", "U", "V"}, {&p.t, &p.U, &p.V});
    }
    art.files.push_back(name);
    return art;
}

RunArtifacts run_outer_stage(const ExperimentConfig& cfg) {
    RunArtifacts art;
    const std::string dir = outdir(cfg);
    Pipeline pipe{cfg.pipeline};
    const auto& st = pipe.outer();
    const std::string wcsv = dir + "/outer_w.csv";
    write_csv(wcsv, {"r", "w"}, {&st.sol.w.grid->nodes(), &st.sol.w.values});
    art.files.push_back(wcsv);
    json j;
    j["config_hash"] = cfg.config_hash();
    j["outer"] = outer_json(st);
    const std::string rp = dir + "/outer_report.json";
    std::ofstream(rp) << j.dump(2) << "\n";
    art.files.push_back(rp);
    art.report_json = rp;
    return art;
}

RunArtifacts run_construct_stage(const ExperimentConfig& cfg,
                                 const std::vector<double>& gs) {
    RunArtifacts art;
    const std::string dir = outdir(cfg);
    Pipeline pipe{cfg.pipeline};
    json per_g = json::array();
    for (double g : gs) {
        auto c = pipe.construct(g);
        const std::string acsv = dir + "/approx_g" + g_tag(g) + ".csv";
        write_csv(acsv, {"r", "u_ap", "v_ap"},
                  {&c.ap.grid->nodes(), &c.ap.u_ap.values, &c.ap.v_ap.values});
        art.files.push_back(acsv);
        const std::string rcsv = dir + "/remainder_g" + g_tag(g) + ".csv";
        write_csv(rcsv, {"r", "R1", "R2"},
                  {&c.ap.grid->nodes(), &c.remainder.R1.values, &c.remainder.R2.values});
        art.files.push_back(rcsv);
        per_g.push_back(construction_json(c));
    }
    json j;
    j["config_hash"] = cfg.config_hash();
    j["outer"] = outer_json(pipe.outer());
    j["profile"] = profile_json(pipe.inner());
    j["construct"] = per_g;
    const std::string rp = dir + "/construct_report.json";
    std::ofstream(rp) << j.dump(2) << "\n";
    art.files.push_back(rp);
    art.report_json = rp;
    return art;
}

RunArtifacts run_solve_stage(const ExperimentConfig& cfg, const std::vector<double>& gs) {
    RunArtifacts art;
    const std::string dir = outdir(cfg);
    Pipeline pipe{cfg.pipeline};
    json per_g = json::array();
    for (double g : gs) {
        auto c = pipe.construct(g);
        auto s = pipe.solve(c);
        const std::string scsv = dir + "/solution_g" + g_tag(g) + ".csv";
        write_csv(scsv, {"r", "u", "v"},
                  {&s.u.grid->nodes(), &s.u.values, &s.v.values});
        art.files.push_back(scsv);
        json sj = construction_json(c);
        sj["newton_iterations"] = s.report.iterations;
        sj["newton_residual"] = s.report.final_residual;
        sj["min_u"] = s.min_u;
        sj["min_v"] = s.min_v;
        sj["correction_norm1"] = s.correction_norm1;
        sj["interface_radius"] = s.interface_radius;
        per_g.push_back(std::move(sj));
    }
    json j;
    j["config_hash"] = cfg.config_hash();
    j["outer"] = outer_json(pipe.outer());
    j["profile"] = profile_json(pipe.inner());
    j["solve"] = per_g;
    const std::string rp = dir + "/solve_report.json";
    std::ofstream(rp) << j.dump(2) << "\n";
    art.files.push_back(rp);
    art.report_json = rp;
    return art;
}

RunArtifacts run_sweep_stage(const ExperimentConfig& cfg) {
    RunArtifacts art;
    const std::string dir = outdir(cfg);
    Pipeline pipe{cfg.pipeline};
    auto sweep = run_sweep(pipe, cfg.threads);
    json j;
    j["config_hash"] = cfg.config_hash();
    j["outer"] = outer_json(pipe.outer());
    j["profile"] = profile_json(pipe.inner());
    json per_g = json::array();
    for (size_t i = 0; i < sweep.constructions.size(); ++i) {
        json sj = construction_json(sweep.constructions[i]);
        const auto& s = sweep.solutions[i];
        sj["newton_iterations"] = s.report.iterations;
        sj["newton_residual"] = s.report.final_residual;
        sj["min_u"] = s.min_u;
        sj["min_v"] = s.min_v;
        sj["correction_norm1"] = s.correction_norm1;
        sj["interface_radius"] = s.interface_radius;
        per_g.push_back(std::move(sj));
    }
    j["sweep"] = per_g;
    j["rates"] = {{"u_vs_wplus", rate_json(sweep.rate_u)},
                  {"v_vs_wminus", rate_json(sweep.rate_v)},
                  {"inner_profile", rate_json(sweep.rate_inner)},
                  {"correction_norm1", rate_json(sweep.correction)},
                  {"interface_drift", rate_json(sweep.interface_drift)},
                  {"overlap", rate_json(sweep.overlap)},
                  {"remainder", rate_json(sweep.remainder)}};
    const std::string rp = dir + "/sweep_report.json";
    std::ofstream(rp) << j.dump(2) << "\n";
    art.files.push_back(rp);
    art.report_json = rp;
    return art;
}

RunArtifacts write_verify_report(const ExperimentConfig& cfg,
                                 const AcceptanceReport& rep) {
    RunArtifacts art;
    const std::string dir = outdir(cfg);
    json j;
    j["config_hash"] = cfg.config_hash();
    json arr = json::array();
    for (const auto& c : rep.criteria) {
        arr.push_back({{"id", c.id},
                       {"name", c.name},
                       {"pass", c.pass},
                       {"value", c.value},
                       {"detail", c.detail}});
    }
    j["acceptance"] = arr;
    j["all_pass"] = rep.all_pass();
    const std::string rp = dir + "/report.json";
    std::ofstream(rp) << j.dump(2) << "\n";
    art.files.push_back(rp);
    art.report_json = rp;
    return art;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& stage,
                    const RunArtifacts& artifacts, bool pass) {
    json j;
    j["config_hash"] = cfg.config_hash();
    j["stage"] = stage;
    j["pass"] = pass;
    j["files"] = artifacts.files;
    j["timestamp"] = static_cast<long long>(::time(nullptr));
    std::ofstream(cfg.output_dir + "/manifest_" + stage + ".json") << j.dump(2) << "\n";
}

}  // namespace gpseg
