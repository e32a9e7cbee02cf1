#include "gpseg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gpseg/interp.hpp"
#include "gpseg/stencil.hpp"
#include "gpseg/util.hpp"

namespace gpseg {

double CutoffSpec::zeta(double r) const {
    return smoothstep(inner_edge, outer_edge, std::abs(r - r0));
}

double CutoffSpec::dzeta(double r) const {
    const double s = r - r0;
    const double sign = s >= 0 ? 1.0 : -1.0;
    return sign * smoothstep_d1(inner_edge, outer_edge, std::abs(s));
}

double CutoffSpec::d2zeta(double r) const {
    return smoothstep_d2(inner_edge, outer_edge, std::abs(r - r0));
}

CutoffSpec build_cutoff(double g, double r0, double domain_a, double domain_b,
                        double edge_scale) {
    if (!(g >= std::exp(2.0)))
        throw std::invalid_argument("build_cutoff: g must be >= e^2");
    CutoffSpec c;
    c.g = g;
    c.r0 = r0;
    c.edge_scale = edge_scale;
    const double width = std::log(g) * std::pow(g, -0.25);
    c.inner_edge = edge_scale * width;
    c.outer_edge = 2.0 * edge_scale * width;
    if (c.outer_edge >= std::min(r0 - domain_a, domain_b - r0))
        throw std::invalid_argument(
            "build_cutoff: edges exceed the domain; raise g or lower edge_scale");
    // measured derivative bounds on a probe grid
    for (int i = 0; i <= 4000; ++i) {
        const double r = r0 + c.outer_edge * (i / 4000.0);
        c.max_dzeta = std::max(c.max_dzeta, std::abs(c.dzeta(r)));
        c.max_d2zeta = std::max(c.max_d2zeta, std::abs(c.d2zeta(r)));
    }
    return c;
}

double fit_edge_scale(double g_min, double r0, double domain_a, double domain_b,
                      double margin) {
    const double room = margin * std::min(r0 - domain_a, domain_b - r0);
    const double width = std::log(g_min) * std::pow(g_min, -0.25);
    return std::min(1.0, room / (2.0 * width));
}

// ---------------------------------------------------------------------------

InnerEvaluator::InnerEvaluator(std::shared_ptr<const BlowupProfile> profile,
                               std::shared_ptr<const InnerCorrections> corr,
                               const MatchingParameters& par, double g,
                               double f_prime0, double h_prime0)
    : profile_(std::move(profile)),
      corr_(std::move(corr)),
      g_(g),
      mu_(par.mu()),
      xi_(par.xi),
      r0_(corr_->r0),
      alpha_(par.mu() * std::pow(g, 0.25)),
      fp0_(f_prime0),
      hp0_(h_prime0),
      A0_(par.A0),
      B0_(par.B0) {
    if (corr_->phi1.empty() || corr_->g_assembled != g)
        throw std::invalid_argument("InnerEvaluator: phi1 not assembled for this g");
    if (corr_->w0p.empty())
        throw std::invalid_argument("InnerEvaluator: correction blocks missing");
    const double g12 = std::pow(g, -0.5);
    const double g34 = std::pow(g, -0.75);
    const BlowupProfile& p = *profile_;
    const int n = p.n;
    vphi0_.resize(n);
    vphi0t_.resize(n);
    vphi1_.resize(n);
    vphi1t_.resize(n);
    w0p_.resize(n);
    w0pt_.resize(n);
    for (int j = 0; j < n; ++j) {
        const double t = p.t[j];
        const double ku1 = p.Up[j], ku2 = t * p.Up[j] + p.U[j];
        const double kv1 = p.Vp[j], kv2 = t * p.Vp[j] + p.V[j];
        vphi0_[j] = g12 * (corr_->phi0[j] + corr_->Z[j] + A0_ * ku1 + B0_ * ku2);
        vphi0t_[j] = g12 * (corr_->phi0_tilde[j] + corr_->Z_tilde[j] + A0_ * kv1 + B0_ * kv2);
        vphi1_[j] = corr_->phi1[j] + g34 * (par.A1 * ku1 + par.B1 * ku2);
        vphi1t_[j] = corr_->phi1_tilde[j] + g34 * (par.A1 * kv1 + par.B1 * kv2);
        const double Upp = p.U[j] * p.V[j] * p.V[j];
        const double Vpp = p.V[j] * p.U[j] * p.U[j];
        w0p_[j] = corr_->w0p[j] + A0_ * Upp + B0_ * (t * Upp + 2.0 * p.Up[j]);
        w0pt_[j] = corr_->w0p_tilde[j] + A0_ * Vpp + B0_ * (t * Vpp + 2.0 * p.Vp[j]);
    }
}

double InnerEvaluator::max_radius_span() const {
    return profile_->T / alpha_;
}

double InnerEvaluator::eval(const std::vector<double>& y, double t, int order) const {
    return poly_interp(profile_->t, y, t, order);
}

double InnerEvaluator::u(double r) const {
    const double t = t_of_r(r);
    return mu_ * std::pow(g_, -0.25) * eval(profile_->U, t, 0) + eval(vphi0_, t, 0) +
           eval(vphi1_, t, 0);
}

double InnerEvaluator::v(double r) const {
    const double t = t_of_r(r);
    return mu_ * std::pow(g_, -0.25) * eval(profile_->V, t, 0) + eval(vphi0t_, t, 0) +
           eval(vphi1t_, t, 0);
}

double InnerEvaluator::du(double r) const {
    const double t = t_of_r(r);
    return alpha_ * (mu_ * std::pow(g_, -0.25) * eval(profile_->U, t, 1) +
                     eval(vphi0_, t, 1) + eval(vphi1_, t, 1));
}

double InnerEvaluator::dv(double r) const {
    const double t = t_of_r(r);
    return alpha_ * (mu_ * std::pow(g_, -0.25) * eval(profile_->V, t, 1) +
                     eval(vphi0t_, t, 1) + eval(vphi1t_, t, 1));
}

double InnerEvaluator::d2u(double r) const {
    // second derivatives via the defining equations:
    //   U'' = U V^2
    //   (phi0 + Z + gauge)'' = V^2 (.) + 2UV (.~) - (n-1)/r0 U'
    //   (phi1 + gauge)''     = V^2 (.) + 2UV (.~) - H1(t)
    const double t = t_of_r(r);
    const double U = eval(profile_->U, t, 0), V = eval(profile_->V, t, 0);
    const double Up = eval(profile_->Up, t, 0);
    const double cfac = (corr_->dim - 1) / r0_;
    const double g12 = std::pow(g_, -0.5);
    const double p0 = eval(vphi0_, t, 0), p0t = eval(vphi0t_, t, 0);
    const double p1 = eval(vphi1_, t, 0), p1t = eval(vphi1t_, t, 0);

    const double n1r = cfac, n1r2 = (corr_->dim - 1) / (r0_ * r0_);
    const double g34 = std::pow(g_, -0.75);
    const double H1 = -n1r2 * xi_ * Up * g12 - n1r2 / mu_ * g34 * t * Up +
                      n1r / mu_ * g34 * eval(w0p_, t, 0) - fp0_ / mu_ * g34 * U;

    const double base = mu_ * std::pow(g_, -0.25) * U * V * V;
    const double c0 = V * V * p0 + 2.0 * U * V * p0t - cfac * Up * g12;
    const double c1 = V * V * p1 + 2.0 * U * V * p1t - H1;
    return alpha_ * alpha_ * (base + c0 + c1);
}

double InnerEvaluator::d2v(double r) const {
    const double t = t_of_r(r);
    const double U = eval(profile_->U, t, 0), V = eval(profile_->V, t, 0);
    const double Vp = eval(profile_->Vp, t, 0);
    const double cfac = (corr_->dim - 1) / r0_;
    const double g12 = std::pow(g_, -0.5);
    const double p0 = eval(vphi0_, t, 0), p0t = eval(vphi0t_, t, 0);
    const double p1 = eval(vphi1_, t, 0), p1t = eval(vphi1t_, t, 0);

    const double n1r = cfac, n1r2 = (corr_->dim - 1) / (r0_ * r0_);
    const double g34 = std::pow(g_, -0.75);
    const double H1t = -n1r2 * xi_ * Vp * g12 - n1r2 / mu_ * g34 * t * Vp +
                       n1r / mu_ * g34 * eval(w0pt_, t, 0) - hp0_ / mu_ * g34 * V;

    const double base = mu_ * std::pow(g_, -0.25) * V * U * U;
    const double c0 = U * U * p0t + 2.0 * U * V * p0 - cfac * Vp * g12;
    const double c1 = U * U * p1t + 2.0 * U * V * p1 - H1t;
    return alpha_ * alpha_ * (base + c0 + c1);
}

// ---------------------------------------------------------------------------

OuterEvaluator::OuterEvaluator(std::shared_ptr<const OuterFamily> fam, double r0)
    : fam_(std::move(fam)), r0_(r0) {}

double OuterEvaluator::u(double r) const {
    if (r <= r0_) return 0.0;
    return interp_value(fam_->u, r);
}

double OuterEvaluator::v(double r) const {
    if (r >= r0_) return 0.0;
    return interp_value(fam_->v, r);
}

double OuterEvaluator::du(double r) const {
    if (r <= r0_) return 0.0;
    return interp_and_derivatives(fam_->u, r, 1);
}

double OuterEvaluator::dv(double r) const {
    if (r >= r0_) return 0.0;
    return interp_and_derivatives(fam_->v, r, 1);
}

double OuterEvaluator::d2u(double r) const {
    if (r <= r0_) return 0.0;
    return interp_and_derivatives(fam_->u, r, 2);
}

double OuterEvaluator::d2v(double r) const {
    if (r >= r0_) return 0.0;
    return interp_and_derivatives(fam_->v, r, 2);
}

// ---------------------------------------------------------------------------

ApproximateSolution assemble(std::shared_ptr<const OuterEvaluator> outer,
                             std::shared_ptr<const InnerEvaluator> inner,
                             const CutoffSpec& cutoff) {
    const double r0 = cutoff.r0;
    const auto& grid_u = *outer->family().u.grid;
    const auto& grid_v = *outer->family().v.grid;
    const double a = grid_v.a(), b = grid_u.b();

    // the inner image must cover the blend zone with a pad of a few cells
    const double pad = 3.0 * std::max(grid_u.max_spacing_in(r0, r0 + cutoff.outer_edge),
                                      grid_v.max_spacing_in(r0 - cutoff.outer_edge, r0));
    if (inner->max_radius_span() < cutoff.outer_edge + pad)
        throw std::runtime_error(
            "assemble: inner profile span too small for the blend zone; raise T");

    // union grid: both outer grids plus the inner image over the blend span
    std::vector<double> nodes;
    nodes.reserve(grid_v.size() + grid_u.size() + inner->profile().n);
    for (int i = 0; i < grid_v.size(); ++i) nodes.push_back(grid_v.node(i));
    for (int i = 0; i < grid_u.size(); ++i) nodes.push_back(grid_u.node(i));
    for (double t : inner->profile().t) {
        const double r = inner->r_of_t(t);
        if (r > a && r < b && std::abs(r - r0) <= cutoff.outer_edge + pad)
            nodes.push_back(r);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [](double x, double y) { return std::abs(x - y) < 1e-14; }),
                nodes.end());

    ApproximateSolution ap;
    ap.grid = std::make_shared<RadialGrid>(std::move(nodes), grid_u.dim());
    ap.g = inner->g();
    ap.cutoff = cutoff;
    ap.inner = inner;
    ap.outer = outer;
    ap.u_ap = GridFunction(ap.grid, 0.0);
    ap.v_ap = GridFunction(ap.grid, 0.0);

    for (int i = 0; i < ap.grid->size(); ++i) {
        const double r = ap.grid->node(i);
        const double z = cutoff.zeta(r);
        if (z >= 1.0) {
            ap.u_ap[i] = outer->u(r);
            ap.v_ap[i] = outer->v(r);
        } else if (z <= 0.0) {
            ap.u_ap[i] = inner->u(r);
            ap.v_ap[i] = inner->v(r);
        } else {
            const double ui = inner->u(r), vi = inner->v(r);
            ap.u_ap[i] = ui + z * (outer->u(r) - ui);
            ap.v_ap[i] = vi + z * (outer->v(r) - vi);
            ap.overlap_gap_u = std::max(ap.overlap_gap_u, std::abs(outer->u(r) - ui));
            ap.overlap_gap_v = std::max(ap.overlap_gap_v, std::abs(outer->v(r) - vi));
        }
    }
    return ap;
}

// ---------------------------------------------------------------------------

RemainderReport compute_remainder(const ApproximateSolution& ap,
                                  const Nonlinearity& f, const Nonlinearity& h) {
    const double r0 = ap.cutoff.r0;
    const double g = ap.g;
    const int dim = ap.grid->dim();
    const auto& inner = *ap.inner;
    const auto& outer = *ap.outer;

    RemainderReport rep;
    rep.R1 = GridFunction(ap.grid, 0.0);
    rep.R2 = GridFunction(ap.grid, 0.0);

    auto residual_at = [&](double r, double& R1, double& R2) {
        const double z = ap.cutoff.zeta(r);
        double u, v, du, dv, d2u, d2v;
        if (z <= 0.0) {
            u = inner.u(r);
            v = inner.v(r);
            du = inner.du(r);
            dv = inner.dv(r);
            d2u = inner.d2u(r);
            d2v = inner.d2v(r);
        } else if (z >= 1.0) {
            u = outer.u(r);
            v = outer.v(r);
            du = outer.du(r);
            dv = outer.dv(r);
            d2u = outer.d2u(r);
            d2v = outer.d2v(r);
        } else {
            const double zp = ap.cutoff.dzeta(r), zpp = ap.cutoff.d2zeta(r);
            const double ui = inner.u(r), uo = outer.u(r);
            const double vi = inner.v(r), vo = outer.v(r);
            const double dui = inner.du(r), duo = outer.du(r);
            const double dvi = inner.dv(r), dvo = outer.dv(r);
            u = ui + z * (uo - ui);
            v = vi + z * (vo - vi);
            du = dui + zp * (uo - ui) + z * (duo - dui);
            dv = dvi + zp * (vo - vi) + z * (dvo - dvi);
            d2u = inner.d2u(r) + zpp * (uo - ui) + 2.0 * zp * (duo - dui) +
                  z * (outer.d2u(r) - inner.d2u(r));
            d2v = inner.d2v(r) + zpp * (vo - vi) + 2.0 * zp * (dvo - dvi) +
                  z * (outer.d2v(r) - inner.d2v(r));
        }
        R1 = -d2u - (dim - 1) / r * du + f.f(u) + g * v * v * u;
        R2 = -d2v - (dim - 1) / r * dv + h.f(v) + g * u * u * v;
    };

    for (int i = 0; i < ap.grid->size(); ++i) {
        const double r = ap.grid->node(i);
        if (r <= ap.grid->a() || r >= ap.grid->b()) continue;
        double R1, R2;
        residual_at(r, R1, R2);
        rep.R1[i] = R1;
        rep.R2[i] = R2;
    }

    // the smooth-side component is R1 for r >= r0 and, by the mirror, R2 for
    // r <= r0; the opposite components carry the exponential envelope
    const double lng = std::log(g);
    const double norm = std::pow(g, -0.5) * lng * lng * lng * lng;
    for (int i = 0; i < ap.grid->size(); ++i) {
        const double r = ap.grid->node(i);
        if (std::abs(r - r0) > ap.cutoff.outer_edge) continue;
        const double v = r >= r0 ? std::abs(rep.R1[i]) : std::abs(rep.R2[i]);
        rep.sup_inner = std::max(rep.sup_inner, v);
        if (std::abs(r - r0) <= ap.cutoff.inner_edge)
            rep.sup_core = std::max(rep.sup_core, v);
    }
    rep.sup_inner_weighted = rep.sup_core / norm;

    double log_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < ap.grid->size(); ++i) {
        const double r = ap.grid->node(i);
        const double val = r > r0 ? std::abs(rep.R2[i]) : std::abs(rep.R1[i]);
        if (val == 0.0) continue;
        log_max = std::max(log_max, std::log(val) +
                                        2.0 * std::pow(g, 0.25) * std::abs(r - r0) +
                                        0.5 * std::log(g));
    }
    rep.exp_tail_check = std::isfinite(log_max) && log_max < 700.0 ? std::exp(log_max) :
                         (std::isfinite(log_max) ? std::numeric_limits<double>::infinity() : 0.0);

    // where zeta = 1 the outer pieces are exact discrete solutions: measure
    // their own finite-difference rows on the extended-precision vectors so
    // the double-cast quantization does not mask the solver tolerance
    auto outer_rows = [&](const GridFunction& w, const std::vector<long double>& whp,
                          const Nonlinearity& nl) {
        const RadialGrid& gr = *w.grid;
        const LaplacianBc bc{gr.a() == 0.0 ? EndRule::regularity : EndRule::one_sided,
                             EndRule::one_sided};
        for (int i = 1; i + 1 < gr.size(); ++i) {
            const double r = gr.node(i);
            if (ap.cutoff.zeta(r) < 1.0) continue;
            // g u v^2 vanishes identically on the other side of the interface
            const long double row =
                laplacian_apply_t<long double>(gr, whp, i, bc) - nl.f_hp(whp[i]);
            rep.zero_outside = std::max(rep.zero_outside, std::abs(static_cast<double>(row)));
        }
    };
    outer_rows(outer.family().u, outer.family().u_hp, f);
    outer_rows(outer.family().v, outer.family().v_hp, h);
    return rep;
}

// ---------------------------------------------------------------------------

double log_weight(int i, double s, double g, double gamma) {
    const double g4 = std::pow(g, 0.25);
    switch (i) {
        case 0:
            return s >= 0 ? std::log1p(std::pow(g4 * s, 1.0 + gamma)) : 0.0;
        case 1:
            return s >= 0 ? 0.0 : g4 * (-s);
        case 2:
            return s >= 0 ? std::log1p(std::pow(g4 * s, 1.0 + gamma)) : g4 * (-s);
        default:
            throw std::invalid_argument("log_weight: i must be 0, 1 or 2");
    }
}

double weighted_norm(const GridFunction& phi, const GridFunction& psi, int i,
                     const WeightedNormEvaluator& ev) {
    if (phi.grid.get() != psi.grid.get())
        throw std::invalid_argument("weighted_norm: mismatched grids");
    const RadialGrid& gr = *phi.grid;
    double lmax_phi = -std::numeric_limits<double>::infinity();
    double lmax_psi = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < gr.size(); ++j) {
        const double s = gr.node(j) - ev.r0;
        if (phi[j] != 0.0)
            lmax_phi = std::max(lmax_phi, log_weight(i, s, ev.g, ev.gamma) +
                                              std::log(std::abs(phi[j])));
        if (psi[j] != 0.0)
            lmax_psi = std::max(lmax_psi, log_weight(i, -s, ev.g, ev.gamma) +
                                              std::log(std::abs(psi[j])));
    }
    auto lift = [](double lm) {
        if (!std::isfinite(lm)) return 0.0;
        if (lm > 700.0)
            throw std::overflow_error("weighted_norm: exponential weight overflow");
        return std::exp(lm);
    };
    return lift(lmax_phi) + lift(lmax_psi);
}

}  // namespace gpseg
