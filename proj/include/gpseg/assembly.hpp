#pragma once

#include <memory>

#include "gpseg/blowup.hpp"
#include "gpseg/grid.hpp"
#include "gpseg/matching.hpp"
#include "gpseg/outer.hpp"

namespace gpseg {

/// Quintic blend between rho |ln g| g^-1/4 and 2 rho |ln g| g^-1/4 from the
/// interface. Configurations with a tight interface need rho < 1 so the
/// outer edge stays inside the domain; the estimates only use the
/// |ln g| g^-1/4 proportionality across a g ladder, not the absolute width.
struct CutoffSpec {
    double g = 0;
    double r0 = 0;
    double edge_scale = 1.0;  // rho
    double inner_edge = 0;    // distances from r0
    double outer_edge = 0;

    double zeta(double r) const;
    double dzeta(double r) const;
    double d2zeta(double r) const;

    double max_dzeta = 0;   // measured on a fine probe grid
    double max_d2zeta = 0;
};

CutoffSpec build_cutoff(double g, double r0, double domain_a, double domain_b,
                        double edge_scale = 1.0);

/// Largest edge_scale (capped at 1) for which the outer edge fits inside
/// margin * min(r0 - a, b - r0) at the smallest planned g.
double fit_edge_scale(double g_min, double r0, double domain_a, double domain_b,
                      double margin = 0.9);

/// Pointwise evaluation of the inner approximate pair
///   u_in(r) = mu g^-1/4 U(t) + varphi0(t) + varphi1(t),
/// t = mu g^1/4 (r - r0 - xi); second derivatives come from the defining
/// equations, so no finite differencing on g^-1/4-scale meshes is involved.
class InnerEvaluator {
public:
    InnerEvaluator(std::shared_ptr<const BlowupProfile> profile,
                   std::shared_ptr<const InnerCorrections> corr,
                   const MatchingParameters& par, double g, double f_prime0,
                   double h_prime0);

    double t_of_r(double r) const { return alpha_ * (r - r0_ - xi_); }
    double r_of_t(double t) const { return r0_ + xi_ + t / alpha_; }
    double max_radius_span() const;  // largest |r - r0 - xi| with t in range

    double u(double r) const;
    double v(double r) const;
    double du(double r) const;
    double dv(double r) const;
    double d2u(double r) const;
    double d2v(double r) const;

    const BlowupProfile& profile() const { return *profile_; }
    double g() const { return g_; }

private:
    std::shared_ptr<const BlowupProfile> profile_;
    std::shared_ptr<const InnerCorrections> corr_;
    double g_, mu_, xi_, r0_, alpha_, fp0_, hp0_;
    double A0_, B0_;
    // g^-1/2 (phi0 + Z + gauge) / phi1 + g^-3/4 gauge, and their mirrors
    std::vector<double> vphi0_, vphi0t_, vphi1_, vphi1t_;
    std::vector<double> w0p_, w0pt_;  // gauge-augmented (phi0+Z)' pair
    double eval(const std::vector<double>& y, double t, int order) const;
};

/// Outer pieces: the boundary-perturbed family on its two grids, zero across
/// the interface.
class OuterEvaluator {
public:
    OuterEvaluator(std::shared_ptr<const OuterFamily> fam, double r0);

    double u(double r) const;
    double v(double r) const;
    double du(double r) const;
    double dv(double r) const;
    double d2u(double r) const;
    double d2v(double r) const;

    const OuterFamily& family() const { return *fam_; }
    double r0() const { return r0_; }

private:
    std::shared_ptr<const OuterFamily> fam_;
    double r0_;
};

struct ApproximateSolution {
    GridPtr grid;  // union of the outer grids and the inner image
    GridFunction u_ap, v_ap;
    double g = 0;
    MatchingParameters params;
    CutoffSpec cutoff;
    std::shared_ptr<const InnerEvaluator> inner;
    std::shared_ptr<const OuterEvaluator> outer;
    double overlap_gap_u = 0;  // blend-zone sup |u_out - u_in|
    double overlap_gap_v = 0;
};

/// Pointwise gluing u_in + zeta (u_out - u_in) on the union grid.
ApproximateSolution assemble(std::shared_ptr<const OuterEvaluator> outer,
                             std::shared_ptr<const InnerEvaluator> inner,
                             const CutoffSpec& cutoff);

struct RemainderReport {
    GridFunction R1, R2;
    double sup_core = 0;            // smooth-side sup over the zeta = 0 zone
    double sup_inner = 0;           // same over |r-r0| <= outer_edge
    double sup_inner_weighted = 0;  // sup_core / (g^-1/2 |ln g|^4)
    double exp_tail_check = 0;      // weighted envelope of the opposite components
    double zero_outside = 0;        // max |R| on outer-grid rows with zeta = 1
};

/// Both components of the defect of (u_ap, v_ap) in the full system. Inside
/// the blend the derivatives come from the evaluators; where zeta = 1 the
/// rows are the outer grids' own finite-difference rows, so zero_outside
/// measures the outer Newton tolerance and nothing else.
RemainderReport compute_remainder(const ApproximateSolution& ap,
                                  const Nonlinearity& f, const Nonlinearity& h);

/// Weighted sup norms of Eq-type pairs: component 1 weighted by w_i(r - r0),
/// component 2 by w_i(r0 - r). Exponential weights are handled in log space.
struct WeightedNormEvaluator {
    double gamma = 0.5;
    double g = 0;
    double r0 = 0;
};

/// log w_i(s) for i in {0, 1, 2}.
double log_weight(int i, double s, double g, double gamma);

double weighted_norm(const GridFunction& phi, const GridFunction& psi, int i,
                     const WeightedNormEvaluator& ev);

}  // namespace gpseg
