#pragma once

#include <memory>
#include <vector>

#include "gpseg/band.hpp"
#include "gpseg/newton.hpp"

namespace gpseg {

/// Entire-line transition profile pair on a symmetric truncated grid:
/// U'' = U V^2, V'' = V U^2, with U' -> psi0 at +infinity, the mirror
/// symmetry U(-t) = V(t), and super-Gaussian tails. k is the asymptotic
/// phase in U(t) = psi0 t + k + o(1).
struct BlowupProfile {
    double T = 0;
    int n = 0;
    double psi0 = 0;
    double k = 0;
    std::vector<double> t;
    std::vector<double> U, V;
    std::vector<double> Up, Vp;  // 4th-order centered derivatives
    double residual = 0;
    double symmetry_defect = 0;
    double k_check_gap = 0;  // |k(T) - k(T-1)|
    NewtonReport newton;

    double h() const { return t[1] - t[0]; }
    double eval(const std::vector<double>& y, double x, int order = 0) const;
};

/// Newton solve of the truncated profile system. Boundary rows: U'(T) = psi0,
/// V'(-T) = -psi0, the Robin closure V'(T) + U(T) V(T) = 0, and the
/// translation gauge U(0) = V(0) in place of the mirrored Robin row at -T.
BlowupProfile solve_profile(double psi0, double T, int n_nodes);

/// One solution of L(Phi, PhiTilde) = (H, HTilde) with affine growth
/// Phi ~ a_plus + b t at +T and PhiTilde ~ a_minus + b t at -T, normalized to
/// equal constants and equal slopes (the A/B kernel freedom is fixed by that
/// convention and re-added analytically on request).
struct GrowthSolution {
    std::vector<double> Phi, PhiTilde;
    double a_plus = 0, a_minus = 0;
    double b = 0;
    double A = 0, B = 0;        // gauge actually added to the arrays
    double fit_residual = 0;    // worst affine-fit deviation over the windows
    double b_fit = 0;           // slope re-fitted from the solution arrays
};

/// Factored solver for the linearized entire-line problem about (U, V).
/// The affine tails enter as two bordered scalar unknowns, so the core stays
/// a well-conditioned banded system with pure decay closures.
class GrowthSolver {
public:
    explicit GrowthSolver(const BlowupProfile& profile);

    /// H, HTilde must decay (tail gate at |t| >= T-1). Gauge (A, B) adds
    /// A (U', V') + B (t U' + U, t V' + V).
    GrowthSolution solve(const std::vector<double>& H, const std::vector<double>& Ht,
                         double gauge_A = 0.0, double gauge_B = 0.0) const;

    const BlowupProfile& profile() const { return *p_; }

    /// Prop 2.3 quadrature evaluations on the profile grid.
    double b_integral(const std::vector<double>& H, const std::vector<double>& Ht) const;
    double sum_integral(const std::vector<double>& H, const std::vector<double>& Ht) const;

private:
    const BlowupProfile* p_;
    std::unique_ptr<BandMatrix> core_;
    std::unique_ptr<BandLU> lu_;
    std::vector<double> xb_, xs_;       // core solutions for the border columns
    std::vector<double> eta_p_, eta_m_; // smooth switches to the affine tails
    int pin_p_ = 0, pin_m_ = 0;
    std::vector<double> refined_solve(const std::vector<double>& rhs) const;
};

inline GrowthSolution solve_linearized_growth(const BlowupProfile& p,
                                              const std::vector<double>& H,
                                              const std::vector<double>& Ht,
                                              double A = 0.0, double B = 0.0) {
    return GrowthSolver(p).solve(H, Ht, A, B);
}

/// One phi1 building block: canonical growth solution for a fixed right side
/// plus the polynomial peel that restored its growing part.
struct CorrectionBlock {
    std::vector<double> sol, sol_tilde;    // decaying + affine part
    std::vector<double> peel, peel_tilde;  // blended polynomial part
    double a = 0, b = 0;                   // affine data of the canonical solution
    // peel polynomial coefficients (t^2, t^3) on the growing side
    double c2_plus = 0, c3_plus = 0, c2_minus = 0, c3_minus = 0;
};

/// Inner corrections about the profile: the curvature correction phi0 (with
/// its quadratic subtraction Z) and the phi1 assembly machinery. phi0 and the
/// phi1 blocks are stored g-independent; powers of g enter at assembly time.
struct InnerCorrections {
    double r0 = 0;
    int dim = 3;

    // phi0: L(phi0, phi0_tilde) = F0 = (n-1)/r0 (U', V') - L(Z, Z_tilde)
    std::vector<double> phi0, phi0_tilde;
    std::vector<double> Z, Z_tilde;  // g-independent: multiply by g^(-1/2)
    double b0 = 0;
    double a0 = 0;                 // vanishes by antisymmetry (diagnostic)
    double antisym_defect = 0;     // max |phi0_tilde(-t) + phi0(t)|
    double f0_antisym_defect = 0;  // same for the right side
    double zcoef = 0;              // Z(t) = zcoef t^2 for t >= 1

    // phi1 blocks (lazily built): t-linear block (t U', t V'), the
    // (phi0 + Z)'-curvature block, the two kernel-derivative blocks backing
    // the A0/B0 gauge curvature, and the f'(0)/h'(0) blocks
    bool blocks_ready = false;
    CorrectionBlock blk_t, blk_p, blk_k2, blk_k3, blk_u, blk_v;
    std::vector<double> w0p, w0p_tilde;  // (phi0 + Z)' and mirror

    // last phi1 assembly
    std::vector<double> phi1, phi1_tilde;
    double a1 = 0, b1 = 0;
    double g_assembled = 0;
};

/// Solve the phi0 problem (g-independent form). The caller multiplies the
/// assembled profile by g^(-1/2).
InnerCorrections compute_phi0(const BlowupProfile& profile, double r0, int dim);

/// Assemble phi1 for the given matching parameters; fills the phi1 fields
/// and the scalars a1, b1 (normalized by g^(-3/4) as in the expansions).
/// The right side keeps the exact profile carriers (t U', (phi0+Z+gauge)',
/// U) instead of their asymptotic polynomial values, so both components
/// decay on their confined sides and the assembled remainder keeps the
/// exponential envelope; the matched-side asymptotics are identical.
void compute_phi1(const BlowupProfile& profile, InnerCorrections& corr,
                  double f_prime0, double h_prime0, double g, double mu,
                  double xi, double A0, double B0);

/// Right side of the phi1 system (both components), used for assembly and
/// residual re-checks.
std::pair<std::vector<double>, std::vector<double>>
phi1_rhs(const BlowupProfile& p, const InnerCorrections& corr, double f_prime0,
         double h_prime0, double g, double mu, double xi, double A0, double B0);

}  // namespace gpseg
