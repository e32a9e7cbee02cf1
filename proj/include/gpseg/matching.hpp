#pragma once

#include <array>

namespace gpseg {

/// Scalar inputs of the three matching systems.
struct MatchingInputs {
    double psi0 = 0, k = 0, b0 = 0, a1 = 0, b1 = 0;
    double u1p = 0, u2p = 0, u3p = 0;  // u_i'(r0)
    double v1p = 0, v2p = 0, v3p = 0;
    double u0pp = 0, v0pp = 0, u0ppp = 0, v0ppp = 0;
    double f_prime0 = 0, h_prime0 = 0;
    double r0 = 0;
    int dim = 3;
    double g = 0;
};

struct Order1 {
    double delta1 = 0, delta_tilde1 = 0, mu1 = 0, xi = 0;
    double cond = 0;
};

struct Order2 {
    double delta2 = 0, delta_tilde2 = 0, A0 = 0, B0 = 0;
    double det = 0;        // determinant of the assembled system
    double det_closed_form = 0;  // two-term closed form (up to the column scaling)
    double cond = 0;
};

struct Order3 {
    double delta3 = 0, delta_tilde3 = 0, A1 = 0, B1 = 0;
    double cond = 0;
};

/// All twelve matching unknowns at a given g.
struct MatchingParameters {
    double xi = 0, mu1 = 0;
    double delta1 = 0, delta2 = 0, delta3 = 0;
    double delta_tilde1 = 0, delta_tilde2 = 0, delta_tilde3 = 0;
    double A0 = 0, A1 = 0, B0 = 0, B1 = 0;
    double delta() const { return delta1 + delta2 + delta3; }
    double delta_tilde() const { return delta_tilde1 + delta_tilde2 + delta_tilde3; }
    double mu() const { return 1.0 + mu1; }
};

MatchingParameters combine(const Order1& o1, const Order2& o2, const Order3& o3);

/// First 4x4 system (direct elimination).
Order1 solve_order1(const MatchingInputs& in);

/// The four closed-form solutions, for cross-checking solve_order1.
Order1 order1_closed_form(const MatchingInputs& in);

/// Second system for (delta2, delta_tilde2, A0, B0); b1 must be present in
/// the inputs.
Order2 solve_order2(const MatchingInputs& in, const Order1& o1);

/// Two-term closed-form expansion of the second system determinant.
double order2_determinant_closed_form(const MatchingInputs& in);

/// Third system for (delta3, delta_tilde3, A1, B1).
Order3 solve_order3(const MatchingInputs& in, const Order1& o1, const Order2& o2);

/// s^0..s^3 coefficients of the inner expansions of (u_in, v_in) about r0,
/// assembled from the polynomial content of U, phi0, phi1 under the map
/// t = mu g^(1/4) (s - xi).
struct InnerExpansionCoeffs {
    std::array<double, 4> u{};  // s^0..s^3
    std::array<double, 4> v{};
};
InnerExpansionCoeffs inner_expansion_coeffs(const MatchingInputs& in,
                                            const MatchingParameters& par);

/// Outer expansion coefficients (s^0..s^3) from the boundary data.
InnerExpansionCoeffs outer_expansion_coeffs(const MatchingInputs& in,
                                            const MatchingParameters& par);

/// Gap of the s^2 and s^3 coefficients between the outer and inner
/// expansions; O(g^-1/2) and O(g^-1/4) respectively when the systems were
/// transcribed correctly.
struct S2S3Report {
    double outer_s2_u = 0, inner_s2_u = 0, gap_s2_u = 0;
    double outer_s2_v = 0, inner_s2_v = 0, gap_s2_v = 0;
    double outer_s3_u = 0, inner_s3_u = 0, gap_s3_u = 0;
    double outer_s3_v = 0, inner_s3_v = 0, gap_s3_v = 0;
};
S2S3Report verify_s2_s3(const MatchingInputs& in, const MatchingParameters& par);

}  // namespace gpseg
